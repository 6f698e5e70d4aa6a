"""Command-line interface.

Subcommands: ``stream``, ``limit``, ``report``, ``compare``. Each writes one
report (JSON by default, or CSV) whose ``manifest`` records the command, its
arguments, the seed, the tool version and the wall-clock duration. Everything
outside the manifest is a pure function of the arguments.

Exit codes: 0 ok, 2 usage, 3 insufficient conditioning events, 4 candidate
budget exceeded, 5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from typing import List, Optional, Sequence

from . import __version__
from .analytics import d2_exact_pmf, report_tables
from .law import EmpiricalLaw, InsufficientEventsError, tv_distance, tv_noise_scale
from .limit import (
    DEFAULT_BUDGET,
    METHODS,
    CandidateBudgetExceeded,
    LimitConfig,
    default_delta,
    draw_limit_samples,
    estimate_limit_law,
    tv_truncation_bound,
)
from .stream import InvariantViolation, StreamModel, plan_replicates, pooled_conditional_run

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INSUFFICIENT = 3
EXIT_BUDGET = 4
EXIT_INVARIANT = 5

DEFAULT_N_GRID = ",".join(str(1 << e) for e in range(10, 21))

# not part of the data contract, so kept out of the manifest
_NON_DATA_ARGS = {"out", "diagnostics", "func", "command"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# report assembly


def _manifest(command: str, args: argparse.Namespace, duration: float, budget: Optional[float]) -> dict:
    argd = {k: v for k, v in sorted(vars(args).items()) if k not in _NON_DATA_ARGS}
    return {
        "command": command,
        "args": argd,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "duration_s": round(duration, 3),
        "truncation_budget": budget,
    }


def _report(manifest: dict, d: int, pmf: Sequence[float], se: Sequence[float], tv_bound: Optional[float], stats: dict) -> dict:
    return {
        "manifest": manifest,
        "d": d,
        "pmf": [float(x) for x in pmf],
        "se": [float(x) for x in se],
        "tv_truncation_bound": tv_bound,
        "stats": stats,
    }


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(report["manifest"]) + "\n")
    buf.write("# d: %d\n" % report["d"])
    buf.write("# tv_truncation_bound: " + json.dumps(report["tv_truncation_bound"]) + "\n")
    buf.write("# stats: " + json.dumps(report["stats"]) + "\n")
    buf.write("k,pmf,se\n")
    for k, (p, s) in enumerate(zip(report["pmf"], report["se"])):
        buf.write(f"{k},{p!r},{s!r}\n")
    return buf.getvalue()


def data_section(text: str, fmt: str) -> str:
    """The output with the manifest removed; equal for equal arguments."""
    if fmt == "json":
        obj = json.loads(text)
        obj.pop("manifest", None)
        return json.dumps(obj, indent=2)
    return "".join(line for line in text.splitlines(True) if not line.startswith("# manifest:"))


def _law_stats(law: EmpiricalLaw) -> dict:
    return {
        "trials": law.trials,
        "counts": law.counts,
        "mean": law.mean(),
        "mean_se": law.mean_se(),
    }


# ---------------------------------------------------------------------------
# commands


def cmd_stream(args: argparse.Namespace) -> dict:
    if args.d < 1:
        raise UsageError("--d must be >= 1")
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    if args.replicates < 1:
        raise UsageError("--replicates must be >= 1")
    if not args.window_factor > 1:
        raise UsageError("--window-factor must be > 1")
    t0 = time.perf_counter()
    run = pooled_conditional_run(
        args.d, args.n, args.window_factor, args.replicates, args.model, args.seed, args.engine
    )
    if not run.conservation_ok:
        raise InvariantViolation(
            f"R_n={run.records_total} != r_n={run.remaining} + kills={run.total_kills}"
        )
    law = run.law
    stats = _law_stats(law)
    stats.update(
        model=args.model,
        window=law.meta["window"],
        replicates=run.replicates,
        records_total=run.records_total,
        remaining=run.remaining,
        total_kills=run.total_kills,
        conservation_ok=True,
    )
    man = _manifest("stream", args, time.perf_counter() - t0, None)
    return _report(man, args.d, law.pmf, law.se, None, stats)


def cmd_limit(args: argparse.Namespace) -> dict:
    if args.d < 1:
        raise UsageError("--d must be >= 1")
    delta = default_delta(args.d) if args.delta is None else args.delta
    if not (delta > 0 and math.isfinite(delta)):
        raise UsageError("--delta must be a positive finite number")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    cfg = LimitConfig(args.d, delta, args.seed, args.samples)
    t0 = time.perf_counter()
    ks, samples = draw_limit_samples(cfg, args.method, budget=args.budget, keep_samples=bool(args.diagnostics))
    if args.diagnostics:
        with open(args.diagnostics, "w") as fh:
            for s in samples:
                fh.write(json.dumps(s.as_record()) + "\n")
    law = EmpiricalLaw.from_samples(ks)
    bound = tv_truncation_bound(args.d, delta)
    stats = _law_stats(law)
    stats.update(delta=delta, method=args.method)
    man = _manifest("limit", args, time.perf_counter() - t0, bound)
    return _report(man, args.d, law.pmf, law.se, bound, stats)


def cmd_report(args: argparse.Namespace) -> dict:
    if args.d < 1:
        raise UsageError("--d must be >= 1")
    if args.kmax < 0 or args.rmax < 1:
        raise UsageError("--kmax must be >= 0 and --rmax >= 1")
    t0 = time.perf_counter()
    stats = report_tables(args.d, args.kmax, args.rmax)
    pmf: List[float] = []
    if args.d == 2:
        pmf = [d2_exact_pmf(k) for k in range(args.kmax + 1)]
    elif args.d == 1:
        pmf = [0.0, 1.0]
    man = _manifest("report", args, time.perf_counter() - t0, None)
    return _report(man, args.d, pmf, [0.0] * len(pmf), None, stats)


def _parse_grid(text: str) -> List[int]:
    try:
        grid = [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--n-grid must be a comma list of integers, got {text!r}") from None
    if not grid or min(grid) < 2:
        raise UsageError("--n-grid entries must be >= 2")
    return grid


def compare_laws(limit_law: EmpiricalLaw, stream_law: EmpiricalLaw, bound: float) -> dict:
    tv = tv_distance(stream_law.pmf, limit_law.pmf)
    cse = tv_noise_scale(stream_law, limit_law)
    return {"tv": tv, "combined_se": cse, "budget": cse + bound}


def cmd_compare(args: argparse.Namespace) -> dict:
    if args.d < 1:
        raise UsageError("--d must be >= 1")
    grid = _parse_grid(args.n_grid)
    delta = default_delta(args.d) if args.delta is None else args.delta
    if not (delta > 0 and math.isfinite(delta)):
        raise UsageError("--delta must be a positive finite number")
    if args.samples < 1 or args.events < 1:
        raise UsageError("--samples and --events must be >= 1")
    if not args.window_factor > 1:
        raise UsageError("--window-factor must be > 1")
    t0 = time.perf_counter()
    bound = tv_truncation_bound(args.d, delta)
    limit_law = estimate_limit_law(LimitConfig(args.d, delta, args.seed, args.samples), args.method)
    rows = []
    for i, n in enumerate(grid):
        reps = plan_replicates(args.d, n, args.window_factor, args.events)
        # stream seeds are offset from the limit seed so the two never share streams
        run = pooled_conditional_run(args.d, n, args.window_factor, reps, args.model, args.seed + 1 + i)
        if not run.conservation_ok:
            raise InvariantViolation(f"conservation failed at n={n}")
        row = {"n": n, "replicates": reps, "trials": run.law.trials, "mean": run.law.mean()}
        row.update(compare_laws(limit_law, run.law, bound))
        row["pmf"] = run.law.pmf.tolist()
        rows.append(row)
    stats = {
        "limit": _law_stats(limit_law) | {"delta": delta, "method": args.method},
        "window_factor": args.window_factor,
        "rows": rows,
        "tv_sequence": [r["tv"] for r in rows],
    }
    man = _manifest("compare", args, time.perf_counter() - t0, bound)
    return _report(man, args.d, limit_law.pmf, limit_law.se, bound, stats)


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="master seed (non-negative)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pareto-records",
        description="Kill counts of multivariate Pareto records: stream simulation, limit law sampling, bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stream", help="pooled kill-count law from simulated streams")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="start of the pooling window")
    p.add_argument("--model", choices=[m.value for m in StreamModel], default=StreamModel.EXP_MAX.value)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--window-factor", type=float, default=2.0)
    p.add_argument("--engine", choices=("auto", "scan", "skip"), default="auto")
    _common(p)
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("limit", help="sample the truncated limit law")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--delta", type=float, default=None, help="truncation distance (default depends on d)")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--method", choices=METHODS, default="box")
    p.add_argument("--budget", type=float, default=DEFAULT_BUDGET, help="max expected points per region")
    p.add_argument("--diagnostics", default=None, help="write per-draw JSON lines to this path")
    _common(p)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("report", help="closed forms and bounds")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--rmax", type=int, default=6)
    _common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("compare", help="TV distance from stream laws to the limit law over an n grid")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-grid", default=DEFAULT_N_GRID)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--samples", type=int, default=200_000, help="limit-law draws")
    p.add_argument("--events", type=int, default=40_000, help="target pooled record events per n")
    p.add_argument("--window-factor", type=float, default=2.0)
    p.add_argument("--model", choices=[m.value for m in StreamModel], default=StreamModel.EXP_MAX.value)
    p.add_argument("--method", choices=METHODS, default="box")
    _common(p)
    p.set_defaults(func=cmd_compare)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, Optional[dict], str]:
    """Parse and execute; returns (exit code, report or None, rendered text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0), None, ""
    if args.seed < 0:
        parser.print_usage(sys.stderr)
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_USAGE, None, ""
    try:
        report = args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE, None, ""
    except InsufficientEventsError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INSUFFICIENT, None, ""
    except CandidateBudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET, None, ""
    except InvariantViolation as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INVARIANT, None, ""
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK, report, text


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, _, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
