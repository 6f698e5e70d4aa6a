"""Stream-pooled law at one n against the limit sampler, for any d.

Prints both pmfs side by side with the TV distance, its noise scale and the
truncation budget. There is no closed form for d >= 3, so this comparison is
the only end-to-end check there.
"""

from __future__ import annotations

import argparse
import sys

from pareto_records.law import tv_distance, tv_noise_scale
from pareto_records.limit import LimitConfig, default_delta, estimate_limit_law, tv_truncation_bound
from pareto_records.stream import StreamModel, plan_replicates, pooled_conditional_run


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--log2n", type=int, default=20)
    ap.add_argument("--window-factor", type=float, default=2.0)
    ap.add_argument("--events", type=int, default=30_000)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--delta", type=float, default=None)
    ap.add_argument("--model", choices=[m.value for m in StreamModel], default="exp-max")
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)

    delta = default_delta(a.d) if a.delta is None else a.delta
    n = 1 << a.log2n
    reps = plan_replicates(a.d, n, a.window_factor, a.events)
    run = pooled_conditional_run(a.d, n, a.window_factor, reps, a.model, a.seed + 1)
    lim = estimate_limit_law(LimitConfig(a.d, delta, a.seed, a.samples))
    s = run.law
    print(f"d={a.d} n=2^{a.log2n} replicates={reps} events={s.trials} delta={delta:g}")
    print(f"{'k':>3} {'stream':>9} {'se':>7} {'limit':>9} {'se':>7}")
    for k in range(max(len(s.counts), len(lim.counts))):
        if max(s.prob(k), lim.prob(k)) < 1e-4:
            continue
        print(f"{k:>3} {s.prob(k):9.5f} {s.se_at(k):7.5f} {lim.prob(k):9.5f} {lim.se_at(k):7.5f}")
    print(f"mean stream={s.mean():.4f}+-{s.mean_se():.4f} limit={lim.mean():.4f}+-{lim.mean_se():.4f}")
    print(f"tv={tv_distance(s.pmf, lim.pmf):.4f} noise={tv_noise_scale(s, lim):.4f} "
          f"truncation={tv_truncation_bound(a.d, delta):.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
