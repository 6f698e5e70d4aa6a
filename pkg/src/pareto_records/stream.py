"""Finite-n record streams and estimators of the conditional kill-count law.

Two generating models share one record-large code path:

* ``exp-max``: i.i.d. Exponential(1) coordinates, records are large.
* ``unif-min``: i.i.d. Uniform(0,1) coordinates, records are small; the
  frontier stores the negated point so that small maps to large.

Two engines feed a ``Frontier``:

* ``scan`` draws every observation (in numpy chunks). Points strictly below a
  member of the frontier as it stood at the start of the chunk can never be
  records, so they are dropped in bulk; the rest go through
  ``Frontier.insert`` in arrival order.
* ``skip`` (d <= 2) works in survival coordinates s, where s = exp(-y) for
  exp-max and s = u for unif-min. There every observation is uniform on the
  unit cube and sets a record iff it is not above (in s) a current record.
  The non-dominated area A of the staircase is exact, so the wait until the
  next record is Geometric(A) and the record itself is uniform on the
  non-dominated region. Non-records are skipped without being drawn.
"""

from __future__ import annotations

import bisect
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .frontier import Frontier
from .law import EmpiricalLaw, InsufficientEventsError
from .rng import child_generator, ordered_map

ENGINES = ("auto", "scan", "skip")
REPLICATE_GROUP = 64


class StreamModel(str, Enum):
    EXP_MAX = "exp-max"
    UNIF_MIN = "unif-min"


class InvariantViolation(RuntimeError):
    pass


@dataclass
class StreamStats:
    d: int
    model: StreamModel
    n: int
    records_total: int = 0
    remaining: int = 0
    # every record event over the whole stream
    kill_histogram: Dict[int, int] = field(default_factory=dict)
    # record events with index in [window[0], window[1]]
    window: Tuple[int, int] = (1, 0)
    window_histogram: Dict[int, int] = field(default_factory=dict)
    engine: str = "scan"

    @property
    def total_kills(self) -> int:
        return sum(k * c for k, c in self.kill_histogram.items())

    @property
    def window_events(self) -> int:
        return sum(self.window_histogram.values())

    def conservation_ok(self) -> bool:
        return (
            self.records_total == self.remaining + self.total_kills
            and sum(self.kill_histogram.values()) <= self.records_total
        )

    def check_conservation(self) -> None:
        if not self.conservation_ok():
            raise InvariantViolation(
                f"R_n={self.records_total} != r_n={self.remaining} + kills={self.total_kills}"
            )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "records_total": self.records_total,
            "remaining": self.remaining,
            "total_kills": self.total_kills,
            "kill_histogram": {str(k): v for k, v in sorted(self.kill_histogram.items())},
            "window": list(self.window),
            "window_histogram": {str(k): v for k, v in sorted(self.window_histogram.items())},
        }


def _chunk(t: int) -> int:
    return int(min(1 << 16, max(256, t // 4)))


def _draw(model: StreamModel, rng: np.random.Generator, c: int, d: int) -> np.ndarray:
    if model is StreamModel.EXP_MAX:
        return rng.standard_exponential((c, d))
    return -rng.random((c, d))


class _Tally:
    def __init__(self, window: Tuple[int, int]):
        self.lo, self.hi = window
        self.all: Counter = Counter()
        self.win: Counter = Counter()

    def add(self, t: int, k: int) -> None:
        self.all[k] += 1
        if self.lo <= t <= self.hi:
            self.win[k] += 1


def _run_scan(d: int, n: int, model: StreamModel, rng: np.random.Generator, tally: _Tally) -> Frontier:
    front = Frontier.for_dim(d)
    t = 0
    while t < n:
        c = min(_chunk(t), n - t)
        pts = _draw(model, rng, c, d)
        cand = np.arange(c)
        for f in front.as_array():
            cand = cand[~np.all(pts[cand] < f, axis=1)]
            if cand.size == 0:
                break
        for i in cand.tolist():
            out = front.insert(pts[i])
            if out.is_record:
                tally.add(t + i + 1, out.kills)
        t += c
    return front


def _to_frontier(model: StreamModel, s: np.ndarray) -> np.ndarray:
    # both maps are decreasing, so s-minima become frontier maxima
    if model is StreamModel.EXP_MAX:
        return -np.log(s)
    return -s


def _run_skip(d: int, n: int, model: StreamModel, rng: np.random.Generator, tally: _Tally) -> Frontier:
    if d > 2:
        raise ValueError("the skip engine supports d <= 2")
    front = Frontier.for_dim(d)
    tiny = np.finfo(float).tiny
    to_front = (lambda v: -math.log(v)) if model is StreamModel.EXP_MAX else (lambda v: -v)
    # current records in s-space; for d == 2 sorted by a ascending, b descending
    a: List[float] = []
    b: List[float] = []
    t = 0
    while True:
        if t == 0:
            area = 1.0
        elif d == 1:
            area = a[0]
        else:
            area = a[0] + math.fsum((a2 - a1) * h for a1, a2, h in zip(a, a[1:] + [1.0], b))
        t += int(rng.geometric(area)) if area < 1.0 else 1
        if t > n:
            break
        if d == 1:
            s = [max(rng.random() * area, tiny)]
        else:
            # strips [0, a_0) x [0, 1) and [a_i, a_(i+1)) x [0, b_i)
            lefts = [0.0] + a
            rights = a + [1.0]
            heights = [1.0] + b
            w = [(r - l) * h for l, r, h in zip(lefts, rights, heights)]
            u = rng.random() * math.fsum(w)
            j = 0
            acc = w[0]
            while u >= acc and j < len(w) - 1:
                j += 1
                acc += w[j]
            s = [
                max(lefts[j] + rng.random() * (rights[j] - lefts[j]), tiny),
                max(rng.random() * heights[j], tiny),
            ]
        out = front.insert([to_front(v) for v in s])
        if not out.is_record:
            # boundary ties in floating point; cannot occur in exact arithmetic
            continue
        tally.add(t, out.kills)
        if d == 1:
            a = s
        else:
            keep = [i for i in range(len(a)) if not (s[0] < a[i] and s[1] < b[i])]
            a = [a[i] for i in keep]
            b = [b[i] for i in keep]
            pos = bisect.bisect_left(a, s[0])
            a.insert(pos, s[0])
            b.insert(pos, s[1])
    return front


def run_stream(
    d: int,
    n: int,
    model: StreamModel | str = StreamModel.EXP_MAX,
    seed: int = 0,
    window: Optional[Tuple[int, int]] = None,
    engine: str = "auto",
    rng: Optional[np.random.Generator] = None,
) -> StreamStats:
    """Feed n i.i.d. observations through a frontier and tally record events.

    ``window`` selects the observation indices (1-based, inclusive) whose
    record events are also pooled separately; it defaults to the whole stream.
    """
    if d < 1 or n < 1:
        raise ValueError("d and n must be >= 1")
    model = StreamModel(model)
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "auto":
        engine = "skip" if d <= 2 else "scan"
    window = (1, n) if window is None else window
    rng = child_generator(seed) if rng is None else rng
    tally = _Tally(window)
    runner = _run_skip if engine == "skip" else _run_scan
    front = runner(d, n, model, rng, tally)
    stats = StreamStats(
        d,
        model,
        n,
        records_total=sum(tally.all.values()),
        remaining=len(front),
        kill_histogram=dict(tally.all),
        window=window,
        window_histogram=dict(tally.win),
        engine=engine,
    )
    stats.check_conservation()
    return stats


def run_points(
    points,
    model: StreamModel | str = StreamModel.EXP_MAX,
    window: Optional[Tuple[int, int]] = None,
) -> StreamStats:
    """Like ``run_stream`` but on given observations (rows, in arrival order)."""
    model = StreamModel(model)
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a non-empty (n, d) array")
    n, d = pts.shape
    if model is StreamModel.UNIF_MIN:
        pts = -pts
    window = (1, n) if window is None else window
    tally = _Tally(window)
    front = Frontier.for_dim(d)
    for t, p in enumerate(pts, start=1):
        out = front.insert(p)
        if out.is_record:
            tally.add(t, out.kills)
    stats = StreamStats(
        d, model, n, sum(tally.all.values()), len(front), dict(tally.all), window, dict(tally.win), "given"
    )
    stats.check_conservation()
    return stats


def window_bounds(n_target: int, window_factor: float) -> Tuple[int, int]:
    return n_target, int(math.ceil(n_target * window_factor))


def _replicate_group(args: tuple) -> Tuple[Counter, int, int, int]:
    d, n_target, wf, model, seed, start, count, engine = args
    lo, hi = window_bounds(n_target, wf)
    hist: Counter = Counter()
    records = remaining = kills = 0
    for r in range(start, start + count):
        st = run_stream(d, hi, model, window=(lo, hi), engine=engine, rng=child_generator(seed, r))
        hist.update(st.window_histogram)
        records += st.records_total
        remaining += st.remaining
        kills += st.total_kills
    return hist, records, remaining, kills


@dataclass
class PooledRun:
    law: EmpiricalLaw
    histogram: Dict[int, int]
    replicates: int
    records_total: int
    remaining: int
    total_kills: int

    @property
    def conservation_ok(self) -> bool:
        return self.records_total == self.remaining + self.total_kills


def pooled_conditional_run(
    d: int,
    n_target: int,
    window_factor: float = 2.0,
    replicates: int = 100,
    model: StreamModel | str = StreamModel.EXP_MAX,
    seed: int = 0,
    engine: str = "auto",
    workers: Optional[int] = None,
) -> PooledRun:
    """Run the replicate streams and pool their window record events."""
    if n_target < 2:
        raise ValueError("n_target must be >= 2")
    if not window_factor > 1:
        raise ValueError("window_factor must be > 1")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    model = StreamModel(model)
    jobs = [
        (d, n_target, window_factor, model, seed, s, min(REPLICATE_GROUP, replicates - s), engine)
        for s in range(0, replicates, REPLICATE_GROUP)
    ]
    hist: Counter = Counter()
    records = remaining = kills = 0
    for h, rec, rem, kil in ordered_map(_replicate_group, jobs, workers):
        hist.update(h)
        records += rec
        remaining += rem
        kills += kil
    trials = sum(hist.values())
    if trials == 0:
        raise InsufficientEventsError(0)
    lo, hi = window_bounds(n_target, window_factor)
    law = EmpiricalLaw.from_histogram(
        dict(hist), trials, d=d, model=model.value, window=[lo, hi], seed=seed, replicates=replicates
    )
    return PooledRun(law, dict(sorted(hist.items())), replicates, records, remaining, kills)


def estimate_conditional_law(
    d: int,
    n_target: int,
    window_factor: float = 2.0,
    replicates: int = 100,
    model: StreamModel | str = StreamModel.EXP_MAX,
    seed: int = 0,
    engine: str = "auto",
    workers: Optional[int] = None,
) -> EmpiricalLaw:
    """Kill-count pmf among record events with index in [n, ceil(w n)], pooled over replicates."""
    return pooled_conditional_run(d, n_target, window_factor, replicates, model, seed, engine, workers).law


# ---------------------------------------------------------------------------
# record rates


def expected_maxima(d: int, n: int) -> np.ndarray:
    """E M_t(d) for t = 1..n, the expected number of maxima of t points.

    Uses E M_t(d) = sum_{k<=t} E M_k(d-1) / k with E M_t(1) = 1.
    """
    if d < 1 or n < 1:
        raise ValueError("d and n must be >= 1")
    m = np.ones(n)
    k = np.arange(1, n + 1, dtype=float)
    for _ in range(d - 1):
        m = np.cumsum(m / k)
    return m


def record_probability_exact(d: int, n: int) -> float:
    """P(the n-th observation sets a record) = E M_n(d) / n."""
    return float(expected_maxima(d, n)[-1] / n)


def record_rate_asymptotic(d: int, n: int) -> float:
    """(ln n)^(d-1) / ((d-1)! n), the leading-order record rate."""
    return math.log(n) ** (d - 1) / (math.factorial(d - 1) * n)


def expected_window_events(d: int, n_target: int, window_factor: float) -> float:
    lo, hi = window_bounds(n_target, window_factor)
    p = expected_maxima(d, hi) / np.arange(1, hi + 1)
    return float(p[lo - 1 : hi].sum())


def plan_replicates(d: int, n_target: int, window_factor: float, target_events: int) -> int:
    """Replicates needed for about ``target_events`` pooled window events."""
    return max(1, math.ceil(target_events / expected_window_events(d, n_target, window_factor)))


@dataclass(frozen=True)
class Estimate:
    value: float
    se: float
    trials: int

    def to_dict(self) -> dict:
        return {"value": self.value, "se": self.se, "trials": self.trials}


def _binomial(hits: int, trials: int) -> Estimate:
    p = hits / trials
    return Estimate(p, math.sqrt(p * (1 - p) / trials), trials)


def _batches(trials: int, per_trial: int, cap: int = 1 << 22):
    size = max(1, cap // max(per_trial, 1))
    for start in range(0, trials, size):
        yield min(size, trials - start)


def estimate_record_rate(d: int, n: int, trials: int, seed: int = 0) -> Estimate:
    """Fraction of trials whose n-th observation is not below any earlier one."""
    if d < 1 or n < 1 or trials < 1:
        raise ValueError("d, n and trials must be >= 1")
    rng = child_generator(seed)
    hits = 0
    for c in _batches(trials, n * d):
        x = rng.random((c, n, d))
        below = np.all(x[:, -1:, :] < x[:, :-1, :], axis=2)
        hits += int(np.count_nonzero(~below.any(axis=1)))
    return _binomial(hits, trials)


def estimate_all_records_prob(d: int, m: int, trials: int, seed: int = 0) -> Estimate:
    """Fraction of trials in which m observations are mutually incomparable."""
    if d < 1 or m < 1 or trials < 1:
        raise ValueError("d, m and trials must be >= 1")
    rng = child_generator(seed)
    hits = 0
    iu, ju = np.triu_indices(m, 1)
    for c in _batches(trials, m * m * d):
        x = rng.random((c, m, d))
        lt = np.all(x[:, iu, :] < x[:, ju, :], axis=2) | np.all(x[:, ju, :] < x[:, iu, :], axis=2)
        hits += int(np.count_nonzero(~lt.any(axis=1)))
    return _binomial(hits, trials)
