"""Exact sampling of the limiting kill-count law.

Fix a level g and the point x with x_+ = g. Consider a Poisson process on R^d
with intensity 1(z not above x) * exp(-z_+). K_g(D-) counts the maxima of the
whole process that lie strictly below x at l1 distance at most D. Mixing g
over a standard Gumbel gives K(D-), which is within P(Gamma(d) > D) of the
limit law in total variation.

Below-x points are written as y = x - delta with delta > 0 and distance
eta = delta_+. On delta-space the process has intensity exp(-g) * exp(delta_+).

Two exact samplers are provided.

``slab`` generates every process point in the slab {delta > 0, eta <= D},
extracts the maxima, then generates the external points above each maximum
cell by cell and discards killed maxima. Its cost grows like
exp(D - g) * D^(d-1).

``box`` (the default) uses the same process in the coordinates
omega = exp(delta), where the intensity is homogeneous with rate exp(-g). An
external point with exactly one coordinate beyond x kills every candidate
beyond it on that axis. The nearest such point per axis is an exponential
variate, so only candidates inside the resulting box can survive. Killers
with two or more (but not all) coordinates beyond x matter only inside the
bounding box of the surviving candidates. Everything outside these regions is
provably irrelevant, so skipping it keeps the draw exact. The expected cost is
O(exp((d-1) g)), capped by the slab cost.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .analytics import gamma_tail
from .law import EmpiricalLaw
from .rng import blocks, child_generator, ordered_map

DEFAULT_DELTA: Dict[int, float] = {1: 10.0, 2: 10.0, 3: 8.0, 4: 7.0}
DEFAULT_BUDGET = 5e7
BLOCK_SIZE = 2048
METHODS = ("box", "slab")


class CandidateBudgetExceeded(RuntimeError):
    def __init__(self, mass: float, budget: float):
        super().__init__(f"candidate budget exceeded: expected {mass:.4g} points > budget {budget:.4g}")
        self.mass = mass
        self.budget = budget


def default_delta(d: int) -> float:
    return DEFAULT_DELTA.get(d, 6.0)


@dataclass(frozen=True)
class LimitConfig:
    d: int
    delta: float
    seed: int = 0
    samples: int = 10_000

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError("delta must be a positive finite real")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


@dataclass
class LimitSample:
    k: int
    g: float
    n_candidates: int
    n_maximal: int
    n_external: int
    delta: float
    # l1 distances from x of the counted maxima, ascending
    survivor_eta: Tuple[float, ...] = field(default=(), repr=False)

    def as_record(self) -> dict:
        return {
            "k": self.k,
            "g": self.g,
            "n_candidates": self.n_candidates,
            "n_maximal": self.n_maximal,
            "n_external": self.n_external,
        }


def sample_gumbel(rng: np.random.Generator) -> float:
    """Standard Gumbel variate by CDF inversion, -ln(-ln U)."""
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    return -math.log(-math.log(u))


def tv_truncation_bound(d: int, delta: float) -> float:
    """P(Gamma(d, 1) > delta): bounds E K(D+) and the TV gap to the limit."""
    return gamma_tail(d, delta)


def candidate_mass(d: int, delta: float) -> float:
    """Integral over 0 < eta <= delta of eta^(d-1)/(d-1)! * e^eta.

    Mass of the slab {delta > 0, delta_+ <= D} under intensity e^(delta_+);
    summed as a positive series, so no cancellation at small delta.
    """
    if delta <= 0:
        return 0.0
    lg = math.lgamma(d)
    total = 0.0
    j = 0
    log_delta = math.log(delta)
    while True:
        # delta^(d+j) / ((d+j) (d-1)! j!)
        term = math.exp((d + j) * log_delta - math.log(d + j) - lg - math.lgamma(j + 1))
        total += term
        if j > delta and term < 1e-17 * total:
            break
        j += 1
    return total


def _draw_slab_offsets(rng: np.random.Generator, n: int, k: int, cap: float) -> np.ndarray:
    """n i.i.d. offsets with density proportional to e^(delta_+) on the slab."""
    if n == 0:
        return np.empty((0, k))
    out = []
    need = n
    scale = math.expm1(cap)
    while need > 0:
        m = need if k == 1 else int(need * 1.3) + 8
        eta = np.log1p(rng.random(m) * scale)
        if k > 1:
            eta = eta[rng.random(m) < (eta / cap) ** (k - 1)]
        out.append(eta[:need])
        need -= out[-1].size
    eta = np.concatenate(out)
    if k == 1:
        return eta[:, None]
    e = rng.standard_exponential((n, k))
    return eta[:, None] * (e / e.sum(axis=1, keepdims=True))


def _sample_region(
    rng: np.random.Generator,
    rate: float,
    upper: np.ndarray,
    cap: float,
    budget: float,
) -> np.ndarray:
    """Poisson process, intensity rate*e^(delta_+), on {0 < delta < upper, delta_+ <= cap}.

    Proposes from whichever of the bounding box or the bounding slab has the
    smaller mass and thins to the region.
    """
    k = upper.size
    slab_mass = rate * candidate_mass(k, cap)
    if np.all(np.isfinite(upper)):
        log_box = math.log(rate) + float(np.sum(np.log(np.expm1(upper))))
        box_mass = math.exp(log_box) if log_box < 700 else math.inf
    else:
        box_mass = math.inf
    mass = min(box_mass, slab_mass)
    if mass > budget:
        raise CandidateBudgetExceeded(mass, budget)
    n = int(rng.poisson(mass))
    if box_mass <= slab_mass:
        pts = np.log1p(rng.random((n, k)) * np.expm1(upper))
        return pts[pts.sum(axis=1) <= cap]
    pts = _draw_slab_offsets(rng, n, k, cap)
    return pts[np.all(pts < upper, axis=1)]


def _minimal_mask(pts: np.ndarray) -> np.ndarray:
    """Mask of rows not strictly above (coordinate-wise) any other row."""
    n, k = pts.shape
    mask = np.zeros(n, dtype=bool)
    if n == 0:
        return mask
    if k == 1:
        mask[np.argmin(pts[:, 0])] = True
        return mask
    if k == 2:
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        second = pts[order, 1]
        prev_min = np.minimum.accumulate(np.concatenate(([np.inf], second[:-1])))
        mask[order] = second < prev_min
        # a point tied on the first coordinate with a smaller second is not above it
        return _fix_ties_2d(pts, mask)
    # anything below a point has a smaller coordinate sum, so sweep by sum
    order = np.lexsort((pts[:, 0], pts.sum(axis=1)))
    kept = np.empty((0, k))
    for i in order:
        p = pts[i]
        if kept.shape[0] and np.any(np.all(kept < p, axis=1)):
            continue
        mask[i] = True
        kept = np.vstack([kept, p])
    return mask


def _fix_ties_2d(pts: np.ndarray, mask: np.ndarray) -> np.ndarray:
    # continuous draws make first-coordinate ties probability zero; resolve them
    # exactly by the strict rule when they happen
    x = pts[:, 0]
    if np.unique(x).size == x.size:
        return mask
    out = np.ones(len(pts), dtype=bool)
    for i in range(len(pts)):
        out[i] = not np.any(np.all(pts < pts[i], axis=1))
    return out


def _box_draw(
    d: int, g: float, delta: float, rng: np.random.Generator, budget: float
) -> LimitSample:
    rate = math.exp(-g)
    if d >= 2:
        # nearest single-axis external killer on each axis
        upper = np.log1p(rng.standard_exponential(d) * math.exp(g))
    else:
        upper = np.array([math.inf])
    cand = _sample_region(rng, rate, upper, delta, budget)
    if cand.shape[0] == 0:
        return LimitSample(0, g, 0, 0, 0, delta)
    mins = cand[_minimal_mask(cand)]
    alive = np.ones(mins.shape[0], dtype=bool)
    n_ext = 0
    for size in range(2, d):
        for S in itertools.combinations(range(d), size):
            sub = mins[:, S]
            killers = _sample_region(
                rng, rate, sub.max(axis=0), float(sub.sum(axis=1).max()), budget
            )
            n_ext += killers.shape[0]
            if killers.shape[0]:
                hit = np.any(np.all(killers[None, :, :] < sub[:, None, :], axis=2), axis=1)
                alive &= ~hit
    eta = np.sort(mins[alive].sum(axis=1))
    return LimitSample(int(alive.sum()), g, int(cand.shape[0]), int(mins.shape[0]), n_ext, delta, tuple(eta.tolist()))


def _slab_draw(
    d: int,
    g: float,
    delta: float,
    rng: np.random.Generator,
    budget: float,
    x: Optional[Sequence[float]] = None,
) -> LimitSample:
    x = np.full(d, g / d) if x is None else np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise ValueError("x must have d coordinates")
    rate = math.exp(-float(x.sum()))
    mass = rate * candidate_mass(d, delta)
    if mass > budget:
        raise CandidateBudgetExceeded(mass, budget)
    n = int(rng.poisson(mass))
    offs = _draw_slab_offsets(rng, n, d, delta)
    if n == 0:
        return LimitSample(0, g, 0, 0, 0, delta)
    cand = x - offs
    # maxima of the candidates are the minimal offsets
    is_max = _minimal_mask(offs)
    idx = np.flatnonzero(is_max)
    idx = idx[np.argsort(offs[idx].sum(axis=1), kind="stable")]
    maxima = cand[idx]
    m_eta = offs[idx].sum(axis=1)
    killed = np.zeros(idx.size, dtype=bool)
    n_ext = 0
    for i, m in enumerate(maxima):
        ext_mass = math.exp(-float(m.sum()))
        if ext_mass > budget:
            raise CandidateBudgetExceeded(ext_mass, budget)
        c = int(rng.poisson(ext_mass))
        if c == 0:
            continue
        z = m + rng.standard_exponential((c, d))
        keep = ~np.all(z > x, axis=1)
        if i:
            keep &= ~np.any(np.all(z[:, None, :] > maxima[None, :i, :], axis=2), axis=1)
        in_slab = np.all(z < x, axis=1) & ((x - z).sum(axis=1) <= delta)
        keep &= ~in_slab
        z = z[keep]
        n_ext += z.shape[0]
        if z.shape[0]:
            killed |= np.any(np.all(z[:, None, :] > maxima[None, :, :], axis=2), axis=0)
    eta = np.sort(m_eta[~killed])
    return LimitSample(int((~killed).sum()), g, n, int(idx.size), n_ext, delta, tuple(eta.tolist()))


def sample_K_g_truncated(
    d: int,
    g: float,
    delta: float,
    rng: np.random.Generator,
    method: str = "box",
    x: Optional[Sequence[float]] = None,
    budget: float = DEFAULT_BUDGET,
) -> LimitSample:
    """One exact draw of K_g(D-).

    ``x`` (slab method only) moves the reference point off the diagonal; only
    its coordinate sum matters for the law, and ``g`` is then ignored.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if method == "box":
        if x is not None:
            raise ValueError("the box method is location-free; pass x only with method='slab'")
        return _box_draw(d, g, delta, rng, budget)
    if method == "slab":
        if x is not None:
            g = float(np.sum(x))
        return _slab_draw(d, g, delta, rng, budget, x)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def sample_K_truncated(
    cfg: LimitConfig, rng: np.random.Generator, method: str = "box", budget: float = DEFAULT_BUDGET
) -> LimitSample:
    g = sample_gumbel(rng)
    return sample_K_g_truncated(cfg.d, g, cfg.delta, rng, method=method, budget=budget)


def multi_delta_readout(sample: LimitSample, deltas: Sequence[float]) -> List[int]:
    """Counts K_g(D'-) for each D' <= D, read off one D-realization."""
    out = []
    for dp in deltas:
        if dp > sample.delta:
            raise ValueError(f"readout distance {dp} exceeds the realization's delta {sample.delta}")
        out.append(sum(1 for e in sample.survivor_eta if e <= dp))
    return out


def _run_block(args: tuple) -> Tuple[np.ndarray, Optional[list]]:
    d, delta, seed, block, count, method, budget, keep = args
    rng = child_generator(seed, block)
    cfg = LimitConfig(d, delta, seed, count)
    ks = np.empty(count, dtype=np.int64)
    recs = [] if keep else None
    for i in range(count):
        s = sample_K_truncated(cfg, rng, method, budget)
        ks[i] = s.k
        if keep:
            recs.append(s)
    return ks, recs


def draw_limit_samples(
    cfg: LimitConfig,
    method: str = "box",
    workers: Optional[int] = None,
    budget: float = DEFAULT_BUDGET,
    keep_samples: bool = False,
) -> Tuple[np.ndarray, List[LimitSample]]:
    """All ``cfg.samples`` draws, in block order, independent of worker count."""
    jobs = [
        (cfg.d, cfg.delta, cfg.seed, b, n, method, budget, keep_samples)
        for b, n in blocks(cfg.samples, BLOCK_SIZE)
    ]
    results = ordered_map(_run_block, jobs, workers)
    ks = np.concatenate([r[0] for r in results])
    samples: List[LimitSample] = []
    if keep_samples:
        for r in results:
            samples.extend(r[1])
    return ks, samples


def estimate_limit_law(
    cfg: LimitConfig,
    method: str = "box",
    workers: Optional[int] = None,
    budget: float = DEFAULT_BUDGET,
) -> EmpiricalLaw:
    ks, _ = draw_limit_samples(cfg, method, workers, budget)
    return EmpiricalLaw.from_samples(
        ks,
        d=cfg.d,
        model="limit",
        delta=cfg.delta,
        seed=cfg.seed,
        method=method,
        tv_truncation_bound=tv_truncation_bound(cfg.d, cfg.delta),
    )
