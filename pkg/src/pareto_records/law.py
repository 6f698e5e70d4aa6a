"""Empirical pmfs over kill counts, with binomial standard errors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Sequence

import numpy as np


class InsufficientEventsError(RuntimeError):
    def __init__(self, count: int, what: str = "conditioning events"):
        super().__init__(f"insufficient {what}: {count}")
        self.count = count


@dataclass
class EmpiricalLaw:
    """Counts of each k among ``trials`` conditioning events."""

    counts: List[int]
    trials: int
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.trials <= 0:
            raise InsufficientEventsError(self.trials)
        if sum(self.counts) > self.trials:
            raise ValueError("counts exceed trials")

    @classmethod
    def from_histogram(cls, hist: Mapping[int, int], trials: int | None = None, **meta: Any) -> "EmpiricalLaw":
        if trials is None:
            trials = sum(hist.values())
        if trials <= 0:
            raise InsufficientEventsError(trials)
        kmax = max(hist) if hist else 0
        counts = [int(hist.get(k, 0)) for k in range(kmax + 1)]
        return cls(counts, trials, dict(meta))

    @classmethod
    def from_samples(cls, ks: Sequence[int] | np.ndarray, **meta: Any) -> "EmpiricalLaw":
        ks = np.asarray(ks, dtype=np.int64)
        if ks.size == 0:
            raise InsufficientEventsError(0)
        if ks.min() < 0:
            raise ValueError("kill counts must be non-negative")
        counts = np.bincount(ks).tolist()
        return cls(counts, int(ks.size), dict(meta))

    @property
    def pmf(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.trials

    @property
    def se(self) -> np.ndarray:
        p = self.pmf
        return np.sqrt(p * (1.0 - p) / self.trials)

    def prob(self, k: int) -> float:
        return self.counts[k] / self.trials if 0 <= k < len(self.counts) else 0.0

    def se_at(self, k: int) -> float:
        p = self.prob(k)
        return float(np.sqrt(p * (1 - p) / self.trials))

    def tail(self, k: int) -> float:
        """Empirical P(K >= k)."""
        return sum(self.counts[max(k, 0):]) / self.trials

    def moment(self, r: int) -> float:
        ks = np.arange(len(self.counts), dtype=float)
        return float(np.dot(ks**r, self.counts) / self.trials)

    def moment_se(self, r: int) -> float:
        """Standard error of the r-th sample moment."""
        m = self.moment(r)
        m2 = self.moment(2 * r)
        return float(np.sqrt(max(m2 - m * m, 0.0) / self.trials))

    def mean(self) -> float:
        return self.moment(1)

    def mean_se(self) -> float:
        return self.moment_se(1)

    def merged(self, other: "EmpiricalLaw") -> "EmpiricalLaw":
        n = max(len(self.counts), len(other.counts))
        a = self.counts + [0] * (n - len(self.counts))
        b = other.counts + [0] * (n - len(other.counts))
        return EmpiricalLaw([x + y for x, y in zip(a, b)], self.trials + other.trials, dict(self.meta))


def _pad(a: Sequence[float], n: int) -> np.ndarray:
    out = np.zeros(n)
    out[: len(a)] = a
    return out


def tv_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Half the l1 distance between two pmfs on {0, 1, ...}.

    Mass missing from either vector (e.g. a truncated exact pmf) counts as
    disagreement.
    """
    n = max(len(p), len(q))
    a, b = _pad(p, n), _pad(q, n)
    miss = abs((1.0 - a.sum()) - (1.0 - b.sum()))
    return 0.5 * (float(np.abs(a - b).sum()) + miss)


def tv_noise_scale(a: EmpiricalLaw, b: EmpiricalLaw) -> float:
    """Combined standard-error scale for an empirical TV between two laws.

    Half the sum over k of sqrt(se_a(k)^2 + se_b(k)^2): the expected size of
    half the l1 norm of the estimation noise, up to a factor sqrt(2/pi).
    """
    n = max(len(a.counts), len(b.counts))
    sa, sb = _pad(a.se, n), _pad(b.se, n)
    return 0.5 * float(np.sqrt(sa**2 + sb**2).sum())


def chi_square_two_sample(a: EmpiricalLaw, b: EmpiricalLaw, min_expected: float = 5.0) -> tuple[float, int, float]:
    """Two-sample chi-square homogeneity test on pooled histograms.

    Sparse upper cells are pooled until every expected count reaches
    ``min_expected``. Returns (statistic, degrees of freedom, p-value).
    """
    from scipy import stats

    n = max(len(a.counts), len(b.counts))
    ca = _pad(a.counts, n)
    cb = _pad(b.counts, n)
    # events never recorded as counts (trials - sum) are not expected here
    cells_a: list[float] = []
    cells_b: list[float] = []
    acc_a = acc_b = 0.0
    na, nb = ca.sum(), cb.sum()
    tot = na + nb
    for x, y in zip(ca, cb):
        acc_a += x
        acc_b += y
        pooled = acc_a + acc_b
        if pooled * min(na, nb) / tot >= min_expected:
            cells_a.append(acc_a)
            cells_b.append(acc_b)
            acc_a = acc_b = 0.0
    if acc_a + acc_b > 0:
        if cells_a:
            cells_a[-1] += acc_a
            cells_b[-1] += acc_b
        else:
            cells_a.append(acc_a)
            cells_b.append(acc_b)
    if len(cells_a) < 2:
        return 0.0, 0, 1.0
    table = np.array([cells_a, cells_b])
    stat, pval, dof, _ = stats.chi2_contingency(table, correction=False)
    return float(stat), int(dof), float(pval)
