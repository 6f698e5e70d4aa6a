"""Closed-form reference quantities and bounds for the kill-count law K(d).

Bounds are evaluated in log space; the exponentiated values may be +inf for
extreme arguments, never NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

STIRLING_MAX = 30
D2_MOMENT_MAX = 20


class DomainError(ValueError):
    """Argument outside the range where a formula is defined."""


@lru_cache(maxsize=None)
def _stirling_row(r: int) -> Tuple[int, ...]:
    if r == 0:
        return (1,)
    prev = _stirling_row(r - 1) + (0,)
    return tuple((m * prev[m] if m else 0) + (prev[m - 1] if m else 0) for m in range(r + 1))


def stirling2(r: int, m: int) -> int:
    """Number of partitions of an r-set into m non-empty blocks."""
    if not (0 <= r <= STIRLING_MAX and 0 <= m <= STIRLING_MAX):
        raise DomainError(f"stirling2 defined here for 0 <= r, m <= {STIRLING_MAX}")
    if m > r:
        return 0
    return _stirling_row(r)[m]


def d2_exact_pmf(k: int) -> float:
    """P(K(2) = k) = 2^-(k+1): K(2) is Geometric(1/2) on {1, 2, ...} minus one."""
    if k < 0:
        raise DomainError("k must be >= 0")
    return math.ldexp(1.0, -(k + 1))


def d2_exact_tail(k: int) -> float:
    """P(K(2) >= k) = 2^-k."""
    if k < 0:
        raise DomainError("k must be >= 0")
    return math.ldexp(1.0, -k)


def d2_moment(r: int) -> int:
    """E K(2)^r as the sum over m of m! S(r, m) (the ordered Bell numbers)."""
    if not 1 <= r <= D2_MOMENT_MAX:
        raise DomainError(f"d2_moment defined here for 1 <= r <= {D2_MOMENT_MAX}")
    return sum(math.factorial(m) * stirling2(r, m) for m in range(1, r + 1))


def d2_moment_by_summation(r: int, tol: float = 1e-15) -> float:
    """Sum of k^r 2^-(k+1) over k, continued until the terms are negligible."""
    total = 0.0
    k = 0
    while True:
        term = k**r * math.ldexp(1.0, -(k + 1))
        total += term
        if k > r and term < tol * total:
            return total
        k += 1


def _require_d2(d: int) -> None:
    if d < 2:
        raise DomainError("defined for d >= 2 only (the exponent involves 1/(d-1))")


def log_a_d(d: int) -> float:
    _require_d2(d)
    return math.log(2.0) / d + (d + 1) / (d - 1) * math.log(d)


def a_d(d: int) -> float:
    """The constant 2^(1/d) d^((d+1)/(d-1))."""
    return math.exp(log_a_d(d))


def moment_exponent(d: int) -> float:
    _require_d2(d)
    return d + 1 - 1.0 / (d - 1)


def log_moment_upper_bound(d: int, r: int) -> float:
    if r < 1:
        raise DomainError("r must be >= 1")
    return r * log_a_d(d) + moment_exponent(d) * r * math.log(r)


def moment_upper_bound(d: int, r: int) -> float:
    """a_d^r r^((d + 1 - 1/(d-1)) r), an upper bound on E K(d)^r."""
    return _safe_exp(log_moment_upper_bound(d, r))


def log_brightwell_bound(d: int, m: int) -> float:
    if m < 1:
        raise DomainError("m must be >= 1")
    return m * log_a_d(d) - m * math.log(m) / (d - 1)


def brightwell_bound(d: int, m: int) -> float:
    """a_d^m m^(-m/(d-1)), an upper bound on P(r_m = m). May exceed 1."""
    return _safe_exp(log_brightwell_bound(d, m))


def gamma_tail(d: int, delta: float) -> float:
    """P(Gamma(d, 1) > delta) = e^-delta * sum_{j<d} delta^j / j!."""
    if d < 1:
        raise DomainError("d must be >= 1")
    if delta < 0:
        raise DomainError("delta must be >= 0")
    if delta == 0:
        return 1.0
    log_d = math.log(delta)
    return math.fsum(math.exp(j * log_d - delta - math.lgamma(j + 1)) for j in range(d))


def gumbel_cdf(g: float) -> float:
    return math.exp(-math.exp(-g)) if g > -700 else 0.0


def gumbel_pdf(g: float) -> float:
    if g < -700:
        return 0.0
    t = math.exp(-g)
    return t * math.exp(-t)


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


# ---------------------------------------------------------------------------
# P(K(d) >= 1) as d grows


def pk1_lower(d: int) -> float:
    if d < 1:
        raise DomainError("d must be >= 1")
    return 4.0**-d


def pk1_lower_curve(d: int, c: float) -> float:
    """((e^c - 1) / e^(2c))^d; maximized at c = ln 2, where it equals 4^-d."""
    if c <= 0:
        raise DomainError("c must be > 0")
    return math.exp(d * (math.log(math.expm1(c)) - 2 * c))


def pk1_upper_expression(d: int, c: float) -> float:
    """(1 + 1/c) [c^(d-2) / Gamma(c+1)]^(-1/(c+1)).

    Valid only up to a (1 + o(1)) factor as d -> infinity; not a finite-d bound.
    """
    return math.exp(log_pk1_upper_expression(d, c))


def log_pk1_upper_expression(d: int, c: float) -> float:
    if c <= 0:
        raise DomainError("c must be > 0")
    log_inner = (d - 2) * math.log(c) - math.lgamma(c + 1)
    return math.log1p(1 / c) - log_inner / (c + 1)


DEFAULT_C_GRID = tuple(np.round(np.arange(0.25, 8.0001, 0.01), 4).tolist())


@dataclass
class Pk1Bounds:
    d: int
    lower: float
    upper_curve: Dict[float, float]
    upper_min: float
    upper_argmin: float
    asymptotic_only: bool = True

    def lower_curve(self, c: float) -> float:
        return pk1_lower_curve(self.d, c)


def pk1_bounds(d: int, c_grid: Sequence[float] = DEFAULT_C_GRID) -> Pk1Bounds:
    curve = {float(c): pk1_upper_expression(d, c) for c in c_grid}
    c_best = min(curve, key=curve.__getitem__)
    return Pk1Bounds(d, pk1_lower(d), curve, curve[c_best], c_best)


# ---------------------------------------------------------------------------
# tail bounds for fixed d


def tail_lower_constant(d: int) -> float:
    """c = e/(e-1) * (d-1)!, the constant in the lower tail curve."""
    return math.e / (math.e - 1) * math.factorial(d - 1)


def tail_upper_exponent(d: int) -> float:
    """Power of k in the upper tail exponent: (d-1)/(d^2-2)."""
    _require_d2(d)
    return (d - 1) / (d * d - 2)


def tail_lower_curve(d: int, k: float) -> float:
    """exp[-(c k)^(1/(d-1))], the lower tail curve with its (1+o(1)) dropped."""
    _require_d2(d)
    return math.exp(-((tail_lower_constant(d) * k) ** (1.0 / (d - 1))))


def tail_upper_curve(d: int, k: float) -> Tuple[float, int]:
    """min over integer r >= 1 of k^-r * moment_upper_bound(d, r), clamped to 1.

    A valid bound on P(K(d) >= k) at every k > 0 (Markov). Returns the value
    and the minimizing r.
    """
    lv, r = log_tail_upper_curve(d, k)
    return math.exp(lv), r


def log_tail_upper_curve(d: int, k: float) -> Tuple[float, int]:
    """Log of ``tail_upper_curve``; the log objective is convex in r, so the
    integer minimizer sits next to the continuous one."""
    _require_d2(d)
    if k <= 0:
        raise DomainError("k must be > 0")
    e = moment_exponent(d)
    la = log_a_d(d)
    lk = math.log(k)

    def f(r: int) -> float:
        return -r * lk + r * la + e * r * math.log(r)

    r_star = math.exp((lk - la) / e - 1.0)
    cands = {1, max(1, math.floor(r_star)), max(1, math.ceil(r_star))}
    r_best = min(cands, key=f)
    return min(0.0, f(r_best)), r_best


def tail_bound_curves(d: int, k: float) -> Tuple[float, float]:
    return tail_lower_curve(d, k), tail_upper_curve(d, k)[0]


@dataclass
class BoundReport:
    d: int
    a_d: Optional[float]
    pk1_lower: float
    pk1_upper_curve: Dict[float, float]
    tail_lower: Optional[Callable[[float], float]] = field(default=None, repr=False)
    tail_upper: Optional[Callable[[float], float]] = field(default=None, repr=False)


def bound_report(d: int) -> BoundReport:
    pk = pk1_bounds(d)
    if d < 2:
        return BoundReport(d, None, pk.lower, pk.upper_curve)
    return BoundReport(
        d,
        a_d(d),
        pk.lower,
        pk.upper_curve,
        tail_lower=lambda k: tail_lower_curve(d, k),
        tail_upper=lambda k: tail_upper_curve(d, k)[0],
    )


def report_tables(d: int, kmax: int = 10, rmax: int = 6) -> dict:
    """Plain-data summary of every evaluator at dimension d."""
    pk = pk1_bounds(d)
    out: dict = {
        "a_d": None,
        "pk1_lower": pk.lower,
        "pk1_lower_curve_at_ln2": pk1_lower_curve(d, math.log(2)),
        "pk1_upper_asymptotic": {
            "min": pk.upper_min,
            "argmin_c": pk.upper_argmin,
            "asymptotic_only": True,
        },
        "gamma_tail": {str(D): gamma_tail(d, D) for D in (1, 2, 4, 6, 7, 8, 10, 12)},
    }
    if d == 2:
        out["d2_exact"] = {
            "pmf": [d2_exact_pmf(k) for k in range(kmax + 1)],
            "tail": [d2_exact_tail(k) for k in range(kmax + 1)],
            "moments": {str(r): d2_moment(r) for r in range(1, min(rmax, D2_MOMENT_MAX) + 1)},
            "pk1_exact": 1.0 - d2_exact_pmf(0),
        }
    if d < 2:
        unavailable = "unavailable: requires d >= 2"
        out["moment_upper_bound"] = unavailable
        out["brightwell_bound"] = unavailable
        out["tail_bounds"] = unavailable
        return out
    out["a_d"] = a_d(d)
    out["moment_upper_bound"] = {str(r): moment_upper_bound(d, r) for r in range(1, rmax + 1)}
    out["brightwell_bound"] = {str(m): brightwell_bound(d, m) for m in range(1, 21)}
    rows: List[dict] = []
    for k in range(1, kmax + 1):
        up, r = tail_upper_curve(d, k)
        rows.append({"k": k, "lower_asymptotic": tail_lower_curve(d, k), "upper": up, "upper_r": r})
    out["tail_bounds"] = {
        "lower_constant_c": tail_lower_constant(d),
        "upper_exponent": tail_upper_exponent(d),
        "rows": rows,
        "lower_asymptotic_only": True,
    }
    return out
