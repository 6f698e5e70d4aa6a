"""Independent reference implementations used by the tests.

Nothing here imports the package. Each oracle takes the most direct route
(enumeration, quadrature, brute force) even when that is slow.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import List, Sequence

from scipy import integrate, special


def set_partitions(items: Sequence[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def stirling2_enum(r: int, m: int) -> int:
    return sum(1 for p in set_partitions(list(range(r))) if len(p) == m)


def below(a: Sequence[float], b: Sequence[float]) -> bool:
    return all(x < y for x, y in zip(a, b))


def maxima_brute(points: Sequence[Sequence[float]]) -> List[int]:
    return [i for i, p in enumerate(points) if not any(below(p, q) for q in points)]


def rank_configs(n: int, d: int):
    """All d-tuples of permutations of range(n): the equally likely rank patterns."""
    perms = list(itertools.permutations(range(n)))
    for combo in itertools.product(perms, repeat=d):
        yield [tuple(c[i] for c in combo) for i in range(n)]


def record_prob_enum(d: int, n: int) -> Fraction:
    """P(n-th of n i.i.d. continuous points is not below an earlier one)."""
    hits = total = 0
    for pts in rank_configs(n, d):
        total += 1
        hits += not any(below(pts[-1], q) for q in pts[:-1])
    return Fraction(hits, total)


def all_incomparable_enum(d: int, m: int) -> Fraction:
    hits = total = 0
    for pts in rank_configs(m, d):
        total += 1
        hits += not any(below(p, q) or below(q, p) for p, q in itertools.combinations(pts, 2))
    return Fraction(hits, total)


def gamma_tail_quad(d: int, delta: float) -> float:
    val, _ = integrate.quad(lambda t: t ** (d - 1) * math.exp(-t) / math.factorial(d - 1), delta, math.inf)
    return val


def gamma_tail_scipy(d: int, delta: float) -> float:
    return float(special.gammaincc(d, delta))


def candidate_mass_quad(d: int, delta: float) -> float:
    val, _ = integrate.quad(lambda e: e ** (d - 1) / math.factorial(d - 1) * math.exp(e), 0, delta)
    return val


def gumbel_pdf_ref(g: float) -> float:
    return math.exp(-g - math.exp(-g))


def d2_pmf_ref(k: int) -> float:
    # Geometric(1/2) on {1, 2, ...} shifted down by one
    return 0.5 ** k * 0.5


def ordered_bell(r: int) -> int:
    """Number of weak orderings of an r-set: a(r) = sum_k C(r,k) a(r-k)."""
    a = [1]
    for n in range(1, r + 1):
        a.append(sum(math.comb(n, k) * a[n - k] for k in range(1, n + 1)))
    return a[r]


def d1_limit_pk1(delta: float) -> float:
    """P(K(D-) = 1) in d = 1 by quadrature of the Gumbel mixture."""
    c = math.expm1(delta)
    val, _ = integrate.quad(lambda g: gumbel_pdf_ref(g) * -math.expm1(-math.exp(-g) * c), -10, 40, limit=200)
    return val


def exact_record_rate(d: int, n: int) -> float:
    """E M_n(d) / n, with E M_n(d) = sum over k <= n of E M_k(d-1) / k."""
    m = [Fraction(1)] * (n + 1)
    for _ in range(d - 1):
        acc = Fraction(0)
        nxt = [Fraction(0)] * (n + 1)
        for k in range(1, n + 1):
            acc += m[k] / k
            nxt[k] = acc
        m = nxt
    return float(m[n] / n)
