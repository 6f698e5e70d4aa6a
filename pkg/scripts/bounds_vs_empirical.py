"""Compare the analytic tail and P(K >= 1) curves with sampled tails.

The lower tail curve and the asymptotic P(K >= 1) upper expression carry
(1+o(1)) factors, so this is a logged comparison, not a test.
"""

from __future__ import annotations

import argparse
import sys

from pareto_records.analytics import pk1_bounds, tail_lower_curve, tail_upper_curve
from pareto_records.limit import LimitConfig, default_delta, estimate_limit_law


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", default="2,3")
    ap.add_argument("--samples", type=int, default=50_000)
    ap.add_argument("--kmax", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)

    for d in (int(x) for x in a.dims.split(",")):
        law = estimate_limit_law(LimitConfig(d, default_delta(d), a.seed, a.samples))
        pk = pk1_bounds(d)
        print(f"d={d}: P(K>=1)={law.tail(1):.4f} lower 4^-d={pk.lower:.4g} "
              f"asymptotic upper min={pk.upper_min:.4g} at c={pk.upper_argmin:.2f}")
        print(f"  {'k':>3} {'empirical':>10} {'lower~':>10} {'upper':>10} {'r*':>3}")
        for k in range(1, a.kmax + 1):
            up, r = tail_upper_curve(d, k)
            print(f"  {k:>3} {law.tail(k):10.5f} {tail_lower_curve(d, k):10.5f} {up:10.4g} {r:>3}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
