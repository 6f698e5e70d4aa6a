"""Dominance order and l1 geometry on d-tuples."""

from __future__ import annotations

import math
from typing import Sequence, Tuple

Point = Tuple[float, ...]


class DimensionError(ValueError):
    """Two points (or a point and a structure) disagree on dimension."""


def as_point(coords: Sequence[float]) -> Point:
    """Validate ``coords`` and return them as a tuple of floats."""
    p = tuple(float(c) for c in coords)
    if not p:
        raise ValueError("a point needs at least one coordinate")
    if not all(math.isfinite(c) for c in p):
        raise ValueError(f"non-finite coordinate in {p!r}")
    return p


def _check_dims(a: Sequence[float], b: Sequence[float]) -> None:
    if len(a) != len(b):
        raise DimensionError(f"dimension mismatch: {len(a)} vs {len(b)}")


def strictly_dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff ``a`` precedes ``b`` in every coordinate (a_j < b_j for all j).

    Note the direction: this is the relation written a < b, i.e. ``b`` is the
    larger point. Equal coordinates never count as dominance.
    """
    _check_dims(a, b)
    return all(x < y for x, y in zip(a, b))


def plus_sum(a: Sequence[float]) -> float:
    return math.fsum(a)


def l1_dist(a: Sequence[float], b: Sequence[float]) -> float:
    _check_dims(a, b)
    return math.fsum(abs(x - y) for x, y in zip(a, b))


def diagonal_point(g: float, d: int) -> Point:
    """The point (g/d, ..., g/d) whose coordinates sum to ``g``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return (g / d,) * d
