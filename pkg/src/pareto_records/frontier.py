"""Current-record frontier under streaming insertion.

The frontier is the antichain of observations not strictly below any later
observation. ``Frontier.insert`` reports whether a new point sets a record and
how many current records it kills.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import DimensionError, Point

NOT_RECORD = "not_record"
RECORD = "record"


class Backend(str, Enum):
    GENERIC_SCAN = "generic"
    STAIRCASE_2D = "staircase"


@dataclass(frozen=True)
class RecordOutcome:
    kind: str
    kills: int = 0
    killed: Optional[Tuple[Point, ...]] = None

    @property
    def is_record(self) -> bool:
        return self.kind == RECORD

    def as_k(self) -> int:
        """Kill count with the convention -1 for a non-record."""
        return self.kills if self.is_record else -1


_NOT_RECORD_OUTCOME = RecordOutcome(NOT_RECORD)


@dataclass
class Frontier:
    """Antichain of current records.

    ``staircase`` (d == 2 only) keeps the points sorted by first coordinate
    ascending, second coordinate non-increasing, and answers each insertion
    with binary searches. ``generic`` is a linear scan for any d.
    """

    dim: int
    backend: Backend = Backend.GENERIC_SCAN
    keep_killed: bool = False
    _pts: List[Point] = field(default_factory=list, repr=False)
    # staircase columns
    _xs: List[float] = field(default_factory=list, repr=False)
    _ys: List[float] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        self.backend = Backend(self.backend)
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.backend is Backend.STAIRCASE_2D and self.dim != 2:
            raise ValueError("staircase backend requires dim == 2")

    @classmethod
    def for_dim(cls, dim: int, keep_killed: bool = False) -> "Frontier":
        backend = Backend.STAIRCASE_2D if dim == 2 else Backend.GENERIC_SCAN
        return cls(dim, backend, keep_killed)

    def __len__(self) -> int:
        if self.backend is Backend.STAIRCASE_2D:
            return len(self._xs)
        return len(self._pts)

    @property
    def points(self) -> List[Point]:
        if self.backend is Backend.STAIRCASE_2D:
            return list(zip(self._xs, self._ys))
        return list(self._pts)

    def as_array(self) -> np.ndarray:
        if self.backend is Backend.STAIRCASE_2D:
            return np.column_stack([self._xs, self._ys]) if self._xs else np.empty((0, 2))
        return np.asarray(self._pts, dtype=float).reshape(len(self._pts), self.dim)

    def insert(self, p: Sequence[float]) -> RecordOutcome:
        if len(p) != self.dim:
            raise DimensionError(f"point has dimension {len(p)}, frontier has {self.dim}")
        if self.backend is Backend.STAIRCASE_2D:
            return self._insert_staircase(float(p[0]), float(p[1]))
        return self._insert_scan(tuple(float(c) for c in p))

    def _insert_scan(self, p: Point) -> RecordOutcome:
        pts = self._pts
        for m in pts:
            if all(a < b for a, b in zip(p, m)):
                return _NOT_RECORD_OUTCOME
        keep = []
        killed = []
        for m in pts:
            if all(a < b for a, b in zip(m, p)):
                killed.append(m)
            else:
                keep.append(m)
        keep.append(p)
        self._pts = keep
        return RecordOutcome(RECORD, len(killed), tuple(killed) if self.keep_killed else None)

    def _insert_staircase(self, px: float, py: float) -> RecordOutcome:
        xs, ys = self._xs, self._ys
        # members strictly to the right; the first of them has the largest y
        i = bisect.bisect_right(xs, px)
        if i < len(xs) and ys[i] > py:
            return _NOT_RECORD_OUTCOME
        hi = bisect.bisect_left(xs, px)
        # ys[:hi] is non-increasing; killed members form the suffix with y < py
        lo, top = 0, hi
        while lo < top:
            mid = (lo + top) // 2
            if ys[mid] < py:
                top = mid
            else:
                lo = mid + 1
        kills = hi - lo
        killed = tuple(zip(xs[lo:hi], ys[lo:hi])) if self.keep_killed else None
        del xs[lo:hi]
        del ys[lo:hi]
        pos = lo
        # ties on x: order by y descending
        while pos < len(xs) and xs[pos] == px and ys[pos] > py:
            pos += 1
        xs.insert(pos, px)
        ys.insert(pos, py)
        return RecordOutcome(RECORD, kills, killed)

    def is_antichain(self) -> bool:
        pts = self.points
        return not any(
            all(a < b for a, b in zip(u, v)) for u in pts for v in pts if u is not v
        )


def maxima_of(points: Sequence[Sequence[float]]) -> List[int]:
    """Indices (ascending) of points not strictly below any other point."""
    if len(points) == 0:
        return []
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2:
        raise DimensionError("points must share one dimension")
    n = arr.shape[0]
    # visit in decreasing coordinate sum (ties broken by first coordinate, which
    # survives float rounding of the sums): anything above a point comes first
    order = np.lexsort((-arr[:, 0], -arr.sum(axis=1)))
    kept = np.empty((0, arr.shape[1]))
    is_max = np.zeros(n, dtype=bool)
    for i in order:
        p = arr[i]
        if kept.shape[0] and np.any(np.all(p < kept, axis=1)):
            continue
        is_max[i] = True
        kept = np.vstack([kept, p])
    return [int(i) for i in np.flatnonzero(is_max)]
