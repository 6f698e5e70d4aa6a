"""Seed derivation and order-independent parallel replication.

Every unit of work (a replicate stream, or a fixed-size block of limit draws)
gets its own generator, derived from the master seed and the unit's index:

    child(seed, *key) = PCG64(SeedSequence(entropy=seed, spawn_key=key))

``SeedSequence`` hashes (entropy, spawn_key) into the generator state, so the
mapping is fixed and documented by numpy. Results depend only on (seed, key),
never on which worker ran the unit or in what order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

WORKERS_ENV = "PARETO_RECORDS_WORKERS"

T = TypeVar("T")
R = TypeVar("R")


def child_generator(seed: int, *key: int) -> np.random.Generator:
    if seed < 0 or any(k < 0 for k in key):
        raise ValueError("seeds and keys must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: Optional[int] = None) -> List[R]:
    """``[fn(x) for x in items]``, optionally across processes; order preserved."""
    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def blocks(total: int, size: int) -> Iterable[tuple[int, int]]:
    """(block index, block length) pairs covering ``total`` units."""
    for b, start in enumerate(range(0, total, size)):
        yield b, min(size, total - start)
