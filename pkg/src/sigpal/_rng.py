"""Seeded-stream plumbing shared by every Monte-Carlo component.

All randomness in the package flows through ``numpy.random.Generator``
streams derived from a user-visible integer seed.  Streams for parallel
units of work (replicates, restarts) are spawned *up front* from a
``SeedSequence``, so results are identical for any worker count or
execution order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np
from numpy.random import SeedSequence

_T = TypeVar("_T")
_R = TypeVar("_R")


def seed_of(ss: SeedSequence) -> int:
    """Collapse a SeedSequence into a reproducible 63-bit integer seed."""
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def parallel_map(
    fn: Callable[[_T], _R],
    items: Sequence[_T] | Iterable[_T],
    workers: int = 1,
) -> list[_R]:
    """Map ``fn`` over ``items`` preserving order.

    ``workers > 1`` runs items on a thread pool; because every item owns
    its private RNG stream, the result is identical for any ``workers``.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
