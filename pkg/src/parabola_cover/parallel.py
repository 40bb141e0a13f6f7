"""Ordered fan-out over fixed chunks.

Work is always split the same way regardless of the worker count, and
results come back in chunk order, so any reduction over them is identical
for threads=1 and threads=N.
"""

from __future__ import annotations

import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], chunks: Sequence[T], threads: int = 1) -> list[R]:
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if threads == 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as pool:
        return list(pool.map(fn, chunks))
