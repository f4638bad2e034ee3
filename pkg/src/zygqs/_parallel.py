"""Deterministic chunked parallel map.

Chunk boundaries depend only on the problem size, never on the worker count,
so reductions over the returned list are reproducible bit for bit.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


def worker_count() -> int:
    env = os.environ.get("ZF_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"ZF_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return os.cpu_count() or 1


def chunk_ranges(start: int, stop: int, size: int) -> list[tuple[int, int]]:
    """Half-open ``[a, b)`` pieces of ``[start, stop)`` of at most ``size`` items."""
    return [(a, min(a + size, stop)) for a in range(start, stop, size)]


def map_chunks(fn: Callable[[tuple[int, int]], T], chunks: Sequence[tuple[int, int]]) -> list[T]:
    """``[fn(c) for c in chunks]``, evaluated on a thread pool, order preserved."""
    workers = min(worker_count(), len(chunks))
    if workers <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))
