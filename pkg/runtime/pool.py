"""Bounded fan-out of independent trials.

Trials are keyed by index and each derives its own random stream, so the
scheduling order never changes the merged result.
"""
from __future__ import annotations

import asyncio
import os
from typing import Callable, List, Optional, TypeVar

T = TypeVar("T")


async def _run_one(fn: Callable[[int], T], index: int, sem: asyncio.Semaphore) -> T:
    async with sem:
        return await asyncio.to_thread(fn, index)


async def _gather_trials(fn: Callable[[int], T], count: int, threads: int) -> List[T]:
    sem = asyncio.Semaphore(threads)
    tasks = [_run_one(fn, i, sem) for i in range(count)]
    # gather keeps submission order, which is the trial index order
    return list(await asyncio.gather(*tasks))


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        return os.cpu_count() or 1
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return threads


def run_trials(fn: Callable[[int], T], count: int, threads: Optional[int] = None) -> List[T]:
    """Run ``fn(i)`` for ``i in range(count)`` and return results by index.

    ``threads=1`` runs inline without an event loop.
    """
    workers = resolve_threads(threads)
    if count <= 0:
        return []
    if workers == 1 or count == 1:
        return [fn(i) for i in range(count)]
    return asyncio.run(_gather_trials(fn, count, min(workers, count)))
