"""
utils/pool.py — Order-preserving map over a thread pool.

Usage:
    from utils.pool import ordered_map

    flags = ordered_map(update_walker, range(L), workers=4)

workers <= 1 runs serially in the calling thread. Results come back in input order
regardless of completion order, so callers never see scheduling effects.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
