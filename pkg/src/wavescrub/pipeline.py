"""Ordered parallel frame processing.

Reader stays sequential, pure per-frame work fans out to a thread pool, and
results are written back in submission order with a bounded in-flight window
(2x the worker count), so output bytes never depend on the worker count.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_parallel_map(
    items: Iterable[T],
    fn: Callable[[T], R],
    threads: int,
) -> Iterator[R]:
    if threads <= 1:
        for item in items:
            yield fn(item)
        return
    window = 2 * threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = deque()
        iterator = iter(items)
        try:
            for item in iterator:
                pending.append(pool.submit(fn, item))
                if len(pending) >= window:
                    yield pending.popleft().result()
            while pending:
                yield pending.popleft().result()
        finally:
            for future in pending:
                future.cancel()
