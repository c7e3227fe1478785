"""Small shared utilities."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_threads() -> int:
    """Parallelism cap from FERROSIM_THREADS (default 1, serial)."""
    raw = os.environ.get("FERROSIM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def thread_map(fn, items) -> list:
    """Order-preserving map, threaded when FERROSIM_THREADS > 1.

    Results are assembled in input order regardless of completion order, so
    output is deterministic either way.
    """
    items = list(items)
    n = max_threads()
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
