"""Thread-pool helper honoring the FILTER_FORGE_THREADS cap (0 or unset = auto)."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["parallel_map", "thread_count"]


def thread_count() -> int:
    raw = os.environ.get("FILTER_FORGE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"FILTER_FORGE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"FILTER_FORGE_THREADS must be >= 0, got {n}")
    if n == 0:
        return min(os.cpu_count() or 1, 8)
    return n


def parallel_map(fn, items):
    """Map preserving order; uses threads only when it can actually help."""
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
