"""Optional thread parallelism capped by the ``CMC_THREADS`` environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("CMC_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(func, items):
    """``list(map(func, items))``, threaded when ``CMC_THREADS > 1``; order is preserved."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))
