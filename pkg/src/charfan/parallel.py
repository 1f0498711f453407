"""Ordered map over independent work items, capped by CHARFAN_THREADS."""
import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    try:
        n = int(os.environ.get("CHARFAN_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def parallel_map(fn, items):
    items = list(items)
    workers = worker_count()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
