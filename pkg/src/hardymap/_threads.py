"""Deterministic thread-pool helpers.

Worker count comes from the HARDYMAP_THREADS environment variable and
defaults to the machine's logical cores.  Work items are independent
and results are collected in input order, so numerical output never
depends on the worker count.
"""

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "HARDYMAP_THREADS"


def thread_count():
    raw = os.environ.get(ENV_THREADS, "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def parallel_map(fn, items):
    """Map fn over items, preserving order; threaded when it helps."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
