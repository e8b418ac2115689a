"""Optional process fan-out, capped by the FRONTKIT_THREADS environment variable."""

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("FRONTKIT_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """list(map(fn, items)), in worker processes when more than one is allowed.

    Results keep input order, so output does not depend on the worker count.
    """
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
