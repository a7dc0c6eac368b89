"""Deterministic worker fan-out.

Work is split at item granularity and results are combined in item order,
so outputs are identical for every worker count. Large read-only state is
handed to children through fork inheritance instead of per-task pickling.
"""

from __future__ import annotations

import multiprocessing
import os

_SHARED = None


def _call_shared(item):
    fn, shared = _SHARED
    return fn(shared, item)


def parallel_map_shared(fn, shared, items, workers: int = 1) -> list:
    """[fn(shared, it) for it in items], optionally across forked workers."""
    items = list(items)
    if workers <= 1 or len(items) <= 1 or os.name != "posix":
        return [fn(shared, it) for it in items]
    global _SHARED
    _SHARED = (fn, shared)
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(min(workers, len(items))) as pool:
            return pool.map(_call_shared, items, chunksize=1)
    finally:
        _SHARED = None
