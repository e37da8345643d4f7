"""Replica-parallel execution helper.

Replicas are embarrassingly parallel; a worker pool consumes index ranges and
results are reassembled in replica order, so no estimate depends on the worker
count or on scheduling.  Workers never share mutable state.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

__all__ = ["resolve_workers", "map_replicas"]

WORKERS_ENV = "AGINGLAB_WORKERS"


def resolve_workers(workers=None) -> int:
    if workers is not None and int(workers) > 0:
        return int(workers)
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def map_replicas(chunk_fn, n_replicas: int, workers=None) -> np.ndarray:
    """Evaluate ``chunk_fn(lo, hi) -> array`` over [0, n_replicas) and stack in order.

    ``chunk_fn`` must be picklable (a module-level function or a partial of
    one) and must derive all randomness from the replica index.
    """
    workers = resolve_workers(workers)
    if n_replicas <= 0:
        raise ValueError("need at least one replica")
    if workers <= 1 or n_replicas == 1:
        return np.asarray(chunk_fn(0, n_replicas))
    pieces = min(n_replicas, workers * 4)
    bounds = np.linspace(0, n_replicas, pieces + 1, dtype=int)
    spans = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_span, [(chunk_fn, lo, hi) for lo, hi in spans]))
    return np.concatenate(parts, axis=0)


def _run_span(args):
    chunk_fn, lo, hi = args
    return np.asarray(chunk_fn(lo, hi))
