"""Reproducible counter-based random streams.

Every replica of every experiment draws from its own Philox stream keyed by
``(master_seed, experiment, replica, lane)``.  Stream assignment is by replica
index, never by scheduling order, so estimates are identical for any worker
count.  Analysis-side randomness (bootstrap resampling) uses a separate lane
so it never perturbs the simulation draws.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["replica_stream", "analysis_stream", "stream_key"]


def _tag(name: str) -> int:
    """Deterministic 64-bit integer for a lane/experiment name."""
    return int.from_bytes(hashlib.blake2s(name.encode(), digest_size=8).digest(), "big")


def stream_key(master_seed: int, experiment: str, replica: int, lane: str = "sim") -> tuple:
    if replica < 0:
        raise ValueError("replica index must be nonnegative")
    return (int(master_seed), _tag(experiment), int(replica), _tag(lane))


def replica_stream(master_seed: int, experiment: str, replica: int, lane: str = "sim") -> np.random.Generator:
    """Stream for one replica, independent of all other (experiment, replica, lane) tuples."""
    ss = np.random.SeedSequence(stream_key(master_seed, experiment, replica, lane))
    return np.random.Generator(np.random.Philox(ss))


def analysis_stream(master_seed: int, experiment: str) -> np.random.Generator:
    """Stream for post-simulation resampling (bootstrap), one per experiment."""
    return replica_stream(master_seed, experiment, 0, lane="analysis")
