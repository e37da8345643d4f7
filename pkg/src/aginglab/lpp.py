"""Stationary last-passage percolation with exponential weights.

Bulk weights are Exp(1), the boundary row and column are Exp(1/2) with
W(0,0) = 0 — the stationary version of the model.  The corner recurrence
L(i,j) = W(i,j) + max(L(i-1,j), L(i,j-1)) is swept with one-row rolling
memory and weights drawn on the fly from the replica stream, so memory is
O(n) and the joint law of several diagonal points of one replica is exact
(they share a single weight field).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import tasep as _tasep
from .backends import kernels
from .parallel import map_replicas
from .rng import analysis_stream, replica_stream
from .statcore import CorrelationEstimate, EmpiricalDistribution, corr_direct, cvtv_estimate

__all__ = [
    "LppConfig",
    "LppReplicaResult",
    "IdentityRow",
    "lpp_from_weights",
    "diagonal_profile",
    "lpp_diagonal_pair",
    "burke_increments",
    "lpp_aging_corr",
    "lpp_tasep_identity_check",
]

MEAN_BULK = 1.0
MEAN_BOUNDARY = 2.0  # Exp(1/2) has mean 2

_ROW_CHUNK_DOUBLES = 1 << 18


@dataclass(frozen=True)
class LppConfig:
    """A diagonal two-time experiment: corner (n,n) against (floor(a n), floor(a n))."""

    n: int
    a: float = 1.0
    seed: int = 0
    replicas: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("diagonal size n must be >= 1")
        if self.a < 1.0:
            raise ValueError("time ratio a must be >= 1")
        if self.replicas < 1:
            raise ValueError("need at least one replica")

    @property
    def n_big(self) -> int:
        return int(math.floor(self.a * self.n))


@dataclass(frozen=True)
class LppReplicaResult:
    """Passage times of one replica at the two nested diagonal corners."""

    L_small: float
    L_big: float

    def __post_init__(self):
        if not (0.0 <= self.L_small <= self.L_big):
            raise ValueError("passage times must satisfy 0 <= L(n,n) <= L(an,an)")


def lpp_from_weights(weights) -> np.ndarray:
    """Full passage-time table for an explicit weight array (reference path).

    Used as the small-grid oracle; the caller supplies all weights including
    the boundary row/column and the (0,0) corner.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2:
        raise ValueError("weight array must be two-dimensional")
    m, n = w.shape
    table = np.empty_like(w)
    table[0] = np.cumsum(w[0])
    for i in range(1, m):
        table[i, 0] = table[i - 1, 0] + w[i, 0]
        for j in range(1, n):
            table[i, j] = w[i, j] + max(table[i - 1, j], table[i, j - 1])
    return table


def _boundary_row(rng, cols: int) -> np.ndarray:
    w0 = rng.standard_exponential(cols, method="inv")
    w0 *= MEAN_BOUNDARY
    w0[0] = 0.0
    return np.cumsum(w0)


def diagonal_profile(rng, marks) -> np.ndarray:
    """L(m, m) for each m in ``marks`` (ascending), one rolling sweep, shared weights."""
    marks = [int(m) for m in marks]
    if not marks or any(m < 1 for m in marks) or sorted(marks) != marks:
        raise ValueError("marks must be ascending positive integers")
    cols = marks[-1] + 1
    prev = _boundary_row(rng, cols)
    out = np.empty(len(marks))
    chunk_rows = max(1, _ROW_CHUNK_DOUBLES // cols)
    row, mi = 0, 0
    while mi < len(marks):
        take = min(chunk_rows, marks[mi] - row)
        w = rng.standard_exponential((take, cols), method="inv")
        w[:, 0] *= MEAN_BOUNDARY
        kernels.lpp_rows(prev, w)
        row += take
        if row == marks[mi]:
            out[mi] = prev[row]
            mi += 1
    return out


def final_row(rng, n1: int, count: int) -> np.ndarray:
    """L(n1, j) for j = 0..count, one rolling sweep along the first coordinate."""
    if n1 < 1 or count < 1:
        raise ValueError("need n1 >= 1 and count >= 1")
    cols = count + 1
    prev = _boundary_row(rng, cols)
    chunk_rows = max(1, _ROW_CHUNK_DOUBLES // cols)
    row = 0
    while row < n1:
        take = min(chunk_rows, n1 - row)
        w = rng.standard_exponential((take, cols), method="inv")
        w[:, 0] *= MEAN_BOUNDARY
        kernels.lpp_rows(prev, w)
        row += take
    return prev


def lpp_diagonal_pair(cfg: LppConfig, replica: int = 0) -> LppReplicaResult:
    """Both diagonal values of one replica, from that replica's stream."""
    rng = replica_stream(cfg.seed, "lpp.diagonal", replica)
    marks = [cfg.n] if cfg.n_big == cfg.n else [cfg.n, cfg.n_big]
    vals = diagonal_profile(rng, marks)
    return LppReplicaResult(float(vals[0]), float(vals[-1]))


def burke_increments(n1: int, count: int, seed: int, replica: int = 0) -> EmpiricalDistribution:
    """Row increments L(n1, j) - L(n1, j-1), j = 1..count; i.i.d. Exp(1/2) in law."""
    rng = replica_stream(seed, "lpp.burke", replica)
    row = final_row(rng, n1, count)
    return EmpiricalDistribution(np.diff(row))


def _profile_chunk(lo: int, hi: int, seed: int, marks: tuple, experiment: str) -> np.ndarray:
    out = np.empty((hi - lo, len(marks)))
    for i in range(lo, hi):
        rng = replica_stream(seed, experiment, i)
        out[i - lo] = diagonal_profile(rng, list(marks))
    return out


def diagonal_ensemble(marks, replicas: int, seed: int, workers=None, experiment: str = "lpp.diagonal") -> np.ndarray:
    """Replica ensemble of diagonal passage times, shape (replicas, len(marks))."""
    marks = tuple(int(m) for m in marks)
    fn = partial(_profile_chunk, seed=seed, marks=marks, experiment=experiment)
    return map_replicas(fn, replicas, workers)


def lpp_aging_corr(cfg: LppConfig, workers=None, ensemble: np.ndarray | None = None) -> CorrelationEstimate:
    """Pearson estimate of Corr(L(n,n), L(floor(an), floor(an))) across replicas."""
    if cfg.replicas < 100:
        raise ValueError("aging correlation needs at least 100 replicas")
    if cfg.n_big == cfg.n:
        return CorrelationEstimate(1.0, 0.0, cfg.replicas)
    if ensemble is None:
        ensemble = diagonal_ensemble([cfg.n, cfg.n_big], cfg.replicas, cfg.seed, workers)
    return corr_direct(ensemble[:, 0], ensemble[:, 1])


@dataclass(frozen=True)
class IdentityRow:
    """One row of the LPP <-> TASEP distributional identity check."""

    t: float
    p_lpp: float
    se_lpp: float
    p_tasep: float
    se_tasep: float

    def gap_in_se(self) -> float:
        """|difference| in units of the combined binomial stderr."""
        se = math.hypot(self.se_lpp, self.se_tasep)
        return abs(self.p_lpp - self.p_tasep) / se if se > 0 else math.inf


def _identity_lpp_chunk(lo, hi, seed, n):
    out = np.empty((hi - lo, 1))
    for i in range(lo, hi):
        rng = replica_stream(seed, "lpp.identity.lpp", i)
        out[i - lo, 0] = diagonal_profile(rng, [n])[0]
    return out


def _identity_tasep_chunk(lo, hi, seed, ring, t_grid):
    out = np.empty((hi - lo, len(t_grid)))
    for i in range(lo, hi):
        rng = replica_stream(seed, "lpp.identity.tasep", i)
        state = _tasep.init_stationary(ring, rng, blocked_origin_bond=True)
        for j, t in enumerate(t_grid):
            _tasep.evolve_until(state, t)
            out[i - lo, j] = state.flux[0]
    return out


def lpp_tasep_identity_check(n: int, t_grid, replicas: int, seed: int, workers=None) -> list[IdentityRow]:
    """Empirical P[L(n,n) <= t] next to P[N_t(0) >= n], with binomial stderr per t.

    The two sides are simulated independently from their own definitions and
    the identity is tested, not imposed.  The TASEP side uses the matched
    boundary convention of the stationary corner-growth coupling (hole at
    site 0, particle at site 1, Bernoulli(1/2) elsewhere): with a plain
    product measure both sides differ at O(1) already at n = 1, where
    P[L(1,1) <= t] ~ t^3/12 while an unconditioned bond crossing is O(t).
    """
    if n > 10:
        raise ValueError("identity check is intended for small n (<= 10)")
    t_grid = sorted(float(t) for t in t_grid)
    ring = 1 << max(6, math.ceil(math.log2(8.0 * max(t_grid) + 16.0)))

    lvals = map_replicas(partial(_identity_lpp_chunk, seed=seed, n=n), replicas, workers)[:, 0]
    flux = map_replicas(partial(_identity_tasep_chunk, seed=seed, ring=ring, t_grid=tuple(t_grid)), replicas, workers)

    rows = []
    for j, t in enumerate(t_grid):
        p1 = float(np.mean(lvals <= t))
        p2 = float(np.mean(flux[:, j] >= n))
        se1 = math.sqrt(p1 * (1 - p1) / replicas)
        se2 = math.sqrt(p2 * (1 - p2) / replicas)
        rows.append(IdentityRow(t, p1, se1, p2, se2))
    return rows


def aging_cvtv_estimate(ensemble_small, ensemble_big, ensemble_diff, seed: int = 0) -> CorrelationEstimate:
    """CVTV estimate from diagonal samples plus displaced-corner samples."""
    return cvtv_estimate(
        ensemble_small, ensemble_big, ensemble_diff, rng=analysis_stream(seed, "lpp.cvtv")
    )
