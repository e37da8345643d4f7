"""Continuous-time TASEP on a ring, stationary at density 1/2.

Kinetic Monte Carlo over the mobile set (occupied sites with an empty right
neighbour): the next event time is Exp(#mobile) and a uniformly chosen mobile
particle jumps right — exact in law for rate-1 jumps, O(1) per event.  Flux
counters N_t(j) are kept for a declared set of tracked bonds; the height
function is rebuilt from N_t(0) and the occupancy field.

The ring stands in for the infinite lattice: information travels at finite
speed, so observables inside the safe window are unaffected by wraparound for
the run lengths enforced by the preconditions (margin factor 8).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .backends import kernels
from .parallel import map_replicas
from .rng import analysis_stream, replica_stream
from .statcore import CorrelationEstimate, corr_direct, cvtv_estimate

__all__ = [
    "TasepState",
    "HeightSample",
    "TwoTimeResult",
    "init_stationary",
    "evolve_until",
    "height",
    "height_samples",
    "two_time_height_corr",
]

_CHUNK = 1 << 16


@dataclass
class TasepState:
    """Ring occupancy, mobile-set index, tracked-bond flux counters and clock."""

    L: int
    occ: np.ndarray
    mobile: np.ndarray
    mpos: np.ndarray
    n_mobile: int
    bond_idx: np.ndarray
    flux: np.ndarray
    tracked_bonds: tuple
    time: float
    jumps: int
    rng: np.random.Generator


@dataclass(frozen=True)
class HeightSample:
    """Height value h at (time, site j); neighbouring heights differ by +-1."""

    time: float
    j: int
    value: int


@dataclass(frozen=True)
class TwoTimeResult:
    """Direct Pearson estimate plus the CVTV cross-check triple."""

    direct: CorrelationEstimate
    cvtv: CorrelationEstimate
    var_first: float
    var_second: float
    var_displaced: float


def init_stationary(L: int, seed_or_rng, tracked_bonds=(0,), blocked_origin_bond: bool = False) -> TasepState:
    """Bernoulli(1/2) occupancy, time 0, zero flux on the tracked bonds.

    ``blocked_origin_bond`` forces a hole at site 0 and a particle at site 1
    (Bernoulli elsewhere): the boundary convention under which the stationary
    corner-growth coupling P[L(n,n) <= t] = P[N_t(0) >= n] is exact.
    """
    if L < 2:
        raise ValueError("ring size must be >= 2")
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else replica_stream(int(seed_or_rng), "tasep", 0)
    occ = rng.integers(0, 2, size=L, dtype=np.uint8)
    if blocked_origin_bond:
        occ[0] = 0
        occ[1] = 1
    mobile_sites = np.flatnonzero((occ == 1) & (np.roll(occ, -1) == 0)).astype(np.int64)
    mobile = np.full(L, -1, dtype=np.int64)
    mpos = np.full(L, -1, dtype=np.int64)
    mobile[: mobile_sites.size] = mobile_sites
    mpos[mobile_sites] = np.arange(mobile_sites.size)
    tracked = tuple(int(b) % L for b in tracked_bonds)
    bond_idx = np.full(L, -1, dtype=np.int64)
    for i, b in enumerate(tracked):
        bond_idx[b] = i
    return TasepState(
        L=L,
        occ=occ,
        mobile=mobile,
        mpos=mpos,
        n_mobile=int(mobile_sites.size),
        bond_idx=bond_idx,
        flux=np.zeros(len(tracked), dtype=np.int64),
        tracked_bonds=tracked,
        time=0.0,
        jumps=0,
        rng=rng,
    )


def evolve_until(state: TasepState, t_end: float) -> TasepState:
    """Advance the trajectory to ``t_end`` exactly in law."""
    if t_end < state.time:
        raise ValueError("t_end must not precede the current time")
    if state.n_mobile == 0:
        state.time = float(t_end)
        return state
    while state.time < t_end:
        # expected events left ~ rate * remaining time; chunk sized from state only
        expect = state.n_mobile * (t_end - state.time)
        size = int(min(_CHUNK, max(64.0, 1.25 * expect + 10.0 * math.sqrt(expect + 1.0))))
        exps = state.rng.standard_exponential(size, method="inv")
        unis = state.rng.random(size)
        n_mobile, time, _used, jumps, done = kernels.tasep_chunk(
            state.occ, state.mobile, state.mpos, state.n_mobile,
            state.time, float(t_end), state.bond_idx, state.flux, exps, unis,
        )
        state.n_mobile = int(n_mobile)
        state.time = float(time)
        state.jumps += int(jumps)
        if done:
            break
    return state


def _flux0(state: TasepState) -> int:
    if state.bond_idx[0] < 0:
        raise ValueError("bond 0 is not tracked; heights need N_t(0)")
    return int(state.flux[state.bond_idx[0]])


def height(state: TasepState, j: int) -> int:
    """Height h(t, j) relative to bond (0, 1): 2 N_t(0) minus the occupancy sums.

    j must stay in the window |j| <= L/4 where ring wraparound has not
    contaminated the observable.
    """
    L = state.L
    if abs(j) > L // 4:
        raise ValueError(f"site {j} outside the safe window |j| <= {L // 4}")
    n0 = _flux0(state)
    if j == 0:
        return 2 * n0
    if j >= 1:
        occ_sum = int(state.occ[1 : j + 1].sum())
        return 2 * n0 - (j - 2 * occ_sum)
    idx = np.arange(j, 0) % L
    occ_sum = int(state.occ[idx].sum())
    return 2 * n0 - ((-j) - 2 * occ_sum)


def height_samples(L: int, record, rng, tracked_bonds=(0,)) -> np.ndarray:
    """One replica's heights at a list of (time, site) points, in the given order."""
    order = sorted(range(len(record)), key=lambda i: record[i][0])
    state = init_stationary(L, rng, tracked_bonds)
    out = np.empty(len(record))
    for i in order:
        t, j = record[i]
        evolve_until(state, float(t))
        out[i] = height(state, int(j))
    return out


def _two_time_chunk(lo, hi, seed, L, s, a, j, k, experiment):
    record = ((s, j), (a * s, k), ((a - 1.0) * s, k - j))
    out = np.empty((hi - lo, 3))
    for i in range(lo, hi):
        rng = replica_stream(seed, experiment, i)
        out[i - lo] = height_samples(L, record, rng)
    return out


def two_time_height_corr(L: int, s: float, a: float, j: int, k: int, replicas: int,
                         seed: int, workers=None) -> TwoTimeResult:
    """Corr(h(s,j), h(as,k)) over independent replicas, with the CVTV triple.

    Also records h((a-1)s, k-j) per replica, whose variance is the displaced
    one-point variance the CVTV reduction needs (space-time stationarity of
    height increments).
    """
    if a < 1.0:
        raise ValueError("time ratio a must be >= 1")
    if replicas < 100:
        raise ValueError("two-time correlation needs at least 100 replicas")
    if L < 8.0 * a * s:
        raise ValueError(f"ring too small: need L >= 8*a*s = {8.0 * a * s:g}")
    experiment = "tasep.two_time"
    fn = partial(_two_time_chunk, seed=seed, L=L, s=float(s), a=float(a), j=int(j), k=int(k),
                 experiment=experiment)
    obs = map_replicas(fn, replicas, workers)
    x, y, d = obs[:, 0], obs[:, 1], obs[:, 2]
    if a == 1.0 and j == k:
        direct = CorrelationEstimate(1.0, 0.0, replicas)
    else:
        direct = corr_direct(x, y)
    cvtv = cvtv_estimate(x, y, d, rng=analysis_stream(seed, experiment))
    return TwoTimeResult(
        direct=direct,
        cvtv=cvtv,
        var_first=float(np.var(x, ddof=1)),
        var_second=float(np.var(y, ddof=1)),
        var_displaced=float(np.var(d, ddof=1)),
    )
