"""One-dimensional Ginzburg-Landau gradient-interface SDE system on a ring.

Heights u_j evolve by du_j = (V'(grad u_j) - V'(grad u_{j-1}))/2 dt + dB_j
with forward gradients grad u_j = u_{j+1} - u_j (the dissipative sign: for
quadratic V the drift is half the discrete Laplacian).  The stationary
gradient measure mu_0 ~ e^{-V} is sampled exactly for quadratic V and by
rejection against the curvature-bound Gaussian envelope otherwise.

Heights are pinned u = 0 at logical site 0 and built from L-1 i.i.d. mu_0
gradients; the one closure bond a ring forces is placed antipodal to the
observation window, where it cannot influence observables within the safe
window |k| <= L/4 for our run lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional

import numpy as np

from .backends import kernels, pykernels
from .parallel import map_replicas
from .rng import analysis_stream, replica_stream
from .statcore import CorrelationEstimate, corr_direct, cvtv_estimate

__all__ = [
    "PotentialSpec",
    "GLState",
    "GLTwoTimeResult",
    "quadratic_potential",
    "logcosh_potential",
    "sample_stationary_gradients",
    "gl_em_step",
    "evolve_steps",
    "gl_variance_profile",
    "gl_two_time_corr",
    "height_samples",
]

_STEP_CHUNK = 2048


@dataclass(frozen=True)
class PotentialSpec:
    """Bond potential V with derivative and curvature bounds 0 < c1 <= V'' <= c2.

    ``kernel_id`` selects a compiled drift form when the potential is one of
    the parametric families the kernels know; other convex symmetric
    potentials still run through the Python backend.
    """

    V: Callable
    Vprime: Callable
    c1: float
    c2: float
    kernel_id: Optional[int] = None
    kernel_param: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.c1 <= self.c2 < math.inf):
            raise ValueError("need 0 < c1 <= c2 < inf")
        self.validate()

    def validate(self, span: float = 6.0, points: int = 61) -> None:
        """Spot-check symmetry, odd derivative, and the curvature bounds on a grid."""
        xs = np.linspace(-span / math.sqrt(self.c1), span / math.sqrt(self.c1), points)
        v = np.asarray(self.V(xs), dtype=float)
        vp = np.asarray(self.Vprime(xs), dtype=float)
        if not np.allclose(v, self.V(-xs), rtol=1e-9, atol=1e-12):
            raise ValueError("potential must be symmetric: V(x) = V(-x)")
        if not np.allclose(vp, -np.asarray(self.Vprime(-xs), dtype=float), rtol=1e-9, atol=1e-12):
            raise ValueError("V' must be odd")
        h = 1e-5 / math.sqrt(self.c2)
        vpp = (np.asarray(self.Vprime(xs + h)) - np.asarray(self.Vprime(xs - h))) / (2 * h)
        tol = 1e-4 * self.c2
        if vpp.min() < self.c1 - tol or vpp.max() > self.c2 + tol:
            raise ValueError(
                f"curvature bounds violated at probed points: V'' in "
                f"[{vpp.min():.6g}, {vpp.max():.6g}] vs [{self.c1:g}, {self.c2:g}]"
            )


def quadratic_potential() -> PotentialSpec:
    """V(x) = x^2/2; mu_0 is exactly standard Gaussian."""
    return PotentialSpec(
        V=lambda x: 0.5 * np.square(x),
        Vprime=lambda x: np.asarray(x, dtype=float),
        c1=1.0,
        c2=1.0,
        kernel_id=pykernels.POT_QUADRATIC,
    )


def logcosh_potential(eps: float = 0.2) -> PotentialSpec:
    """Convex anharmonic perturbation V(x) = x^2/2 + eps*log cosh x.

    V''(x) = 1 + eps sech^2 x stays inside [1, 1+eps], so the curvature
    bounds hold globally (a plain quartic term would violate them).
    """
    if not 0.0 < eps < 5.0:
        raise ValueError("perturbation strength out of range")
    return PotentialSpec(
        V=lambda x: 0.5 * np.square(x) + eps * np.logaddexp(x, -x) - eps * math.log(2.0),
        Vprime=lambda x: x + eps * np.tanh(x),
        c1=1.0,
        c2=1.0 + eps,
        kernel_id=pykernels.POT_LOGCOSH,
        kernel_param=eps,
    )


@dataclass
class GLState:
    """Ring heights with logical indexing [-L/2, L/2); pinned u=0 at site 0 at t=0."""

    L: int
    u: np.ndarray
    time: float
    steps: int
    rng: np.random.Generator
    _scratch: np.ndarray = field(default=None, repr=False)

    def site_index(self, k: int) -> int:
        if abs(k) > self.L // 4:
            raise ValueError(f"site {k} outside the safe window |k| <= {self.L // 4}")
        return k % self.L

    def value(self, k: int) -> float:
        return float(self.u[self.site_index(k)])

    def gradients(self) -> np.ndarray:
        return np.roll(self.u, -1) - self.u

    @property
    def seam_bond(self) -> int:
        """Physical index of the closure bond (antipodal to the pinned site)."""
        return self.L // 2 - 1

    def bulk_gradients(self) -> np.ndarray:
        """Ring gradients without the closure bond (i.i.d. mu_0 at t = 0)."""
        g = self.gradients()
        return np.delete(g, self.seam_bond)


def sample_mu0(spec: PotentialSpec, size: int, rng) -> np.ndarray:
    """Draws from mu_0 ~ e^{-V}: exact Gaussian for quadratic V, else rejection.

    The envelope is the Gaussian with variance 1/c1 and matched mode; the
    curvature bound makes the acceptance ratio e^{-(V(z)-V(0)-c1 z^2/2)} <= 1.
    """
    if spec.kernel_id == pykernels.POT_QUADRATIC:
        return rng.standard_normal(size)
    sigma = 1.0 / math.sqrt(spec.c1)
    v0 = float(spec.V(0.0))
    out = np.empty(size)
    have = 0
    while have < size:
        m = size - have
        z = rng.standard_normal(m) * sigma
        log_acc = -(np.asarray(spec.V(z), dtype=float) - v0 - 0.5 * spec.c1 * z * z)
        keep = np.log(rng.random(m)) < log_acc
        k = int(keep.sum())
        out[have : have + k] = z[keep]
        have += k
    return out


def sample_stationary_gradients(spec: PotentialSpec, L: int, seed_or_rng) -> GLState:
    """Heights from i.i.d. mu_0 gradients, cumulative-summed from u_0 = 0.

    The L-1 sampled bonds cover logical sites -L/2..L/2-1; the remaining
    (closure) bond sits between logical L/2-1 and -L/2, antipodal to the
    pinned site.
    """
    if L < 8 or L % 2:
        raise ValueError("ring size must be even and >= 8")
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else replica_stream(int(seed_or_rng), "glew", 0)
    )
    g = sample_mu0(spec, L - 1, rng)
    half = L // 2
    u = np.empty(L)
    u[0] = 0.0
    # g[0:half] are the bonds k -> k+1 for logical k = -half..-1,
    # g[half:] those for logical k = 0..half-2; the closure bond
    # (logical half-1 -> -half) is whatever the heights imply.
    np.cumsum(g[half:], out=u[1:half])
    down = -np.cumsum(g[half - 1 :: -1])  # u(-1), u(-2), ..., u(-half)
    u[L - 1 : half - 1 : -1] = down
    return GLState(L=L, u=u, time=0.0, steps=0, rng=rng, _scratch=np.empty(L))


def _backend_for(spec: PotentialSpec):
    return kernels if spec.kernel_id is not None else pykernels


def _drift(spec: PotentialSpec, u: np.ndarray) -> np.ndarray:
    vp = np.asarray(spec.Vprime(np.roll(u, -1) - u), dtype=float)
    return 0.5 * (vp - np.roll(vp, 1))


def evolve_steps(state: GLState, spec: PotentialSpec, dt: float, n_steps: int) -> GLState:
    """Advance ``n_steps`` explicit Euler-Maruyama steps with periodic indexing."""
    if dt <= 0.0 or dt > 0.1 / spec.c2:
        raise ValueError(f"dt must satisfy 0 < dt <= 0.1/c2 = {0.1 / spec.c2:g}")
    sdt = math.sqrt(dt)
    backend = _backend_for(spec)
    done = 0
    while done < n_steps:
        take = min(_STEP_CHUNK, n_steps - done)
        xi = state.rng.standard_normal((take, state.L))
        if spec.kernel_id is not None:
            backend.gl_steps(state.u, state._scratch, xi, dt, sdt, spec.kernel_id, spec.kernel_param)
        else:
            for srow in range(take):
                state.u += dt * _drift(spec, state.u) + sdt * xi[srow]
        done += take
        state.steps += take
        state.time = state.steps * dt
    if not np.isfinite(state.u).all():
        raise FloatingPointError("non-finite drift: interface heights diverged")
    return state


def gl_em_step(state: GLState, spec: PotentialSpec, dt: float) -> GLState:
    """One Euler-Maruyama step on all sites."""
    return evolve_steps(state, spec, dt, 1)


def height_samples(spec: PotentialSpec, L: int, dt: float, record, rng,
                   sum_times=()) -> np.ndarray:
    """One replica's heights at (time, logical site) points, plus optional ring sums.

    Returns the requested heights in order, followed by Sum_j u_j at each time
    in ``sum_times`` (used by the total-momentum check).
    """
    steps_of = lambda t: int(round(t / dt))
    jobs = [(steps_of(t), ("site", i)) for i, (t, _k) in enumerate(record)]
    jobs += [(steps_of(t), ("sum", i)) for i, t in enumerate(sum_times)]
    out = np.empty(len(record) + len(sum_times))
    state = sample_stationary_gradients(spec, L, rng)
    for target, (kind, i) in sorted(jobs, key=lambda j: j[0]):
        evolve_steps(state, spec, dt, target - state.steps)
        if kind == "site":
            out[i] = state.value(int(record[i][1]))
        else:
            out[len(record) + i] = float(state.u.sum())
    return out


def _ensemble_chunk(lo, hi, seed, spec_name, eps, L, dt, record, sum_times, experiment):
    spec = quadratic_potential() if spec_name == "quadratic" else logcosh_potential(eps)
    out = np.empty((hi - lo, len(record) + len(sum_times)))
    for i in range(lo, hi):
        rng = replica_stream(seed, experiment, i)
        out[i - lo] = height_samples(spec, L, dt, record, rng, sum_times)
    return out


def height_ensemble(spec: PotentialSpec, L: int, dt: float, record, replicas: int, seed: int,
                    workers=None, sum_times=(), experiment: str = "glew.ensemble") -> np.ndarray:
    """Replica ensemble of height observables, shape (replicas, len(record)+len(sum_times)).

    Parallel workers rebuild the potential from its parametric name, so only
    the two built-in families run through the pool; custom potentials run
    serially in-process.
    """
    record = tuple((float(t), int(k)) for t, k in record)
    sum_times = tuple(float(t) for t in sum_times)
    if spec.kernel_id == pykernels.POT_QUADRATIC:
        name, eps = "quadratic", 0.0
    elif spec.kernel_id == pykernels.POT_LOGCOSH:
        name, eps = "logcosh", spec.kernel_param
    else:
        out = np.empty((replicas, len(record) + len(sum_times)))
        for i in range(replicas):
            rng = replica_stream(seed, experiment, i)
            out[i] = height_samples(spec, L, dt, record, rng, sum_times)
        return out
    fn = partial(_ensemble_chunk, seed=seed, spec_name=name, eps=eps, L=L, dt=dt,
                 record=record, sum_times=sum_times, experiment=experiment)
    return map_replicas(fn, replicas, workers)


def gl_variance_profile(spec: PotentialSpec, L: int, t: float, dt: float, replicas: int,
                        seed: int, sites=(0,), workers=None) -> list[tuple]:
    """Monte Carlo Var u(t, k) with stderr, one row (k, var, stderr) per site."""
    min_L = 16.0 * (t + math.sqrt(t) * 10.0)
    if L < min_L:
        raise ValueError(f"ring too small for t={t:g}: need L >= {min_L:g}")
    record = [(t, int(k)) for k in sites]
    obs = height_ensemble(spec, L, dt, record, replicas, seed, workers,
                          experiment="glew.variance")
    rows = []
    for col, k in enumerate(sites):
        v = obs[:, col]
        var = float(np.var(v, ddof=1))
        # large-n stderr of the sample variance via the fourth central moment
        m4 = float(np.mean((v - v.mean()) ** 4))
        se = math.sqrt(max(m4 - var * var * (replicas - 3) / (replicas - 1), 0.0) / replicas)
        rows.append((int(k), var, se))
    return rows


@dataclass(frozen=True)
class GLTwoTimeResult:
    direct: CorrelationEstimate
    cvtv: CorrelationEstimate
    var_first: float
    var_second: float
    var_displaced: float


def gl_two_time_corr(spec: PotentialSpec, s: float, a: float, x: float, y: float, L: int,
                     dt: float, replicas: int, seed: int, workers=None) -> GLTwoTimeResult:
    """Corr(u(s, floor(x sqrt(s))), u(as, floor(y sqrt(s)))) with the CVTV triple."""
    if a < 1.0:
        raise ValueError("time ratio a must be >= 1")
    j = int(math.floor(x * math.sqrt(s)))
    k = int(math.floor(y * math.sqrt(s)))
    if max(abs(j), abs(k), abs(k - j)) > L // 4:
        raise ValueError("observation sites outside the safe window |k| <= L/4")
    record = [(s, j), (a * s, k), ((a - 1.0) * s, k - j)]
    obs = height_ensemble(spec, L, dt, record, replicas, seed, workers,
                          experiment="glew.two_time")
    xv, yv, dv = obs[:, 0], obs[:, 1], obs[:, 2]
    if a == 1.0 and j == k:
        direct = CorrelationEstimate(1.0, 0.0, replicas)
    else:
        direct = corr_direct(xv, yv)
    cvtv = cvtv_estimate(xv, yv, dv, rng=analysis_stream(seed, "glew.two_time"))
    return GLTwoTimeResult(
        direct=direct,
        cvtv=cvtv,
        var_first=float(np.var(xv, ddof=1)),
        var_second=float(np.var(yv, ddof=1)),
        var_displaced=float(np.var(dv, ddof=1)),
    )
