# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: the hot inner loops of the simulation lab.

Mirrors ``pykernels`` operation for operation (same signatures, same
floating-point evaluation order) so the two backends are interchangeable.
"""

from libc.math cimport exp, tanh

import numpy as np

NAME = "cython"

POLYMER_ABORT = 50.0

POT_QUADRATIC = 0
POT_LOGCOSH = 1

cdef double _POLYMER_ABORT_C = 50.0


def lpp_rows(double[::1] prev, double[:, ::1] wblock):
    """Advance the LPP corner recurrence by the rows of ``wblock``, in place."""
    cdef Py_ssize_t cols = prev.shape[0]
    cdef Py_ssize_t rows = wblock.shape[0]
    cdef Py_ssize_t r, i
    cdef double c, cprev, m, a
    for r in range(rows):
        c = 0.0
        cprev = 0.0
        m = -1e308
        for i in range(cols):
            c = c + wblock[r, i]
            a = prev[i] - cprev
            if a > m:
                m = a
            prev[i] = m + c
            cprev = c


def tasep_chunk(unsigned char[::1] occ,
                long long[::1] mobile,
                long long[::1] mpos,
                long long n_mobile,
                double time,
                double t_end,
                long long[::1] bond_idx,
                long long[::1] flux,
                double[::1] exps,
                double[::1] unis):
    """Kinetic Monte Carlo events until ``t_end`` or the draw chunk is spent."""
    cdef Py_ssize_t L = occ.shape[0]
    cdef Py_ssize_t chunk = exps.shape[0]
    cdef Py_ssize_t used = 0
    cdef long long jumps = 0
    cdef double dt
    cdef Py_ssize_t pick, s, sp1, sm1, sp2, last, ml

    while used < chunk:
        if n_mobile == 0:
            return n_mobile, t_end, used, jumps, True
        dt = exps[used] / n_mobile
        if time + dt > t_end:
            used += 1
            return n_mobile, t_end, used, jumps, True
        time = time + dt
        pick = <Py_ssize_t>(unis[used] * n_mobile)
        if pick >= n_mobile:
            pick = n_mobile - 1
        used += 1
        s = <Py_ssize_t>mobile[pick]
        sp1 = s + 1 if s + 1 < L else 0
        occ[s] = 0
        occ[sp1] = 1
        if bond_idx[s] >= 0:
            flux[bond_idx[s]] += 1
        jumps += 1
        last = n_mobile - 1
        ml = <Py_ssize_t>mobile[last]
        mobile[pick] = ml
        mpos[ml] = pick
        mpos[s] = -1
        n_mobile = last
        sm1 = s - 1 if s >= 1 else L - 1
        if occ[sm1] == 1 and mpos[sm1] < 0:
            mobile[n_mobile] = sm1
            mpos[sm1] = n_mobile
            n_mobile += 1
        sp2 = sp1 + 1 if sp1 + 1 < L else 0
        if occ[sp2] == 0:
            mobile[n_mobile] = sp1
            mpos[sp1] = n_mobile
            n_mobile += 1
    return n_mobile, time, used, jumps, False


def polymer_steps(double[::1] logz,
                  double[::1] scratch,
                  double[:, ::1] xi,
                  double dt,
                  double sdt,
                  double theta,
                  double beta,
                  double noise_scale):
    """Jacobi Euler-Maruyama steps of the log partition profile, in place."""
    cdef Py_ssize_t n = logz.shape[0]
    cdef Py_ssize_t steps = xi.shape[0]
    cdef Py_ssize_t s, j
    cdef double bs = beta * sdt * noise_scale
    cdef double g
    for s in range(steps):
        for j in range(1, n):
            g = exp(logz[j - 1] - logz[j])
            if g * dt > _POLYMER_ABORT_C:
                return 1
            scratch[j] = logz[j] + ((g - theta) * dt + bs * xi[s, j])
        scratch[0] = logz[0] - bs * xi[s, 0]
        for j in range(n):
            logz[j] = scratch[j]
    return 0


def gl_steps(double[::1] u,
             double[::1] scratch,
             double[:, ::1] xi,
             double dt,
             double sdt,
             int pot_id,
             double pot_c):
    """Explicit Euler-Maruyama steps of the interface heights on the ring, in place."""
    cdef Py_ssize_t L = u.shape[0]
    cdef Py_ssize_t steps = xi.shape[0]
    cdef Py_ssize_t s, j, jp
    cdef double half_dt = 0.5 * dt
    cdef double g, drift
    cdef double[::1] vp = np.empty(L)
    for s in range(steps):
        for j in range(L):
            jp = j + 1 if j + 1 < L else 0
            g = u[jp] - u[j]
            if pot_id == POT_LOGCOSH:
                vp[j] = g + pot_c * tanh(g)
            else:
                vp[j] = g
        for j in range(L):
            drift = vp[j] - vp[j - 1 if j >= 1 else L - 1]
            scratch[j] = u[j] + (half_dt * drift + sdt * xi[s, j])
        for j in range(L):
            u[j] = scratch[j]
    return 0
