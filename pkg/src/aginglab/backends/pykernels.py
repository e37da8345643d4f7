"""Pure-Python (numpy) kernels: the fallback backend.

Same call signatures and the same arithmetic, in the same order, as the
compiled twin in ``_kernels.pyx``.  Random numbers never originate here —
drivers pre-draw them from the replica stream and pass arrays in, so both
backends consume identical draws.  Kernels containing no transcendental
functions (LPP sweep, TASEP events, quadratic GL steps) produce bitwise
identical trajectories across backends.
"""

from __future__ import annotations

import numpy as np

NAME = "python"

POLYMER_ABORT = 50.0  # abort a replica when a drift increment exceeds this many log-units

POT_QUADRATIC = 0
POT_LOGCOSH = 1


def lpp_rows(prev: np.ndarray, wblock: np.ndarray) -> None:
    """Advance the LPP corner recurrence by the rows of ``wblock``, in place.

    ``prev`` holds L(., j) for the last completed row j; each row update uses
    the max-plus scan form L(i, j) = C_i + max_{k<=i}(L(k, j-1) - C_{k-1}) with
    C the running sum of the row weights, which is the same arithmetic as the
    direct recurrence L(i,j) = w_i + max(L(i-1,j), L(i,j-1)).
    """
    cols = prev.shape[0]
    carry = np.empty(cols)
    for r in range(wblock.shape[0]):
        c = np.cumsum(wblock[r])
        carry[0] = prev[0]
        np.subtract(prev[1:], c[:-1], out=carry[1:])
        np.maximum.accumulate(carry, out=carry)
        np.add(carry, c, out=prev)


def tasep_chunk(occ, mobile, mpos, n_mobile, time, t_end, bond_idx, flux, exps, unis):
    """Run kinetic Monte Carlo events until ``t_end`` or the draw chunk is spent.

    One (exponential, uniform) pair is consumed per loop iteration, including
    the final peek past ``t_end`` (exact by memorylessness).  Returns
    ``(n_mobile, time, used, jumps, done)``.
    """
    L = occ.shape[0]
    chunk = exps.shape[0]
    used = 0
    jumps = 0
    while used < chunk:
        if n_mobile == 0:
            return n_mobile, t_end, used, jumps, True
        dt = exps[used] / n_mobile
        if time + dt > t_end:
            used += 1
            return n_mobile, t_end, used, jumps, True
        time = time + dt
        pick = int(unis[used] * n_mobile)
        if pick >= n_mobile:
            pick = n_mobile - 1
        used += 1
        s = int(mobile[pick])
        sp1 = s + 1 if s + 1 < L else 0
        # jump s -> s+1
        occ[s] = 0
        occ[sp1] = 1
        if bond_idx[s] >= 0:
            flux[bond_idx[s]] += 1
        jumps += 1
        # s is no longer mobile: swap-remove
        last = n_mobile - 1
        ml = int(mobile[last])
        mobile[pick] = ml
        mpos[ml] = pick
        mpos[s] = -1
        n_mobile = last
        # left neighbour of s may become mobile (its right site s is now empty)
        sm1 = s - 1 if s >= 1 else L - 1
        if occ[sm1] == 1 and mpos[sm1] < 0:
            mobile[n_mobile] = sm1
            mpos[sm1] = n_mobile
            n_mobile += 1
        # landed particle is mobile iff the site after it is empty
        sp2 = sp1 + 1 if sp1 + 1 < L else 0
        if occ[sp2] == 0:
            mobile[n_mobile] = sp1
            mpos[sp1] = n_mobile
            n_mobile += 1
    return n_mobile, time, used, jumps, False


def polymer_steps(logz, scratch, xi, dt, sdt, theta, beta, noise_scale) -> int:
    """Jacobi Euler-Maruyama steps of the log partition profile, in place.

    Level 0 advances by its exact Gaussian boundary increment; levels j >= 1 by
    (e^{-r_j} - theta) dt + beta dB_j with r_j read from the previous step.
    Returns 0, or 1 on drift overflow (the step is not applied).
    """
    bs = beta * sdt * noise_scale
    for s in range(xi.shape[0]):
        g = np.exp(logz[:-1] - logz[1:])
        if float(g.max()) * dt > POLYMER_ABORT:
            return 1
        scratch[0] = logz[0] - bs * xi[s, 0]
        np.add(logz[1:], (g - theta) * dt + bs * xi[s, 1:], out=scratch[1:])
        logz[:] = scratch
    return 0


def gl_steps(u, scratch, xi, dt, sdt, pot_id, pot_c) -> int:
    """Explicit Euler-Maruyama steps of the interface heights on the ring, in place.

    Drift ((V'(grad_j) - V'(grad_{j-1}))/2 with forward gradients, evaluated
    from the previous step at every site (Jacobi update).  Returns 0.
    """
    L = u.shape[0]
    half_dt = 0.5 * dt
    for s in range(xi.shape[0]):
        grad = np.empty(L)
        np.subtract(np.roll(u, -1), u, out=grad)  # grad[j] = u[j+1] - u[j]
        if pot_id == POT_LOGCOSH:
            vp = grad + pot_c * np.tanh(grad)
        else:
            vp = grad
        drift = vp - np.roll(vp, 1)  # V'(grad_j) - V'(grad_{j-1})
        np.add(u, half_dt * drift + sdt * xi[s], out=scratch)
        u[:] = scratch
    return 0
