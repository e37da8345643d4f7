"""Exact analytic references.

The two aging functions, the KPZ fixed-point two-time correlation, the
Edwards-Wilkinson one-point variance and space-time correlation in closed
form, and the Bessel-series expectation E_k|X_t| of the rate-1 symmetric
continuous-time walk (generator half the discrete Laplacian), which is the
finite-lattice variance oracle for the quadratic Ginzburg-Landau model.

Everything here is a pure function, safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .statcore import corr_cvtv

__all__ = [
    "AgingPoint",
    "EwQuery",
    "rho_kpz",
    "rho_ew",
    "kpz_fp_correlation",
    "gauss_pdf",
    "gauss_cdf",
    "ew_variance",
    "ew_correlation",
    "bessel_i",
    "rw_abs_expectation",
    "aging_table",
]

_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class AgingPoint:
    """One point (a, value) on an aging curve; a >= 1 and value in (0, 1]."""

    a: float
    value: float

    def __post_init__(self):
        if self.a < 1.0:
            raise ValueError("time ratio a must be >= 1")
        if not (0.0 < self.value <= 1.0):
            raise ValueError("aging value must lie in (0, 1]")


@dataclass(frozen=True)
class EwQuery:
    """Two space-time points (a, x) and (b, y) with 0 < a <= b."""

    a: float
    b: float
    x: float
    y: float

    def __post_init__(self):
        if not (0.0 < self.a <= self.b):
            raise ValueError("need 0 < a <= b")


def rho_kpz(a: float) -> float:
    """KPZ aging function (1 + a^(2/3) - (a-1)^(2/3)) / (2 a^(1/3)) for a >= 1."""
    if a < 1.0:
        raise ValueError("aging functions are defined for a >= 1")
    return (1.0 + a ** (2.0 / 3.0) - (a - 1.0) ** (2.0 / 3.0)) / (2.0 * a ** (1.0 / 3.0))


def rho_ew(a: float) -> float:
    """EW aging function (1 + a^(1/2) - (a-1)^(1/2)) / (2 a^(1/4)) for a >= 1."""
    if a < 1.0:
        raise ValueError("aging functions are defined for a >= 1")
    return (1.0 + math.sqrt(a) - math.sqrt(a - 1.0)) / (2.0 * a**0.25)


def kpz_fp_correlation(s: float, t: float) -> float:
    """Stationary KPZ fixed-point correlation Corr(H(s,0), H(t,0)) = rho_kpz(t/s)."""
    if s <= 0.0:
        raise ValueError("first time must be positive")
    if t < s:
        raise ValueError("need s <= t")
    return rho_kpz(t / s)


def gauss_pdf(t: float, x: float) -> float:
    """Heat kernel p(t, x) = exp(-x^2 / 2t) / sqrt(2 pi t), t > 0."""
    if t <= 0.0:
        raise ValueError("heat kernel needs t > 0")
    return math.exp(-x * x / (2.0 * t)) / (_SQRT2PI * math.sqrt(t))


def gauss_cdf(x: float) -> float:
    """Standard normal CDF."""
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def ew_variance(t: float, x: float) -> float:
    """Var U(t, x) = E_x|B_t| for the stationary EW field, in closed form.

    Uses the scaling Var = sqrt(t) * r(1, x/sqrt(t)) with
    r(1, y) = |y| (2 Phi(|y|) - 1) + 2 p(1, y); t = 0 returns |x|.
    """
    if t < 0.0:
        raise ValueError("time must be nonnegative")
    if t == 0.0:
        return abs(x)
    y = abs(x) / math.sqrt(t)
    r1 = y * (2.0 * gauss_cdf(y) - 1.0) + 2.0 * gauss_pdf(1.0, y)
    return math.sqrt(t) * r1


def ew_correlation(q: EwQuery) -> float:
    """Exact EW space-time correlation via the CVTV reduction on ew_variance.

    Equals rho_ew(b/a) at x = y = 0 and is invariant under the diffusive
    rescaling (a, b, x, y) -> (sa, sb, x sqrt(s), y sqrt(s)).
    """
    if q.b == q.a and q.x == q.y:
        return 1.0
    return corr_cvtv(
        ew_variance(q.a, q.x),
        ew_variance(q.b, q.y),
        ew_variance(q.b - q.a, q.y - q.x),
    )


def bessel_i(k: int, t: float) -> float:
    """Modified Bessel function of the first kind I_|k|(t), t >= 0."""
    if t < 0.0:
        raise ValueError("argument must be nonnegative")
    return float(_sp.iv(abs(int(k)), t))


def rw_abs_expectation(t: float, k: int) -> float:
    """E_k|X_t| for the symmetric continuous-time walk with generator (1/2)*Laplacian.

    Evaluates sum_j |j| exp(-t) I_{j-k}(t) with the series truncated where the
    Poisson-type tail is below 1e-12.
    """
    if t < 0.0:
        raise ValueError("time must be nonnegative")
    k = int(k)
    if t == 0.0:
        return float(abs(k))
    # the walk started at k stays within k +- (t + 12 sqrt(t) + 20) up to mass < 1e-12
    span = int(math.ceil(t + 12.0 * math.sqrt(t) + 20.0))
    j = np.arange(k - span, k + span + 1)
    pmf = _sp.ive(np.abs(j - k), t)
    return float(np.sum(np.abs(j) * pmf))


def aging_table(which: str, ratios) -> list[AgingPoint]:
    """Evaluate an aging function on a grid of ratios; ``which`` is 'kpz' or 'ew'."""
    fn = {"kpz": rho_kpz, "ew": rho_ew}.get(which)
    if fn is None:
        raise ValueError(f"unknown aging function {which!r} (expected 'kpz' or 'ew')")
    return [AgingPoint(float(a), fn(float(a))) for a in ratios]
