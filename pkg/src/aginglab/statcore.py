"""Streaming moment statistics and correlation estimation.

The estimation core of the laboratory: Welford-style accumulators that merge
associatively across workers, the Pearson estimator with jackknife standard
errors, the covariance-to-variance (CVTV) correlation built from three
one-point variances, a one-sample Kolmogorov-Smirnov distance, and percentile
bootstrap intervals.

Accumulators are plain values: move them between workers freely, but do not
mutate one accumulator from two threads — each worker owns its own and the
results are merged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MomentAccumulator",
    "PairAccumulator",
    "EmpiricalDistribution",
    "CorrelationEstimate",
    "acc_update",
    "acc_merge",
    "corr_direct",
    "corr_cvtv",
    "cvtv_estimate",
    "ks_statistic",
    "ks_critical_value",
    "bootstrap_ci",
]

# Asymptotic one-sample KS critical values c(alpha)/sqrt(n), tabulated for the
# confidence levels the acceptance tests use.
_KS_CRIT = {0.95: 1.3581, 0.99: 1.6276}


def ks_critical_value(n: int, alpha: float = 0.99) -> float:
    """Large-n critical value of the one-sample KS statistic at level ``alpha``."""
    try:
        c = _KS_CRIT[alpha]
    except KeyError:
        raise ValueError(f"no tabulated KS critical value for alpha={alpha}") from None
    return c / math.sqrt(n)


@dataclass
class MomentAccumulator:
    """Streaming count/mean/M2 of a scalar observable (Welford recurrence)."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def update(self, x: float) -> None:
        if not math.isfinite(x):
            raise ValueError(f"non-finite observation {x!r}")
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def update_many(self, xs) -> None:
        xs = np.asarray(xs, dtype=float)
        if xs.size and not np.isfinite(xs).all():
            raise ValueError("non-finite observation in batch")
        for x in xs.ravel():
            self.update(float(x))

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if other.count == 0:
            return MomentAccumulator(self.count, self.mean, self.m2)
        if self.count == 0:
            return MomentAccumulator(other.count, other.mean, other.m2)
        n = self.count + other.count
        delta = other.mean - self.mean
        frac = other.count / n
        mean = self.mean + delta * frac
        m2 = self.m2 + other.m2 + delta * delta * self.count * frac
        return MomentAccumulator(n, mean, m2)

    def variance(self) -> float:
        """Unbiased sample variance; defined only for count >= 2."""
        if self.count < 2:
            raise ValueError("variance needs at least two observations")
        return self.m2 / (self.count - 1)

    def stderr_of_mean(self) -> float:
        return math.sqrt(self.variance() / self.count)


def acc_update(acc: MomentAccumulator, x: float) -> MomentAccumulator:
    """Functional form of :meth:`MomentAccumulator.update` (returns a new value)."""
    out = MomentAccumulator(acc.count, acc.mean, acc.m2)
    out.update(x)
    return out


def acc_merge(a: MomentAccumulator, b: MomentAccumulator) -> MomentAccumulator:
    return a.merge(b)


@dataclass
class PairAccumulator:
    """Streaming joint moments of an observation pair (x, y)."""

    count: int = 0
    mean_x: float = 0.0
    mean_y: float = 0.0
    m2x: float = 0.0
    m2y: float = 0.0
    co: float = 0.0

    def update(self, x: float, y: float) -> None:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError("non-finite observation pair")
        self.count += 1
        dx = x - self.mean_x
        dy = y - self.mean_y
        self.mean_x += dx / self.count
        self.mean_y += dy / self.count
        # co uses the pre-update x-delta and post-update y-mean: the standard
        # one-pass cross-moment recurrence.
        self.m2x += dx * (x - self.mean_x)
        self.m2y += dy * (y - self.mean_y)
        self.co += dx * (y - self.mean_y)

    def merge(self, other: "PairAccumulator") -> "PairAccumulator":
        if other.count == 0:
            return PairAccumulator(**vars(self))
        if self.count == 0:
            return PairAccumulator(**vars(other))
        n = self.count + other.count
        dx = other.mean_x - self.mean_x
        dy = other.mean_y - self.mean_y
        w = self.count * other.count / n
        return PairAccumulator(
            count=n,
            mean_x=self.mean_x + dx * other.count / n,
            mean_y=self.mean_y + dy * other.count / n,
            m2x=self.m2x + other.m2x + dx * dx * w,
            m2y=self.m2y + other.m2y + dy * dy * w,
            co=self.co + other.co + dx * dy * w,
        )

    def pearson(self) -> float:
        if self.count < 2:
            raise ValueError("correlation needs at least two pairs")
        if self.m2x <= 0.0 or self.m2y <= 0.0:
            raise ValueError("zero-variance marginal")
        r = self.co / math.sqrt(self.m2x * self.m2y)
        return min(1.0, max(-1.0, r))

    @classmethod
    def from_arrays(cls, x, y) -> "PairAccumulator":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape:
            raise ValueError("paired samples must have equal length")
        if x.size and not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("non-finite observation pair")
        n = x.size
        acc = cls()
        if n == 0:
            return acc
        mx = float(x.mean())
        my = float(y.mean())
        acc.count = n
        acc.mean_x = mx
        acc.mean_y = my
        acc.m2x = float(((x - mx) ** 2).sum())
        acc.m2y = float(((y - my) ** 2).sum())
        acc.co = float(((x - mx) * (y - my)).sum())
        return acc


@dataclass
class EmpiricalDistribution:
    """Sorted sample set; the empirical CDF used by the distributional tests."""

    samples: np.ndarray

    def __init__(self, samples):
        arr = np.sort(np.asarray(samples, dtype=float))
        if arr.size < 1:
            raise ValueError("empirical distribution needs at least one sample")
        if not np.isfinite(arr).all():
            raise ValueError("non-finite sample")
        self.samples = arr

    @property
    def size(self) -> int:
        return self.samples.size

    def cdf(self, x: float) -> float:
        return float(np.searchsorted(self.samples, x, side="right")) / self.size


@dataclass(frozen=True)
class CorrelationEstimate:
    """A correlation value in [-1, 1] with its standard error and replica count."""

    value: float
    stderr: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "value", min(1.0, max(-1.0, self.value)))
        if self.stderr < 0.0:
            raise ValueError("stderr must be nonnegative")


def corr_direct(x, y=None) -> CorrelationEstimate:
    """Pearson correlation with a jackknife standard error.

    ``x`` may be the first sample array (with ``y`` the second) or a
    PairAccumulator.  The accumulator form cannot be resampled, so it gets the
    large-n analytic stderr (1 - r^2)/sqrt(n) instead of the jackknife.
    """
    if isinstance(x, PairAccumulator):
        acc = x
        r = acc.pearson()
        se = (1.0 - r * r) / math.sqrt(acc.count) if acc.count > 3 else 0.0
        return CorrelationEstimate(r, se, acc.count)

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    acc = PairAccumulator.from_arrays(x, y)
    if acc.count < 2:
        raise ValueError("correlation needs at least two pairs")
    if acc.m2x <= 0.0 or acc.m2y <= 0.0:
        raise ValueError("zero-variance marginal")
    r = acc.pearson()
    n = acc.count
    if n < 4:
        return CorrelationEstimate(r, 0.0, n)

    # Leave-one-out Pearson values from totals, all vectorized.
    sx, sy = x.sum(), y.sum()
    sxx, syy, sxy = (x * x).sum(), (y * y).sum(), (x * y).sum()
    m = n - 1
    mx = (sx - x) / m
    my = (sy - y) / m
    vxx = (sxx - x * x) - m * mx * mx
    vyy = (syy - y * y) - m * my * my
    vxy = (sxy - x * y) - m * mx * my
    denom = np.sqrt(np.maximum(vxx * vyy, 0.0))
    good = denom > 0.0
    r_loo = np.where(good, vxy / np.where(good, denom, 1.0), r)
    se = math.sqrt((n - 1) / n * float(((r_loo - r_loo.mean()) ** 2).sum()))
    return CorrelationEstimate(r, se, n)


def corr_cvtv(var_a: float, var_b: float, var_diff: float) -> float:
    """Correlation from three one-point variances via the CVTV reduction.

    For a process with space-time stationary increments,
    Corr(F(t1,x1), F(t2,x2)) = (VarF(t1,x1) + VarF(t2,x2) - VarF(t2-t1,x2-x1))
    / (2 sqrt(VarF(t1,x1) VarF(t2,x2))).
    """
    if not (var_a > 0.0 and var_b > 0.0):
        raise ValueError("zero-variance marginal")
    if var_diff < 0.0:
        raise ValueError("increment variance must be nonnegative")
    r = 0.5 * (var_a + var_b - var_diff) / math.sqrt(var_a * var_b)
    return min(1.0, max(-1.0, r))


def cvtv_estimate(x, y, d, resamples: int = 1000, rng: np.random.Generator | None = None) -> CorrelationEstimate:
    """CVTV correlation from replica samples of the two points and the displaced point.

    ``x``, ``y`` are per-replica observations at the two space-time points and
    ``d`` at the displaced point (t2-t1, x2-x1).  The standard error is a
    percentile bootstrap over replicas (the estimate is a nonlinear function
    of moments, so no closed-form stderr is attempted).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = np.asarray(d, dtype=float)
    n = x.size
    if not (y.size == n and d.size == n):
        raise ValueError("replica arrays must have equal length")
    if n < 2:
        raise ValueError("need at least two replicas")
    value = corr_cvtv(x.var(ddof=1), y.var(ddof=1), d.var(ddof=1))
    if rng is None:
        rng = np.random.default_rng(0)
    reps = np.empty(resamples)
    chunk = max(1, int(2e6) // max(n, 1))
    done = 0
    while done < resamples:
        b = min(chunk, resamples - done)
        idx = rng.integers(0, n, size=(b, n))
        xv = x[idx].var(axis=1, ddof=1)
        yv = y[idx].var(axis=1, ddof=1)
        dv = d[idx].var(axis=1, ddof=1)
        ok = (xv > 0) & (yv > 0)
        num = 0.5 * (xv + yv - dv)
        den = np.sqrt(np.where(ok, xv * yv, 1.0))
        reps[done : done + b] = np.clip(np.where(ok, num / den, value), -1.0, 1.0)
        done += b
    return CorrelationEstimate(value, float(reps.std(ddof=1)), n)


def ks_statistic(samples, cdf) -> float:
    """Sup-norm distance between the empirical CDF of ``samples`` and ``cdf``.

    The empirical CDF is evaluated from the right at sample points and from
    the left just before them, so ties are handled by the standard sup-norm
    definition.  ``cdf`` must be nondecreasing on the sample range and may be
    vectorized or scalar.
    """
    if isinstance(samples, EmpiricalDistribution):
        xs = samples.samples
    else:
        xs = np.sort(np.asarray(samples, dtype=float))
        if xs.size < 1:
            raise ValueError("need at least one sample")
    n = xs.size
    try:
        fx = np.asarray(cdf(xs), dtype=float)
        if fx.shape != xs.shape:
            raise TypeError
    except TypeError:
        fx = np.array([float(cdf(v)) for v in xs])
    right = np.searchsorted(xs, xs, side="right") / n
    left = np.searchsorted(xs, xs, side="left") / n
    d = max(float((right - fx).max()), float((fx - left).max()))
    return min(1.0, max(0.0, d))


def bootstrap_ci(samples, estimator, level: float = 0.95, resamples: int = 1000, seed: int = 0):
    """Percentile bootstrap interval for ``estimator`` over ``samples``.

    Deterministic for a fixed seed.  Requires at least 10 samples and 100
    resamples.
    """
    xs = np.asarray(samples, dtype=float)
    if xs.size < 10:
        raise ValueError("too few samples for a bootstrap interval (need >= 10)")
    if resamples < 100:
        raise ValueError("resamples must be at least 100")
    if not (0.0 < level < 1.0):
        raise ValueError("level must be in (0, 1)")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    stats = np.empty(resamples)
    for b in range(resamples):
        stats[b] = estimator(xs[rng.integers(0, xs.size, size=xs.size)])
    lo, hi = np.quantile(stats, [(1 - level) / 2, (1 + level) / 2])
    return float(lo), float(hi)
