import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aginglab.rng import replica_stream
from aginglab.statcore import (
    CorrelationEstimate,
    EmpiricalDistribution,
    MomentAccumulator,
    PairAccumulator,
    acc_merge,
    acc_update,
    bootstrap_ci,
    corr_cvtv,
    corr_direct,
    cvtv_estimate,
    ks_critical_value,
    ks_statistic,
)

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def two_pass_variance(xs):
    xs = np.asarray(xs, dtype=float)
    return float(((xs - xs.mean()) ** 2).sum() / (len(xs) - 1))


class TestMomentAccumulator:
    def test_single_observation(self):
        acc = acc_update(MomentAccumulator(), 5.0)
        assert (acc.count, acc.mean, acc.m2) == (1, 5.0, 0.0)

    def test_variance_against_two_pass(self):
        acc = MomentAccumulator()
        for x in (1.0, 2.0, 3.0):
            acc.update(x)
        assert acc.variance() == pytest.approx(two_pass_variance([1, 2, 3]), rel=1e-12)
        assert acc.variance() == pytest.approx(1.0)

    def test_constant_data_zero_spread(self):
        acc = MomentAccumulator()
        for _ in range(30):
            acc.update(2.75)
        assert acc.m2 == 0.0

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            MomentAccumulator().update(float("nan"))
        with pytest.raises(ValueError):
            MomentAccumulator().update(float("inf"))

    def test_merge_identity(self):
        a = MomentAccumulator()
        for x in (4.0, 7.0, 9.0):
            a.update(x)
        merged = acc_merge(MomentAccumulator(), a)
        assert (merged.count, merged.mean, merged.m2) == (a.count, a.mean, a.m2)

    def test_merge_matches_sequential(self):
        a, b = MomentAccumulator(), MomentAccumulator()
        for x in (1.0, 2.0):
            a.update(x)
        for x in (3.0, 4.0):
            b.update(x)
        merged = acc_merge(a, b)
        assert merged.variance() == pytest.approx(two_pass_variance([1, 2, 3, 4]), rel=1e-12)

    @given(st.lists(finite_floats, min_size=1, max_size=30), st.lists(finite_floats, min_size=1, max_size=30))
    @settings(max_examples=80, deadline=None)
    def test_merge_commutes(self, xs, ys):
        a, b = MomentAccumulator(), MomentAccumulator()
        for x in xs:
            a.update(x)
        for y in ys:
            b.update(y)
        ab, ba = acc_merge(a, b), acc_merge(b, a)
        assert ab.count == ba.count
        assert ab.mean == pytest.approx(ba.mean, rel=1e-12, abs=1e-12)
        assert ab.m2 == pytest.approx(ba.m2, rel=1e-12, abs=1e-9)

    @given(
        st.lists(finite_floats, min_size=0, max_size=20),
        st.lists(finite_floats, min_size=0, max_size=20),
        st.lists(finite_floats, min_size=0, max_size=20),
    )
    @settings(max_examples=80, deadline=None)
    def test_merge_associative(self, xs, ys, zs):
        accs = []
        for data in (xs, ys, zs):
            acc = MomentAccumulator()
            for v in data:
                acc.update(v)
            accs.append(acc)
        a, b, c = accs
        left = acc_merge(acc_merge(a, b), c)
        right = acc_merge(a, acc_merge(b, c))
        assert left.count == right.count
        scale = max(1.0, abs(left.mean), abs(left.m2))
        assert abs(left.mean - right.mean) <= 1e-10 * scale
        assert abs(left.m2 - right.m2) <= 1e-10 * scale


class TestPairAccumulator:
    @given(st.lists(st.tuples(finite_floats, finite_floats), min_size=2, max_size=50))
    @settings(max_examples=80, deadline=None)
    def test_cauchy_schwarz(self, pairs):
        acc = PairAccumulator()
        for x, y in pairs:
            acc.update(x, y)
        scale = math.sqrt(acc.m2x * acc.m2y)
        assert abs(acc.co) <= scale + 1e-9 * max(scale, 1.0)

    def test_streaming_matches_batch(self):
        rng = np.random.default_rng(0)
        x, y = rng.normal(size=100), rng.normal(size=100)
        stream = PairAccumulator()
        for xi, yi in zip(x, y):
            stream.update(xi, yi)
        batch = PairAccumulator.from_arrays(x, y)
        assert stream.pearson() == pytest.approx(batch.pearson(), rel=1e-10)

    def test_merge_matches_union(self):
        rng = np.random.default_rng(1)
        x, y = rng.normal(size=60), rng.normal(size=60)
        a = PairAccumulator.from_arrays(x[:25], y[:25])
        b = PairAccumulator.from_arrays(x[25:], y[25:])
        merged = a.merge(b)
        whole = PairAccumulator.from_arrays(x, y)
        assert merged.pearson() == pytest.approx(whole.pearson(), rel=1e-12)


class TestCorrDirect:
    def test_perfect_correlation(self):
        x = np.array([1.0, 2.0, 5.0, 9.0])
        assert corr_direct(x, x).value == 1.0
        assert corr_direct(x, -x).value == -1.0

    def test_independent_gaussians_clt_bound(self):
        rng = replica_stream(20260810, "statcore.clt", 0)
        x, y = rng.standard_normal(10**5), rng.standard_normal(10**5)
        est = corr_direct(x, y)
        assert abs(est.value) <= 0.02  # 3/sqrt(n) = 0.0095
        assert est.stderr == pytest.approx(1.0 / math.sqrt(10**5), rel=0.2)

    def test_zero_variance_rejected(self):
        with pytest.raises(ValueError, match="zero-variance"):
            corr_direct(np.ones(10), np.arange(10.0))

    def test_accumulator_input(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=500)
        y = 0.5 * x + rng.normal(size=500)
        acc = PairAccumulator.from_arrays(x, y)
        est_acc = corr_direct(acc)
        est_arr = corr_direct(x, y)
        assert est_acc.value == pytest.approx(est_arr.value, rel=1e-12)
        assert est_acc.n == est_arr.n == 500

    def test_jackknife_stderr_tracks_sampling_spread(self):
        # stderr should predict the spread of the estimator over repetitions
        rng = np.random.default_rng(4)
        vals, errs = [], []
        for _ in range(200):
            x = rng.normal(size=400)
            y = 0.6 * x + 0.8 * rng.normal(size=400)
            est = corr_direct(x, y)
            vals.append(est.value)
            errs.append(est.stderr)
        assert np.mean(errs) == pytest.approx(np.std(vals), rel=0.25)


class TestCorrCvtv:
    def test_identical_variables(self):
        assert corr_cvtv(1.0, 1.0, 0.0) == 1.0

    def test_independent_increments(self):
        assert corr_cvtv(3.0, 3.0, 6.0) == 0.0

    def test_brownian_motion(self):
        # Corr(B_1, B_4) = min(s,t)/sqrt(st) = 0.5
        s, t = 1.0, 4.0
        assert corr_cvtv(s, t, t - s) == pytest.approx(min(s, t) / math.sqrt(s * t), rel=1e-14)
        assert corr_cvtv(s, t, t - s) == pytest.approx(0.5)

    @given(
        st.floats(min_value=1e-3, max_value=1e3),
        st.floats(min_value=1e-3, max_value=1e3),
        st.floats(min_value=0.0, max_value=1e3),
        st.floats(min_value=1e-6, max_value=1e6),
    )
    @settings(max_examples=200, deadline=None)
    def test_scaling_invariance(self, va, vb, vd, c):
        base = corr_cvtv(va, vb, vd)
        scaled = corr_cvtv(c * va, c * vb, c * vd)
        assert scaled == pytest.approx(base, rel=1e-10, abs=1e-12)

    def test_rejects_bad_variances(self):
        with pytest.raises(ValueError, match="zero-variance"):
            corr_cvtv(0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            corr_cvtv(1.0, 1.0, -0.1)

    def test_cvtv_matches_direct_on_stationary_field(self):
        # F(t, x) = B1(t) + B2(x): space-time stationary increments,
        # Var F(t, x) = t + x for t, x >= 0 after pinning F(0,0) = 0.
        rng = replica_stream(20260810, "statcore.cvtv", 0)
        n = 4000
        t1, x1, t2, x2 = 1.0, 0.5, 3.0, 2.0
        b1 = rng.standard_normal((n, 2))
        b2 = rng.standard_normal((n, 2))
        f1 = math.sqrt(t1) * b1[:, 0] + math.sqrt(x1) * b2[:, 0]
        f2 = f1 + math.sqrt(t2 - t1) * b1[:, 1] + math.sqrt(x2 - x1) * b2[:, 1]
        fd = math.sqrt(t2 - t1) * rng.standard_normal(n) + math.sqrt(x2 - x1) * rng.standard_normal(n)
        direct = corr_direct(f1, f2)
        cvtv = cvtv_estimate(f1, f2, fd, rng=replica_stream(1, "statcore.cvtv", 1))
        combined = math.hypot(direct.stderr, cvtv.stderr)
        assert abs(direct.value - cvtv.value) <= 3.0 * combined


class TestKs:
    def test_quantile_construction(self):
        n = 200
        samples = [(i + 1) / (n + 1) for i in range(n)]
        stat = ks_statistic(samples, lambda x: np.clip(x, 0, 1))
        assert stat <= 1.0 / (n + 1) + 1e-12

    def test_exponential_fit(self):
        rng = replica_stream(20260810, "statcore.ks", 0)
        xs = rng.standard_exponential(10**4, method="inv")
        stat = ks_statistic(xs, lambda x: -np.expm1(-x))
        assert stat <= 0.025  # 99% critical value is 0.0163

    def test_point_mass_against_continuous(self):
        stat = ks_statistic(np.zeros(50), lambda x: np.clip(x + 0.5, 0, 1))
        assert stat >= 0.5

    def test_bounds(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            xs = rng.normal(size=rng.integers(1, 50))
            stat = ks_statistic(xs, lambda v: np.clip(0.5 + v / 8.0, 0.0, 1.0))
            assert 0.0 <= stat <= 1.0

    def test_critical_value_table(self):
        assert ks_critical_value(10**4, 0.99) == pytest.approx(0.016276, rel=1e-3)
        with pytest.raises(ValueError):
            ks_critical_value(100, alpha=0.5)


class TestBootstrap:
    def test_constant_data(self):
        lo, hi = bootstrap_ci(np.full(50, 3.25), np.mean, resamples=200, seed=1)
        assert lo == hi == 3.25

    def test_mean_interval_covers(self):
        lo, hi = bootstrap_ci(np.arange(1.0, 101.0), np.mean, level=0.95, resamples=1000, seed=2)
        assert lo < 50.5 < hi

    def test_deterministic_for_fixed_seed(self):
        data = np.arange(1.0, 41.0)
        first = bootstrap_ci(data, np.median, resamples=300, seed=9)
        second = bootstrap_ci(data, np.median, resamples=300, seed=9)
        assert first == second

    def test_preconditions(self):
        with pytest.raises(ValueError, match="too few samples"):
            bootstrap_ci(np.arange(5.0), np.mean)
        with pytest.raises(ValueError, match="resamples"):
            bootstrap_ci(np.arange(20.0), np.mean, resamples=50)


class TestTypes:
    def test_correlation_estimate_clamps(self):
        est = CorrelationEstimate(1.0 + 1e-9, 0.01, 100)
        assert est.value == 1.0
        with pytest.raises(ValueError):
            CorrelationEstimate(0.5, -0.1, 100)

    def test_empirical_distribution_sorts_and_validates(self):
        emp = EmpiricalDistribution([3.0, 1.0, 2.0])
        assert np.array_equal(emp.samples, [1.0, 2.0, 3.0])
        assert emp.cdf(2.0) == pytest.approx(2 / 3)
        with pytest.raises(ValueError):
            EmpiricalDistribution([])
        with pytest.raises(ValueError):
            EmpiricalDistribution([1.0, float("nan")])
