import math

import numpy as np
import pytest
from scipy import integrate

from aginglab.closedform import (
    AgingPoint,
    EwQuery,
    aging_table,
    bessel_i,
    ew_correlation,
    ew_variance,
    gauss_cdf,
    gauss_pdf,
    kpz_fp_correlation,
    rho_ew,
    rho_kpz,
    rw_abs_expectation,
)


class TestAgingFunctions:
    def test_exact_values(self):
        assert rho_kpz(1.0) == pytest.approx(1.0, abs=1e-14)
        assert rho_kpz(2.0) == pytest.approx(2.0 ** (-2.0 / 3.0), abs=1e-14)
        assert rho_ew(1.0) == pytest.approx(1.0, abs=1e-14)
        assert rho_ew(2.0) == pytest.approx(2.0 ** (-3.0 / 4.0), abs=1e-14)

    def test_domain(self):
        for fn in (rho_kpz, rho_ew):
            with pytest.raises(ValueError):
                fn(0.999)

    def test_strictly_decreasing_on_grid(self):
        grid = np.exp(np.linspace(0.0, math.log(1e6), 10**4))
        for fn in (rho_kpz, rho_ew):
            vals = np.array([fn(a) for a in grid])
            assert vals[0] == pytest.approx(1.0, abs=1e-12)
            assert np.all(np.diff(vals) < 0.0)
            assert np.all((0.0 < vals) & (vals <= 1.0))

    def test_large_a_asymptotics(self):
        # EW: 2 a^(1/4) rho_ew(a) - 1 = 1/(sqrt(a) + sqrt(a-1)) ~ 5e-4 at a = 1e6
        assert abs(2.0 * 1e6**0.25 * rho_ew(1e6) - 1.0) <= 1e-3
        # KPZ: the gap is (2/3) a^(-1/3) + O(a^(-4/3)), i.e. 6.67e-3 at a = 1e6
        gap = 2.0 * 1e6 ** (1.0 / 3.0) * rho_kpz(1e6) - 1.0
        assert gap == pytest.approx((2.0 / 3.0) * 1e-2, abs=1e-8)

    def test_fixed_point_correlation(self):
        assert kpz_fp_correlation(1.0, 1.0) == 1.0
        assert kpz_fp_correlation(3.0, 6.0) == pytest.approx(rho_kpz(2.0), rel=1e-14)
        # ratio invariance: independent of the first time for fixed ratio
        vals = {kpz_fp_correlation(s, 2.5 * s) for s in (0.1, 1.0, 7.0, 1e4)}
        assert max(vals) - min(vals) <= 1e-12
        with pytest.raises(ValueError):
            kpz_fp_correlation(0.0, 1.0)
        with pytest.raises(ValueError):
            kpz_fp_correlation(2.0, 1.0)

    def test_aging_table(self):
        pts = aging_table("kpz", [1.0, 2.0, 4.0])
        assert [p.a for p in pts] == [1.0, 2.0, 4.0]
        assert pts[1].value == pytest.approx(rho_kpz(2.0))
        with pytest.raises(ValueError):
            aging_table("nope", [1.0])
        with pytest.raises(ValueError):
            AgingPoint(0.5, 0.5)


class TestGaussians:
    def test_heat_kernel_at_origin(self):
        assert gauss_pdf(1.0, 0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-14)
        with pytest.raises(ValueError):
            gauss_pdf(0.0, 1.0)

    def test_cdf_symmetry_point(self):
        assert gauss_cdf(0.0) == 0.5

    def test_cdf_against_quadrature(self):
        for y in (0.3, 1.0, 1.959964, 2.5):
            val, err = integrate.quad(lambda z: gauss_pdf(1.0, z), -12.0, y)
            assert gauss_cdf(y) == pytest.approx(val, abs=max(1e-12, 2 * err))
        assert gauss_cdf(1.959964) == pytest.approx(0.975, abs=1e-6)


class TestEwVariance:
    def test_time_zero(self):
        for x in (-2.5, 0.0, 0.7):
            assert ew_variance(0.0, x) == abs(x)

    def test_origin_value(self):
        assert ew_variance(1.0, 0.0) == pytest.approx(2.0 / math.sqrt(2.0 * math.pi), rel=1e-14)

    def test_diffusive_scaling(self):
        assert ew_variance(4.0, 1.0) == pytest.approx(2.0 * ew_variance(1.0, 0.5), rel=1e-13)

    def test_integral_representation(self):
        # Var U(t,x) = |x| + int_0^t p(s,x) ds
        for t, x in [(1.0, 0.0), (2.0, 1.0), (0.7, -1.3)]:
            integral, err = integrate.quad(lambda s: gauss_pdf(s, x), 0.0, t, points=[0.0])
            assert ew_variance(t, x) == pytest.approx(abs(x) + integral, abs=max(1e-10, 5 * err))

    def test_pde_time_derivative(self):
        # d/dt Var U = p(t, x), central differences at step 1e-5
        h = 1e-5
        for t in (0.5, 1.0, 2.0):
            for x in (0.0, 1.0, 3.0):
                fd = (ew_variance(t + h, x) - ew_variance(t - h, x)) / (2.0 * h)
                assert fd == pytest.approx(gauss_pdf(t, x), rel=1e-6)

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            ew_variance(-0.1, 0.0)


class TestEwCorrelation:
    def test_matches_aging_function_on_grid(self):
        for a in np.linspace(1.0, 100.0, 100):
            got = ew_correlation(EwQuery(1.0, float(a), 0.0, 0.0))
            assert got == pytest.approx(rho_ew(float(a)), abs=1e-12)

    def test_diffusive_scaling_identity(self):
        q = EwQuery(1.0, 3.0, 0.4, -1.1)
        base = ew_correlation(q)
        for s in (2.0, 10.0):
            scaled = ew_correlation(EwQuery(s * q.a, s * q.b, q.x * math.sqrt(s), q.y * math.sqrt(s)))
            assert scaled == pytest.approx(base, abs=1e-12)

    def test_same_point(self):
        assert ew_correlation(EwQuery(1.0, 1.0, 0.8, 0.8)) == 1.0

    def test_query_validation(self):
        with pytest.raises(ValueError):
            EwQuery(0.0, 1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            EwQuery(2.0, 1.0, 0.0, 0.0)


def bessel_series(k, t, terms=30):
    # truncated power series: I_k(t) = sum_m (t/2)^(2m+k) / (m! (m+k)!)
    total = 0.0
    for m in range(terms):
        total += (t / 2.0) ** (2 * m + k) / (math.factorial(m) * math.factorial(m + k))
    return total


class TestBessel:
    def test_at_zero(self):
        assert bessel_i(0, 0.0) == 1.0
        assert bessel_i(3, 0.0) == 0.0

    def test_against_series_oracle(self):
        for k in (0, 1, 2, 5):
            for t in (0.1, 1.0, 3.0, 8.0):
                assert bessel_i(k, t) == pytest.approx(bessel_series(k, t), rel=1e-10)
        assert bessel_i(1, 1.0) == pytest.approx(0.565159, abs=1e-6)

    def test_negative_order_symmetry(self):
        assert bessel_i(-3, 2.0) == bessel_i(3, 2.0)

    def test_walk_normalization(self):
        # probabilities of the rate-1 symmetric walk sum to one
        for t in (0.5, 1.0, 2.0, 4.0, 16.0):
            span = int(t + 12.0 * math.sqrt(t) + 20.0)
            total = sum(math.exp(-t) * bessel_i(j, t) for j in range(-span, span + 1))
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_rejects_negative_argument(self):
        with pytest.raises(ValueError):
            bessel_i(0, -1.0)


class TestWalkAbsExpectation:
    def test_time_zero(self):
        for k in (-7, 0, 3):
            assert rw_abs_expectation(0.0, k) == abs(k)

    def test_origin_value_frozen(self):
        # recomputed from the scaled-Bessel series before freezing
        assert rw_abs_expectation(1.0, 0) == pytest.approx(0.6736700229, abs=1e-9)

    def test_against_direct_convolution(self):
        from scipy import special as sp

        j = np.arange(-300, 301)
        for t, k in [(1.0, 0), (1.0, 3), (4.0, 10), (7.3, -4)]:
            oracle = float(np.sum(np.abs(j) * sp.ive(np.abs(j - k), t)))
            assert rw_abs_expectation(t, k) == pytest.approx(oracle, rel=1e-12)

    def test_clt_limit(self):
        # E|X_t| / sqrt(t) -> sqrt(2/pi): variance t, Gaussian limit
        ratio = rw_abs_expectation(400.0, 0) / (20.0 * math.sqrt(2.0 / math.pi))
        assert ratio == pytest.approx(1.0, abs=0.02)

    def test_monotone_in_time_at_origin(self):
        ts = np.linspace(0.0, 30.0, 120)
        vals = [rw_abs_expectation(float(t), 0) for t in ts]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_dominates_start_distance(self):
        for t in (0.5, 2.0, 9.0):
            for k in (0, 2, 11):
                assert rw_abs_expectation(t, k) >= abs(k) - 1e-12
