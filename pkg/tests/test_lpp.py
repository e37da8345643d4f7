import itertools
import math

import numpy as np
import pytest

from aginglab import lpp
from aginglab.rng import replica_stream
from aginglab.statcore import corr_direct, ks_statistic

SEED = 20260810


def enumerate_passage_time(weights):
    """Independent oracle: maximize the weight sum over all up-right paths."""
    w = np.asarray(weights, dtype=float)
    m, n = w.shape
    best = -math.inf
    # a path is a choice of which of the m+n-2 unit steps go up
    for ups in itertools.combinations(range(m + n - 2), n - 1):
        i = j = 0
        total = w[0, 0]
        for step in range(m + n - 2):
            if step in ups:
                j += 1
            else:
                i += 1
            total += w[i, j]
        best = max(best, total)
    return best


def regenerate_weight_table(seed, experiment, replica, size):
    """Replay the draws of diagonal_profile into an explicit weight table.

    Mirrors the sweep's consumption order: the boundary row first (scaled by
    the boundary mean, corner zeroed), then bulk rows in chunks with the
    first column scaled.
    """
    rng = replica_stream(seed, experiment, replica)
    cols = size + 1
    table = np.empty((cols, cols))
    w0 = rng.standard_exponential(cols, method="inv")
    w0 *= lpp.MEAN_BOUNDARY
    w0[0] = 0.0
    table[:, 0] = w0  # sweep rows are the second coordinate
    chunk_rows = max(1, lpp._ROW_CHUNK_DOUBLES // cols)
    row = 0
    while row < size:
        take = min(chunk_rows, size - row)
        w = rng.standard_exponential((take, cols), method="inv")
        w[:, 0] *= lpp.MEAN_BOUNDARY
        table[:, row + 1 : row + 1 + take] = w.T
        row += take
    return table


class TestReferenceDp:
    def test_hand_example(self):
        # both up-right paths to (1,1): max(1.0, 2.0) + 0.5 = 2.5
        w = np.array([[0.0, 2.0], [1.0, 0.5]])
        assert lpp.lpp_from_weights(w)[1, 1] == pytest.approx(2.5)

    def test_corner_is_zero_weight(self):
        w = np.zeros((3, 3))
        assert lpp.lpp_from_weights(w)[0, 0] == 0.0

    def test_against_path_enumeration(self):
        rng = np.random.default_rng(5)
        for _ in range(12):
            m, n = rng.integers(2, 6, size=2)
            w = rng.exponential(size=(m, n))
            table = lpp.lpp_from_weights(w)
            assert table[m - 1, n - 1] == pytest.approx(enumerate_passage_time(w), rel=1e-12)

    def test_monotone_in_each_coordinate(self):
        rng = np.random.default_rng(6)
        table = lpp.lpp_from_weights(rng.exponential(size=(12, 12)))
        assert np.all(np.diff(table, axis=0) >= 0.0)
        assert np.all(np.diff(table, axis=1) >= 0.0)


class TestDiagonalProfile:
    def test_matches_reference_dp_on_replayed_weights(self):
        marks = [3, 7, 11]
        rng = replica_stream(SEED, "lpp.replay", 4)
        vals = lpp.diagonal_profile(rng, marks)
        table = lpp.lpp_from_weights(regenerate_weight_table(SEED, "lpp.replay", 4, marks[-1]))
        for mark, val in zip(marks, vals):
            assert val == pytest.approx(table[mark, mark], rel=1e-12)

    def test_nested_diagonals_monotone(self):
        for rep in range(5):
            rng = replica_stream(SEED, "lpp.mono", rep)
            vals = lpp.diagonal_profile(rng, [5, 10, 20, 40])
            assert np.all(np.diff(vals) > 0.0)

    def test_rejects_bad_marks(self):
        rng = replica_stream(SEED, "lpp.bad", 0)
        with pytest.raises(ValueError):
            lpp.diagonal_profile(rng, [])
        with pytest.raises(ValueError):
            lpp.diagonal_profile(rng, [4, 2])
        with pytest.raises(ValueError):
            lpp.diagonal_profile(rng, [0, 3])

    def test_diagonal_pair_and_validation(self):
        cfg = lpp.LppConfig(n=6, a=2.0, seed=SEED, replicas=1)
        res = lpp.lpp_diagonal_pair(cfg)
        assert 0.0 <= res.L_small <= res.L_big
        again = lpp.lpp_diagonal_pair(cfg)
        assert (again.L_small, again.L_big) == (res.L_small, res.L_big)
        with pytest.raises(ValueError):
            lpp.LppConfig(n=0)
        with pytest.raises(ValueError):
            lpp.LppConfig(n=5, a=0.5)
        with pytest.raises(ValueError):
            lpp.LppReplicaResult(3.0, 2.0)

    def test_mean_growth_rate_stabilizes(self):
        # E L(n,n) = 4n exactly for the stationary model; check the empirical
        # ratio at n=1000 sits within 2% of the n=2000 one
        ens = lpp.diagonal_ensemble([1000, 2000], 24, SEED, workers=1, experiment="lpp.mean")
        r1 = ens[:, 0].mean() / 1000.0
        r2 = ens[:, 1].mean() / 2000.0
        assert abs(r1 / r2 - 1.0) <= 0.02
        assert r2 == pytest.approx(4.0, rel=0.02)


class TestBurkeIncrements:
    def test_positive(self):
        emp = lpp.burke_increments(5, 500, SEED)
        assert np.all(emp.samples > 0.0)

    def test_exponential_half_law(self):
        emp = lpp.burke_increments(20, 10**4, SEED)
        stat = ks_statistic(emp, lambda x: -np.expm1(-0.5 * x))
        assert stat <= 0.02
        assert 1.94 <= emp.samples.mean() <= 2.06

    def test_multiple_rows_pass(self):
        for i, n1 in enumerate((5, 50)):
            emp = lpp.burke_increments(n1, 4000, SEED, replica=i)
            stat = ks_statistic(emp, lambda x: -np.expm1(-0.5 * x))
            assert stat <= 1.63 / math.sqrt(4000) * 1.5


class TestAgingCorrelation:
    def test_ratio_one_is_exact(self):
        cfg = lpp.LppConfig(n=50, a=1.0, seed=SEED, replicas=200)
        est = lpp.lpp_aging_corr(cfg, workers=1)
        assert est.value == 1.0 and est.stderr == 0.0

    def test_replica_floor(self):
        with pytest.raises(ValueError, match="100"):
            lpp.lpp_aging_corr(lpp.LppConfig(n=50, a=2.0, seed=SEED, replicas=50), workers=1)

    @pytest.mark.slow
    def test_monotone_trend_in_ratio(self):
        n, reps = 200, 3000
        marks = [n, 300, 400, 800]
        ens = lpp.diagonal_ensemble(marks, reps, SEED, workers=2, experiment="lpp.trend")
        ests = {}
        for a, big in [(1.5, 300), (2.0, 400), (4.0, 800)]:
            ests[a] = corr_direct(ens[:, 0], ens[:, marks.index(big)])
        for lo, hi in [(1.5, 2.0), (2.0, 4.0)]:
            gap = ests[lo].value - ests[hi].value
            assert gap > 3.0 * math.hypot(ests[lo].stderr, ests[hi].stderr)


class TestIdentityCheck:
    def test_degenerate_limits(self):
        rows = lpp.lpp_tasep_identity_check(3, [0.05, 200.0], 300, SEED, workers=1)
        assert rows[0].p_lpp == 0.0 and rows[0].p_tasep == 0.0
        assert rows[1].p_lpp == 1.0 and rows[1].p_tasep == 1.0

    def test_small_n_guard(self):
        with pytest.raises(ValueError):
            lpp.lpp_tasep_identity_check(11, [1.0], 100, SEED)

    @pytest.mark.slow
    def test_distributions_agree_mid_range(self):
        rows = lpp.lpp_tasep_identity_check(3, [6.0, 12.0, 24.0], 20000, SEED, workers=2)
        for r in rows:
            assert r.gap_in_se() <= 3.0
