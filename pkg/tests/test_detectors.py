import math
import string

import numpy as np
import pytest
from scipy import stats

from insightmap import make_subspace
from insightmap.detectors import (
    detect_attribution,
    detect_change_point,
    detect_clustering,
    detect_correlation,
    detect_cross_measure_correlation,
    detect_outlier,
    detect_top_one,
    detect_trend,
    impact,
    normal_cdf,
    pearson_r,
    student_t_sf2,
    welch_t,
)


def series(values, labels=None):
    labels = labels or list(string.ascii_lowercase[:len(values)])
    return list(zip(labels, values))


class TestTopOne:
    def test_strong_leader_fires(self):
        hit = detect_top_one(series([100, 10, 9, 8]))
        assert hit is not None
        assert hit.payload["breakdown_value"] == "a"
        assert hit.payload["z"] == pytest.approx(91.0)

    def test_no_strict_max(self):
        assert detect_top_one(series([5, 5, 5, 5])) is None

    def test_weak_leader(self):
        assert detect_top_one(series([10, 9.9, 9.8, 9.7])) is None

    def test_too_short(self):
        assert detect_top_one(series([9, 1, 1])) is None

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            values = rng.normal(size=6)
            values[0] += 10
            hit = detect_top_one(series(values))
            rest = np.delete(values, int(np.argmax(values)))
            z = (values.max() - rest.mean()) / rest.std(ddof=1)
            if hit:
                assert hit.payload["z"] == pytest.approx(z, abs=1e-9)
                assert hit.significance == pytest.approx(
                    stats.norm.cdf(z), abs=1e-7)


class TestAttribution:
    def test_dominant_share(self):
        hit = detect_attribution(series([60, 20, 10, 10]))
        assert hit.payload["share"] == pytest.approx(0.6)
        assert hit.payload["breakdown_value"] == "a"

    def test_uniform_shares(self):
        assert detect_attribution(series([25, 25, 25, 25])) is None

    def test_boundary_tie_prefers_smaller_label(self):
        hit = detect_attribution([("b", 50), ("a", 50)])
        assert hit is not None
        assert hit.payload["share"] == pytest.approx(0.5)
        assert hit.payload["breakdown_value"] == "a"

    def test_negative_values_do_not_fire(self):
        assert detect_attribution(series([-1, 5])) is None


class TestChangePoint:
    def test_level_shift(self):
        hit = detect_change_point(series([1, 1, 1, 1, 10, 10, 10, 10]))
        assert hit is not None
        assert hit.payload["split_index"] == 4
        assert hit.payload["mean_before"] == pytest.approx(1.0)
        assert hit.payload["mean_after"] == pytest.approx(10.0)

    def test_monotone_ramp_does_not_fire(self):
        # oracle: best Welch p over all splits stays above 0.01
        values = [1, 2, 3, 4, 5, 6]
        best_p = min(
            stats.ttest_ind(values[:s], values[s:], equal_var=False).pvalue
            for s in range(2, len(values) - 1))
        assert best_p > 0.01
        assert detect_change_point(series(values)) is None

    def test_constant_series(self):
        assert detect_change_point(series([3] * 8)) is None

    def test_matches_scipy_welch(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            values = rng.normal(size=10)
            values[5:] += 4.0
            hit = detect_change_point(series(values))
            stats_by_split = []
            for s in range(2, len(values) - 1):
                res = stats.ttest_ind(values[:s], values[s:],
                                      equal_var=False)
                stats_by_split.append((abs(res.statistic), s, res.pvalue))
            best = max(stats_by_split, key=lambda t: t[0])
            if hit:
                assert hit.payload["split_index"] == best[1]
                assert hit.payload["t"] == pytest.approx(best[0], abs=1e-9)
                assert hit.payload["p"] == pytest.approx(best[2], abs=1e-9)


class TestOutlier:
    def test_spike_fires(self):
        hit = detect_outlier(series([1, 2, 1, 2, 50, 1, 2]))
        assert hit is not None
        assert hit.payload["breakdown_value"] == "e"
        assert hit.payload["max_z"] == pytest.approx(0.6745 * 48)

    def test_ramp_does_not_fire(self):
        values = [1, 2, 3, 4, 5]
        z = 0.6745 * np.abs(np.array(values) - 3.0) / 1.0
        assert z.max() == pytest.approx(1.349)
        assert detect_outlier(series(values)) is None

    def test_mad_zero_convention(self):
        hit = detect_outlier(series([2, 2, 2, 2, 9]))
        assert hit is not None
        assert hit.significance == 1.0
        assert hit.payload["outliers"] == ["e"]


class TestTrend:
    def test_perfect_line(self):
        hit = detect_trend(series([1, 2, 3, 4, 5]))
        assert hit is not None
        assert hit.payload["slope"] == pytest.approx(1.0)
        assert hit.payload["r"] == pytest.approx(1.0)
        assert hit.payload["direction"] == "increasing"

    def test_flat_series(self):
        assert detect_trend(series([3, 3, 3, 3, 3])) is None

    def test_weak_correlation(self):
        values = [1, 5, 2, 4, 3]
        r = stats.pearsonr(range(5), values).statistic
        assert abs(r) < 0.7
        assert detect_trend(series(values)) is None

    def test_matches_linregress(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            n = int(rng.integers(5, 12))
            values = np.arange(n) * rng.uniform(0.5, 2) + rng.normal(
                size=n, scale=0.1)
            hit = detect_trend(series(values))
            res = stats.linregress(np.arange(n), values)
            if hit:
                assert hit.payload["slope"] == pytest.approx(
                    res.slope, abs=1e-9)
                assert hit.payload["r"] == pytest.approx(
                    res.rvalue, abs=1e-9)
                assert hit.payload["p"] == pytest.approx(
                    res.pvalue, abs=1e-9)


class TestCorrelation:
    def test_exact_positive(self):
        hit = detect_correlation(series([1, 2, 3, 4, 5]),
                                 series([2, 4, 6, 8, 10]))
        assert hit.payload["r"] == pytest.approx(1.0)

    def test_exact_negative(self):
        hit = detect_correlation(series([1, 2, 3, 4, 5]),
                                 series([10, 8, 6, 4, 2]))
        assert hit.payload["r"] == pytest.approx(-1.0)

    def test_uncorrelated(self):
        a = [1, 2, 3, 4, 5]
        b = [1, -1, 1, -1, 1]
        assert abs(stats.pearsonr(a, b).statistic) < 0.8
        assert detect_correlation(series(a), series(b)) is None

    def test_alignment_on_shared_labels(self):
        a = series([1, 2, 3, 4, 5, 6])
        b = series([2, 4, 6, 8, 10], labels=["b", "c", "d", "e", "f"])
        hit = detect_correlation(a, b)
        assert hit is not None
        assert hit.payload["labels"] == ["b", "c", "d", "e", "f"]


class TestCrossMeasureCorrelation:
    def test_proportional_measures(self):
        hit = detect_cross_measure_correlation(
            series([1, 2, 3, 4, 5]), series([3, 6, 9, 12, 15]))
        assert hit.type == "CrossMeasureCorrelation"
        assert hit.payload["r"] == pytest.approx(1.0)

    def test_constant_measure_is_zero_r(self):
        assert detect_cross_measure_correlation(
            series([1, 2, 3, 4, 5]), series([7, 7, 7, 7, 7])) is None

    def test_inverse_measures(self):
        hit = detect_cross_measure_correlation(
            series([1, 2, 3, 4, 5]), series([5, 4, 3, 2, 1]))
        assert hit.payload["r"] == pytest.approx(-1.0)


class TestClustering:
    def test_two_blobs(self):
        hit = detect_clustering(series([0.9, 1.0, 1.1, 9.8, 10.0, 10.2]))
        assert hit is not None
        assert hit.payload["gap"] == pytest.approx(8.7)
        assert hit.payload["low_cluster"] == ["a", "b", "c"]
        assert hit.payload["high_cluster"] == ["d", "e", "f"]

    def test_uniform_gaps(self):
        assert detect_clustering(series([1, 2, 3, 4, 5, 6])) is None

    def test_singleton_cluster_rejected(self):
        assert detect_clustering(series([1, 10, 11, 12])) is None


class TestImpact:
    def test_full_coverage(self, t4):
        assert impact(t4, make_subspace(t4, [])) == 1.0

    def test_row_based(self, t4):
        assert impact(t4, make_subspace(t4, [("color", "red")])) == 0.5

    def test_measure_based(self, t4):
        sub = make_subspace(t4, [("color", "red")])
        assert impact(t4, sub, "val") == pytest.approx(0.3)


class TestSharedStatistics:
    def test_normal_cdf_accuracy(self):
        for z in np.linspace(-5, 5, 41):
            assert normal_cdf(z) == pytest.approx(
                stats.norm.cdf(z), abs=1e-7)

    def test_t_pvalue_accuracy(self):
        for df in (1, 2, 5, 10, 30):
            for t in (0.0, 0.5, 1.5, 3.0, 8.0):
                expected = 2 * stats.t.sf(t, df)
                assert student_t_sf2(t, df) == pytest.approx(
                    expected, abs=1e-8)

    def test_pearson_matches_scipy(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            x = rng.normal(size=10)
            y = rng.normal(size=10)
            assert pearson_r(x, y) == pytest.approx(
                stats.pearsonr(x, y).statistic, abs=1e-12)


class TestInvariantProperties:
    DETECTORS = [
        detect_top_one, detect_attribution, detect_outlier,
        detect_clustering, detect_trend, detect_change_point,
    ]

    def test_scale_covariance(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            values = np.abs(rng.normal(size=8)) + 0.1
            values[0] *= 20
            for c in (0.5, 3.0, 1000.0):
                for fn in self.DETECTORS:
                    base = fn(series(values))
                    scaled = fn(series(values * c))
                    assert (base is None) == (scaled is None)

    def test_label_permutation_for_order_free_detectors(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            values = np.abs(rng.normal(size=7)) + 0.1
            values[3] *= 25
            perm = rng.permutation(7)
            labels = list(string.ascii_lowercase[:7])
            shuffled = [(labels[i], float(values[i])) for i in perm]
            for fn in (detect_top_one, detect_attribution, detect_outlier,
                       detect_clustering):
                base = fn(series(values))
                permuted = fn(shuffled)
                assert (base is None) == (permuted is None)

    def test_determinism(self):
        rng = np.random.default_rng(10)
        values = rng.normal(size=9)
        for fn in self.DETECTORS:
            assert fn(series(values)) == fn(series(values))
