import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segal.acquisition import (
    DcauScore,
    ThresholdStats,
    WeightVector,
    adaptive_threshold,
    baseline_coreset_select,
    baseline_entropy_score,
    baseline_random_select,
    dcau_score,
    dynamic_pixel_uncertainty,
    dynamic_weights,
    mean_probability_features,
    pixel_entropy,
    select,
)
from segal.metrics import ClassIouReport
from segal.types import ProbMap

from conftest import random_distribution, random_probmap


def report_from_gaps(gaps, cycle=0):
    iou = tuple(None if g is None else 1.0 - g for g in gaps)
    defined = [v for v in iou if v is not None]
    return ClassIouReport(cycle, iou, tuple(gaps), float(np.mean(defined)) if defined else None)


def naive_image_score(probs: np.ndarray, dense_weights, variant="literal") -> float:
    """Reference oracle: per-pixel double loop, no vectorization."""
    h, w, k = probs.shape
    total = 0.0
    for yy in range(h):
        for xx in range(w):
            p = probs[yy, xx]
            ent = 0.0
            for c in range(k):
                ent -= p[c] * math.log(max(p[c], 1e-12))
            hdyn = 0.0
            for c in range(k):
                if variant == "literal":
                    hdyn += p[c] * dense_weights[c] * ent
                else:
                    hdyn -= dense_weights[c] * p[c] * math.log(max(p[c], 1e-12))
            total += hdyn
    return total / (h * w)


class TestDynamicWeights:
    def test_symmetric_gaps_any_alpha(self):
        for alpha in (0.25, 0.5, 1.0, 2.0):
            w = dynamic_weights(report_from_gaps((0.4, 0.4, 0.4)), alpha)
            assert np.allclose(w.weights, 1 / 3)

    def test_sqrt_example(self):
        w = dynamic_weights(report_from_gaps((0.75, 0.25)), alpha=0.5)
        # sqrt(0.75) / (sqrt(0.75) + sqrt(0.25))
        assert w.weights[0] == pytest.approx(0.633975, abs=1e-6)
        assert w.weights[1] == pytest.approx(0.366025, abs=1e-6)

    def test_alpha_one_identity_on_normalized_gaps(self):
        w = dynamic_weights(report_from_gaps((0.2, 0.3, 0.5)), alpha=1.0)
        assert np.allclose(w.weights, [0.2, 0.3, 0.5])

    def test_all_zero_gaps_fall_back_to_uniform(self):
        w = dynamic_weights(report_from_gaps((0.0, 0.0, 0.0, 0.0)), alpha=0.5)
        assert np.allclose(w.weights, 0.25)

    def test_undefined_class_gets_nan_weight(self):
        w = dynamic_weights(report_from_gaps((0.5, None, 0.5)), alpha=1.0)
        assert np.isnan(w.weights[1])
        assert w.dense[1] == 0.0
        assert w.weights[0] == pytest.approx(0.5)

    def test_no_defined_classes_is_an_error(self):
        with pytest.raises(ValueError, match="no defined classes"):
            dynamic_weights(report_from_gaps((None, None)), alpha=0.5)

    def test_alpha_must_be_positive(self):
        with pytest.raises(ValueError, match="alpha"):
            dynamic_weights(report_from_gaps((0.5, 0.5)), alpha=0.0)

    def test_simplex_over_fuzzed_gaps(self):
        rng = np.random.default_rng(99)
        for _ in range(250):
            k = int(rng.integers(2, 8))
            gaps = rng.random(k)
            for alpha in (0.25, 0.5, 1.0, 2.0):
                w = dynamic_weights(report_from_gaps(tuple(gaps)), alpha)
                assert float(np.nansum(w.weights)) == pytest.approx(1.0, abs=1e-9)
                assert np.nanmin(w.weights) >= 0.0

    def test_gap_order_preserved(self, rng):
        for _ in range(100):
            gaps = rng.random(4) + 1e-3
            for alpha in (0.25, 0.5, 1.0, 2.0):
                w = dynamic_weights(report_from_gaps(tuple(gaps)), alpha).weights
                order_gaps = np.argsort(gaps)
                order_w = np.argsort(w)
                assert np.array_equal(order_gaps, order_w)

    def test_alpha_sharpens_ratios(self):
        gaps = report_from_gaps((0.8, 0.2))
        ratios = []
        for alpha in (0.25, 0.5, 1.0, 2.0, 4.0):
            w = dynamic_weights(gaps, alpha).weights
            ratios.append(w[0] / w[1])
        assert all(b >= a for a, b in zip(ratios, ratios[1:]))


class TestPixelEntropy:
    def test_uniform_is_log_k(self):
        assert pixel_entropy([0.25] * 4) == pytest.approx(math.log(4), abs=1e-9)

    def test_one_hot_is_zero(self):
        assert pixel_entropy([0.0, 1.0, 0.0]) == 0.0

    def test_two_class_symmetric(self):
        assert pixel_entropy([0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_bounds(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 10))
        p = random_distribution(rng, k)
        h = pixel_entropy(p)
        assert -1e-12 <= h <= math.log(k) + 1e-9


class TestDynamicPixelUncertainty:
    def test_factored_example(self):
        w = WeightVector(np.array([0.8, 0.2]), alpha=1.0, cycle=0)
        value = dynamic_pixel_uncertainty([0.5, 0.5], w)
        assert value == pytest.approx(math.log(2) * 0.5, abs=1e-9)

    def test_uniform_weights_divide_entropy_by_k(self, rng):
        k = 5
        w = WeightVector.uniform(k)
        p = random_distribution(rng, k)
        assert dynamic_pixel_uncertainty(p, w) == pytest.approx(pixel_entropy(p) / k, abs=1e-12)

    def test_one_hot_is_zero(self):
        w = WeightVector(np.array([0.3, 0.7]), alpha=1.0, cycle=0)
        assert dynamic_pixel_uncertainty([1.0, 0.0], w) == pytest.approx(0.0, abs=1e-15)

    def test_literal_equals_factored_form(self, rng):
        # sum_k p_k w_k H(p) computed literally vs H(p) * <w>_p
        for _ in range(200):
            k = int(rng.integers(2, 7))
            p = random_distribution(rng, k)
            raw = rng.random(k)
            w = WeightVector(raw / raw.sum(), alpha=1.0, cycle=0)
            literal = dynamic_pixel_uncertainty(p, w, "literal")
            factored = pixel_entropy(p) * float((p * w.dense).sum())
            assert abs(literal - factored) <= 1e-12

    def test_weighted_logsum_variant(self, rng):
        k = 4
        p = random_distribution(rng, k)
        raw = rng.random(k)
        w = WeightVector(raw / raw.sum(), alpha=1.0, cycle=0)
        expected = -sum(w.dense[c] * p[c] * math.log(max(p[c], 1e-12)) for c in range(k))
        assert dynamic_pixel_uncertainty(p, w, "weighted_logsum") == pytest.approx(expected, abs=1e-12)


class TestDcauScore:
    def test_mean_of_pixel_values(self):
        # two pixels engineered to H_dyn = 0.2 and 0.4; with weights (1, 0)
        # the pixel uncertainty is p0 * H(p), increasing in p0 up to ~0.7
        w = WeightVector(np.array([1.0, 0.0]), alpha=1.0, cycle=0)

        def pixel_with_hdyn(target):
            lo, hi = 0.01, 0.69
            for _ in range(200):
                mid = (lo + hi) / 2
                if dynamic_pixel_uncertainty([mid, 1 - mid], w) < target:
                    lo = mid
                else:
                    hi = mid
            return (lo + hi) / 2

        p1 = pixel_with_hdyn(0.2)
        p2 = pixel_with_hdyn(0.4)
        probs = np.array([[[p1, 1 - p1], [p2, 1 - p2]]])
        pm = ProbMap("x", probs)
        score = dcau_score(pm, w)
        assert score.score == pytest.approx(0.3, abs=1e-6)
        assert score.num_pixels == 2

    def test_one_hot_map_scores_zero(self):
        probs = np.zeros((2, 2, 3))
        probs[:, :, 1] = 1.0
        score = dcau_score(ProbMap("x", probs), WeightVector.uniform(3))
        assert score.score == 0.0

    def test_matches_naive_double_loop(self, rng):
        for i in range(10):
            pm = random_probmap(rng, f"pm{i}", 6, 5, 4)
            raw = rng.random(4)
            w = WeightVector(raw / raw.sum(), alpha=0.5, cycle=0)
            for variant in ("literal", "weighted_logsum"):
                fast = dcau_score(pm, w, variant).score
                slow = naive_image_score(np.asarray(pm.probs), w.dense, variant)
                assert fast == pytest.approx(slow, abs=1e-9)

    def test_uniform_weights_match_entropy_over_k(self, rng):
        pm = random_probmap(rng, "pm", 8, 8, 5)
        uniform = dcau_score(pm, WeightVector.uniform(5)).score
        entropy = baseline_entropy_score(pm).score
        assert uniform == pytest.approx(entropy / 5, rel=1e-12)

    def test_pixel_map_retention(self, rng):
        pm = random_probmap(rng, "pm", 4, 4, 3)
        w = WeightVector.uniform(3)
        kept = dcau_score(pm, w, keep_pixel_map=True)
        dropped = dcau_score(pm, w)
        assert dropped.pixel_dyn is None
        assert kept.pixel_dyn is not None
        assert kept.score == pytest.approx(float(kept.pixel_dyn.mean()), abs=1e-12)


class TestBaselineEntropy:
    def test_uniform_map(self):
        probs = np.full((3, 3, 4), 0.25)
        assert baseline_entropy_score(ProbMap("x", probs)).score == pytest.approx(
            math.log(4), abs=1e-9
        )

    def test_one_hot_map(self):
        probs = np.zeros((2, 2, 4))
        probs[:, :, 0] = 1.0
        assert baseline_entropy_score(ProbMap("x", probs)).score == 0.0

    def test_ranking_matches_uniform_weighted_scores(self, rng):
        # argsort equality over a pool of 100 random maps
        maps = [random_probmap(rng, f"pm{i:03d}", 4, 4, 5) for i in range(100)]
        uniform = WeightVector.uniform(5)
        dcau_order = sorted(maps, key=lambda m: (-dcau_score(m, uniform).score, m.id))
        entropy_order = sorted(maps, key=lambda m: (-baseline_entropy_score(m).score, m.id))
        assert [m.id for m in dcau_order] == [m.id for m in entropy_order]


class TestAdaptiveThreshold:
    def test_population_sigma_example(self):
        scores = [DcauScore(f"s{i}", v, 1) for i, v in enumerate((0.1, 0.2, 0.3))]
        stats = adaptive_threshold(scores, gamma=0.5)
        assert stats.mean == pytest.approx(0.2, abs=1e-12)
        assert stats.std == pytest.approx(math.sqrt(0.02 / 3), abs=1e-7)
        assert stats.theta == pytest.approx(0.2408248, abs=1e-7)
        assert stats.theta == stats.mean + stats.gamma * stats.std

    def test_gamma_zero_gives_mean(self):
        scores = [DcauScore(f"s{i}", v, 1) for i, v in enumerate((0.1, 0.2, 0.3))]
        assert adaptive_threshold(scores, 0.0).theta == pytest.approx(0.2, abs=1e-12)

    def test_single_score(self):
        stats = adaptive_threshold([DcauScore("s", 0.42, 1)], gamma=3.0)
        assert stats.std == 0.0
        assert stats.theta == pytest.approx(0.42)

    def test_empty_pool(self):
        with pytest.raises(ValueError, match="empty pool"):
            adaptive_threshold([], 0.5)

    def test_candidates_shrink_as_gamma_grows(self, rng):
        scores = [DcauScore(f"s{i:02d}", float(v), 1) for i, v in enumerate(rng.random(40))]
        sizes = []
        for gamma in (0.0, 0.25, 0.5, 1.0, 2.0):
            stats = adaptive_threshold(scores, gamma)
            sizes.append(len(select(scores, stats, 5).candidate_ids))
        assert all(b <= a for a, b in zip(sizes, sizes[1:]))


class TestSelect:
    def scores(self):
        return [DcauScore("a", 0.1, 1), DcauScore("b", 0.2, 1), DcauScore("c", 0.3, 1)]

    def test_fill_below_threshold(self):
        stats = adaptive_threshold(self.scores(), gamma=0.5)
        result = select(self.scores(), stats, k=2)
        assert result.candidate_ids == ("c",)
        assert result.selected_ids == ("c", "b")
        assert result.filled_below_threshold == 1

    def test_whole_pool_when_k_large(self):
        stats = adaptive_threshold(self.scores(), gamma=0.0)
        result = select(self.scores(), stats, k=10)
        assert result.selected_ids == ("c", "b", "a")

    def test_tie_break_ascending_id(self):
        scores = [DcauScore("zz", 0.5, 1), DcauScore("aa", 0.5, 1), DcauScore("mm", 0.5, 1)]
        stats = adaptive_threshold(scores, 0.0)
        assert select(scores, stats, 1).selected_ids == ("aa",)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError, match="k must be"):
            select(self.scores(), None, 0)

    def test_no_stats_is_plain_top_k(self):
        result = select(self.scores(), None, 2)
        assert result.selected_ids == ("c", "b")
        assert result.filled_below_threshold == 0

    def test_scaling_leaves_selection_unchanged(self, rng):
        base = [DcauScore(f"s{i:02d}", float(v), 1) for i, v in enumerate(rng.random(30))]
        stats = adaptive_threshold(base, 0.5)
        baseline = select(base, stats, 7)
        for c in (0.1, 7.3):
            scaled = [DcauScore(s.sample_id, s.score * c, 1) for s in base]
            scaled_stats = adaptive_threshold(scaled, 0.5)
            assert scaled_stats.mean == pytest.approx(stats.mean * c, rel=1e-12)
            assert scaled_stats.std == pytest.approx(stats.std * c, rel=1e-9)
            assert scaled_stats.theta == pytest.approx(stats.theta * c, rel=1e-12)
            result = select(scaled, scaled_stats, 7)
            assert set(result.candidate_ids) == set(baseline.candidate_ids)
            assert result.selected_ids == baseline.selected_ids


class TestRandomSelect:
    def test_whole_pool(self):
        ids = [f"s{i}" for i in range(5)]
        assert set(baseline_random_select(ids, 5, seed=0)) == set(ids)

    def test_deterministic(self):
        ids = [f"s{i}" for i in range(20)]
        assert baseline_random_select(ids, 5, seed=42) == baseline_random_select(ids, 5, seed=42)
        assert baseline_random_select(ids, 5, seed=42) != baseline_random_select(ids, 5, seed=43)

    def test_k_zero(self):
        assert baseline_random_select(["a"], 0, seed=0) == ()


class TestCoresetSelect:
    def test_farthest_first_by_hand(self):
        features = {"x0": np.array([0.0]), "x1": np.array([1.0]), "x2": np.array([10.0])}
        assert baseline_coreset_select(features, ["x0"], 1) == ("x2",)

    def test_whole_pool(self):
        features = {f"s{i}": np.array([float(i)]) for i in range(4)}
        assert set(baseline_coreset_select(features, ["s0"], 3)) == {"s1", "s2", "s3"}

    def test_duplicate_features_pick_earliest_id(self):
        features = {"b": np.array([1.0]), "a": np.array([1.0]), "c": np.array([1.0])}
        assert baseline_coreset_select(features, [], 1) == ("a",)

    def test_empty_labeled_seeds_with_smallest_id(self):
        features = {"m": np.array([5.0]), "a": np.array([0.0]), "z": np.array([9.0])}
        picked = baseline_coreset_select(features, [], 2)
        assert picked[0] == "a"
        assert picked[1] == "z"  # farthest from a

    def test_mean_probability_features(self, rng):
        pm = random_probmap(rng, "pm", 4, 4, 3)
        feats = mean_probability_features(pm)
        assert feats.shape == (3,)
        assert float(feats.sum()) == pytest.approx(1.0, abs=1e-9)


class TestWeightVectorInvariants:
    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError, match="sum to 1"):
            WeightVector(np.array([0.5, 0.2]), alpha=1.0, cycle=0)

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="non-negative"):
            WeightVector(np.array([-0.5, 1.5]), alpha=1.0, cycle=0)

    def test_rejects_all_nan(self):
        with pytest.raises(ValueError, match="no defined classes"):
            WeightVector(np.array([np.nan, np.nan]), alpha=1.0, cycle=0)

    def test_threshold_stats_round_trip(self):
        stats = ThresholdStats(0.2, 0.05, 0.5, 0.225)
        assert ThresholdStats.from_dict(stats.to_dict()) == stats
