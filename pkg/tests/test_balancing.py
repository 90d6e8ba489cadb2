import numpy as np
import pytest

from dube import rng
from dube.balancing import (InterCBStrategy, IntraCBStrategy, batch_errors,
                            error_histogram, hem_weights, normalize_error,
                            prediction_error, resample_step, shem_weights,
                            target_class_size, weighted_resample)


class TestTargetClassSize:
    def test_toy_configuration(self):
        counts = [15, 3]
        assert target_class_size(counts, InterCBStrategy("RUS")) == 3
        assert target_class_size(counts, InterCBStrategy("ROS")) == 15
        assert target_class_size(counts, InterCBStrategy("RHS")) == 9

    def test_already_balanced(self):
        for tag in ("RUS", "ROS", "RHS"):
            assert target_class_size([50, 50], InterCBStrategy(tag)) == 50

    def test_fold_scale_counts(self):
        counts = [1971, 58]
        assert target_class_size(counts, InterCBStrategy("RUS")) == 58
        assert target_class_size(counts, InterCBStrategy("ROS")) == 1971
        assert target_class_size(counts, InterCBStrategy("RHS")) == 1014

    def test_permutation_invariance(self):
        gen = np.random.default_rng(0)
        for _ in range(25):
            counts = gen.integers(1, 500, size=gen.integers(2, 6))
            perm = gen.permutation(counts)
            for tag in ("RUS", "ROS", "RHS"):
                strat = InterCBStrategy(tag)
                assert target_class_size(counts, strat) == target_class_size(perm, strat)

    def test_bad_strategy_tag(self):
        with pytest.raises(ValueError):
            InterCBStrategy("SMOTE")


class TestPredictionError:
    def test_perfect_prediction(self):
        assert prediction_error([1.0, 0.0], 0) == 0.0

    def test_binary_substitution(self):
        assert prediction_error([0.8, 0.2], 0) == pytest.approx(0.4, abs=1e-12)

    def test_three_class_substitution(self):
        assert prediction_error([0.1, 0.7, 0.2], 1) == pytest.approx(0.6, abs=1e-12)

    def test_identity_with_true_class_probability(self):
        gen = np.random.default_rng(1)
        for _ in range(200):
            m = int(gen.integers(2, 6))
            p = gen.dirichlet(np.ones(m))
            y = int(gen.integers(0, m))
            assert prediction_error(p, y) == pytest.approx(2 * (1 - p[y]), abs=1e-9)

    def test_invalid_probability_vector(self):
        with pytest.raises(ValueError):
            prediction_error([0.7, 0.7], 0)
        with pytest.raises(ValueError):
            prediction_error([1.2, -0.2], 0)

    def test_label_out_of_range(self):
        with pytest.raises(ValueError):
            prediction_error([0.5, 0.5], 2)


class TestNormalizeError:
    @pytest.mark.parametrize("raw,expected", [(0.0, 0.0), (2.0, 1.0), (0.4, 0.2)])
    def test_values(self, raw, expected):
        assert normalize_error(raw) == expected

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            normalize_error(2.5)
        with pytest.raises(ValueError):
            normalize_error(-0.1)


class TestErrorHistogram:
    def test_counting_example(self):
        hist = error_histogram([0.05, 0.05, 0.45, 0.95], 5)
        assert hist.density.tolist() == [0.5, 0.0, 0.25, 0.0, 0.25]

    def test_degenerate_single_value(self):
        hist = error_histogram([0.31] * 7, 10)
        assert hist.density.sum() == 1.0
        assert hist.density[3] == 1.0

    def test_top_edge_closes_into_last_bin(self):
        hist = error_histogram([1.0], 4)
        assert hist.density.tolist() == [0.0, 0.0, 0.0, 1.0]

    def test_uniform_errors_law_of_large_numbers(self):
        gen = rng.stream(123, 99)
        errors = gen.random(1000)
        hist = error_histogram(errors, 10)
        assert np.abs(hist.density - 0.1).max() <= 0.05
        # seeded draw checked against a direct per-bin count
        for i in range(10):
            lo, hi = i / 10, (i + 1) / 10
            direct = ((errors >= lo) & (errors < hi)).sum() if i < 9 else \
                ((errors >= lo) & (errors <= hi)).sum()
            assert hist.density[i] == direct / 1000

    def test_density_sums_to_one(self):
        gen = np.random.default_rng(5)
        for _ in range(50):
            errors = gen.random(int(gen.integers(1, 60)))
            hist = error_histogram(errors, int(gen.integers(1, 12)))
            assert abs(hist.density.sum() - 1.0) < 1e-9

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            error_histogram([], 5)


class TestHemWeights:
    def test_proportional_to_error(self):
        w = hem_weights([0.2, 0.4])
        assert w.tolist() == [0.2, 0.4]
        probs = w / w.sum()
        assert np.allclose(probs, [1 / 3, 2 / 3])

    def test_all_zero_fallback_uniform(self):
        assert hem_weights([0.0, 0.0, 0.0]).tolist() == [1.0, 1.0, 1.0]

    def test_singleton(self):
        assert hem_weights([0.7]).tolist() == [0.7]

    def test_strict_monotonicity(self):
        gen = np.random.default_rng(2)
        errors = gen.random(100)
        w = hem_weights(errors)
        for i, j in gen.integers(0, 100, size=(200, 2)):
            if errors[i] > errors[j]:
                assert w[i] > w[j]

    def test_negative_error_rejected(self):
        with pytest.raises(ValueError):
            hem_weights([0.1, -0.2])


class TestShemWeights:
    def test_inverse_density_example(self):
        w = shem_weights([0.05, 0.05, 0.45, 0.95], 5)
        assert w.tolist() == [2.0, 2.0, 4.0, 4.0]

    def test_single_bin_degrades_to_uniform(self):
        # all errors share one bin, so its density is 1 and weights are 1
        w = shem_weights([0.11, 0.12, 0.13], 10)
        assert w.tolist() == [1.0, 1.0, 1.0]

    def test_b1_uniform_regardless_of_errors(self):
        w = shem_weights([0.0, 0.3, 0.9, 1.0], 1)
        assert w.tolist() == [1.0, 1.0, 1.0, 1.0]

    def test_same_bin_same_weight_and_reciprocal_identity(self):
        gen = np.random.default_rng(3)
        errors = gen.random(200)
        b = 7
        w = shem_weights(errors, b)
        hist = np.minimum((errors * b).astype(int), b - 1)
        for bin_id in np.unique(hist):
            in_bin = w[hist == bin_id]
            assert (in_bin == in_bin[0]).all()
            density = (hist == bin_id).sum() / errors.size
            assert in_bin[0] == 1.0 / density
            assert in_bin[0] * density == pytest.approx(1.0, abs=1e-12)


class TestWeightedResample:
    def test_noop_resample_returns_all_rows(self):
        rows = np.array([4, 7, 9])
        out = weighted_resample(rows, np.ones(3), 3, seed=0)
        assert sorted(out.tolist()) == [4, 7, 9]

    def test_singleton_oversample(self):
        out = weighted_resample(np.array([5]), np.array([2.0]), 4, seed=1)
        assert out.tolist() == [5, 5, 5, 5]

    def test_monte_carlo_matches_analytic_probability(self):
        rows = np.array([0, 1])
        weights = np.array([1.0, 3.0])
        hits = 0
        trials = 40_000
        for seed in range(trials):
            hits += weighted_resample(rows, weights, 1, seed=seed)[0]
        assert abs(hits / trials - 0.75) <= 0.01

    def test_shrink_returns_distinct_rows(self):
        gen = np.random.default_rng(4)
        rows = np.arange(30)
        for seed in range(20):
            weights = gen.random(30) + 0.01
            out = weighted_resample(rows, weights, 12, seed=seed)
            assert out.size == 12
            assert np.unique(out).size == 12

    def test_grow_contains_every_original(self):
        rows = np.array([3, 6, 9])
        out = weighted_resample(rows, np.array([1.0, 1.0, 5.0]), 10, seed=7)
        assert out.size == 10
        assert set(rows.tolist()) <= set(out.tolist())

    def test_zero_weight_rows_drawn_last(self):
        rows = np.arange(6)
        weights = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
        out = weighted_resample(rows, weights, 3, seed=5)
        assert set(out.tolist()) == {0, 1, 2}

    def test_determinism(self):
        rows = np.arange(50)
        weights = np.linspace(0.1, 2.0, 50)
        a = weighted_resample(rows, weights, 20, seed=9)
        b = weighted_resample(rows, weights, 20, seed=9)
        assert np.array_equal(a, b)

    def test_all_zero_weights_rejected(self):
        with pytest.raises(ValueError, match="all-zero"):
            weighted_resample(np.array([1, 2]), np.zeros(2), 1, seed=0)


class TestResampleStep:
    def test_rus_uniform_step_sizes(self):
        labels = np.repeat([0, 1], [12, 4])
        class_index = (np.arange(12), np.arange(12, 16))
        probs = np.full((16, 2), 0.5)
        n, per_class, plan, _ = resample_step(
            labels, class_index, probs, InterCBStrategy("RUS"),
            IntraCBStrategy("Uniform"), seed=3)
        assert n == 4
        assert all(rows.size == 4 for rows in per_class)
        assert np.unique(per_class[0]).size == 4  # distinct under-sample

    def test_per_class_zero_weight_fallback(self):
        # class 0 predicted perfectly -> all its HEM weights are zero
        labels = np.repeat([0, 1], [6, 3])
        class_index = (np.arange(6), np.arange(6, 9))
        probs = np.zeros((9, 2))
        probs[:6, 0] = 1.0
        probs[6:, 0] = 1.0  # class 1 rows fully wrong -> weight 1
        n, per_class, _, _ = resample_step(
            labels, class_index, probs, InterCBStrategy("RUS"),
            IntraCBStrategy("HEM"), seed=1)
        assert per_class[0].size == n == 3

    def test_batch_errors_match_scalar_op(self):
        gen = np.random.default_rng(6)
        probs = gen.dirichlet(np.ones(3), size=40)
        labels = gen.integers(0, 3, 40)
        batch = batch_errors(probs, labels)
        for i in range(40):
            scalar = normalize_error(prediction_error(probs[i], int(labels[i])))
            assert batch[i] == pytest.approx(scalar, abs=1e-12)
