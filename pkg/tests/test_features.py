import numpy as np
import pytest

from cspca.dataio import DataMatrix, SyntheticSpec, center_features, generate_synthetic
from cspca.features import (
    max_variance_ranking,
    project,
    restrict_to_features,
    score_features,
    select_top_k,
)
from cspca.norms import ProjectionMatrix
from cspca.solver import SolverConfig, solve


class TestScoreFeatures:
    def test_identity_scores(self):
        ranking = score_features(ProjectionMatrix(np.eye(4)))
        assert np.allclose(ranking.scores, 1.0)
        assert ranking.order.tolist() == [0, 1, 2, 3]

    def test_dominant_row(self):
        values = np.zeros((4, 4))
        values[2, 0], values[2, 1] = 3.0, 4.0
        ranking = score_features(ProjectionMatrix(values))
        assert ranking.order[0] == 2
        assert ranking.scores[2] == 5.0

    def test_matches_loop_and_sort_oracle(self, rng):
        W = ProjectionMatrix(rng.standard_normal((6, 6)))
        ranking = score_features(W)
        for i in range(6):
            assert ranking.scores[i] == pytest.approx(
                np.sqrt((W.values[i] ** 2).sum()), rel=1e-14)
        expected_order = sorted(range(6), key=lambda i: (-ranking.scores[i], i))
        assert ranking.order.tolist() == expected_order

    def test_scores_sorted_descending_by_order(self, rng):
        ranking = score_features(ProjectionMatrix(rng.standard_normal((8, 8))))
        ordered = ranking.scores[ranking.order]
        assert np.all(np.diff(ordered) <= 0)
        assert sorted(ranking.order.tolist()) == list(range(8))


class TestSelectTopK:
    def test_k_equals_d(self, rng):
        ranking = score_features(ProjectionMatrix(rng.standard_normal((5, 5))))
        assert sorted(select_top_k(ranking, 5)) == list(range(5))

    def test_k_one_dominant(self):
        values = np.zeros((4, 4))
        values[2, 0] = 9.0
        ranking = score_features(ProjectionMatrix(values))
        assert select_top_k(ranking, 1) == [2]

    def test_matches_brute_force(self, rng):
        W = ProjectionMatrix(rng.standard_normal((7, 7)))
        ranking = score_features(W)
        pairs = sorted(enumerate(ranking.scores), key=lambda t: (-t[1], t[0]))
        for k in range(1, 8):
            assert select_top_k(ranking, k) == [i for i, _ in pairs[:k]]

    def test_nesting(self, rng):
        ranking = score_features(ProjectionMatrix(rng.standard_normal((6, 6))))
        for k1 in range(1, 7):
            for k2 in range(k1, 7):
                assert set(select_top_k(ranking, k1)) <= set(select_top_k(ranking, k2))

    def test_k_out_of_range(self, rng):
        ranking = score_features(ProjectionMatrix(np.eye(3)))
        with pytest.raises(ValueError):
            select_top_k(ranking, 0)
        with pytest.raises(ValueError):
            select_top_k(ranking, 4)


class TestProject:
    def test_identity_no_mean(self, rng):
        x = rng.standard_normal(5)
        assert np.array_equal(project(ProjectionMatrix(np.eye(5)), x), x)

    def test_zero_projection(self, rng):
        x = rng.standard_normal(4)
        assert np.all(project(ProjectionMatrix(np.zeros((4, 4))), x) == 0.0)

    def test_matches_loop_oracle(self, rng):
        W = ProjectionMatrix(rng.standard_normal((4, 4)))
        x = rng.standard_normal(4)
        result = project(W, x)
        for j in range(4):
            expected = sum(W.values[i, j] * x[i] for i in range(4))
            assert result[j] == pytest.approx(expected, rel=1e-12)

    def test_mean_subtraction(self, rng):
        W = ProjectionMatrix(rng.standard_normal((3, 3)))
        x = rng.standard_normal(3)
        mean = rng.standard_normal(3)
        assert np.allclose(project(W, x, mean), W.values.T @ (x - mean))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            project(ProjectionMatrix(np.eye(3)), np.ones(4))
        with pytest.raises(ValueError):
            project(ProjectionMatrix(np.eye(3)), np.ones(3), mean=np.ones(2))


class TestRestrictToFeatures:
    def test_all_features_unchanged(self, rng):
        X = DataMatrix(rng.standard_normal((4, 6)))
        sub = restrict_to_features(X, range(4))
        assert np.array_equal(sub.values, X.values)

    def test_single_row(self, rng):
        X = DataMatrix(rng.standard_normal((3, 5)))
        sub = restrict_to_features(X, [0])
        assert sub.values.shape == (1, 5)
        assert np.array_equal(sub.values[0], X.values[0])

    def test_preserves_given_order(self, rng):
        X = DataMatrix(rng.standard_normal((5, 7)),
                       feature_names=[f"f{i}" for i in range(5)])
        sub = restrict_to_features(X, [3, 0, 4])
        assert np.array_equal(sub.values, X.values[[3, 0, 4]])
        assert sub.feature_names == ["f3", "f0", "f4"]

    def test_empty_or_out_of_range(self, rng):
        X = DataMatrix(rng.standard_normal((3, 5)))
        with pytest.raises(ValueError):
            restrict_to_features(X, [])
        with pytest.raises(ValueError):
            restrict_to_features(X, [0, 3])


class TestMaxVariance:
    def test_constant_feature_scores_zero(self):
        X = DataMatrix(np.array([[5.0, 5.0, 5.0], [1.0, 2.0, 3.0]]))
        ranking = max_variance_ranking(X)
        assert ranking.scores[0] == 0.0
        assert ranking.order[0] == 1

    def test_two_point_variance(self):
        X = DataMatrix(np.array([[0.0, 2.0]]))
        ranking = max_variance_ranking(X)
        assert ranking.scores[0] == pytest.approx(2.0, rel=1e-15)

    def test_matches_two_pass_loop(self, rng):
        X = DataMatrix(rng.standard_normal((5, 12)))
        ranking = max_variance_ranking(X)
        for i in range(5):
            row = X.values[i]
            mean = row.sum() / row.size
            var = ((row - mean) ** 2).sum() / (row.size - 1)
            assert ranking.scores[i] == pytest.approx(var, rel=1e-12)


class TestRankingProperties:
    def test_column_permutation_invariance(self, rng):
        W = rng.standard_normal((6, 6))
        perm = rng.permutation(6)
        s1 = score_features(ProjectionMatrix(W)).scores
        s2 = score_features(ProjectionMatrix(W[:, perm])).scores
        assert np.allclose(s1, s2, atol=1e-15)

    def test_positive_scaling_preserves_order(self, rng):
        W = rng.standard_normal((7, 7))
        base = score_features(ProjectionMatrix(W))
        for c in (2.0, 3.7):
            scaled = score_features(ProjectionMatrix(c * W))
            assert np.allclose(scaled.scores, c * base.scores, rtol=1e-12)
            assert np.array_equal(scaled.order, base.order)


class TestEndToEndRecovery:
    def test_informative_features_recovered(self):
        # light version of the corrupted-recovery experiment; the acceptance
        # suite runs the full ten-seed comparison against max-variance
        hits = []
        for seed in (0, 1, 2):
            spec = SyntheticSpec(150, 5, 50, 6, 10.0, 0.5, 0.1, seed=seed)
            X, _, informative = generate_synthetic(spec)
            Xc, _ = center_features(X)
            result = solve(Xc, SolverConfig(alpha=4.0, beta=4.0, max_iter=200))
            top = set(select_top_k(score_features(result.W), 5))
            hits.append(len(top & set(informative)) / 5.0)
        assert np.mean(hits) >= 0.9
