import numpy as np
import pytest

from cspca.dataio import DataMatrix
from cspca.pca import check_equivalence, classical_pca, lowrank_regression_fit


def random_orthonormal(rng, d, k):
    return np.linalg.qr(rng.standard_normal((d, k)))[0]


class TestClassicalPca:
    def test_rank_one_line(self):
        direction = np.array([1.0, 1.0]) / np.sqrt(2.0)
        X = DataMatrix(np.outer(direction, [1.0, -2.0, 3.0, 0.5]))
        model = classical_pca(X, 1)
        assert np.allclose(np.abs(model.components[:, 0]), direction, atol=1e-12)

    def test_full_rank_reconstruction(self, rng):
        X = DataMatrix(rng.standard_normal((4, 10)))
        model = classical_pca(X, 4)
        U = model.components
        assert np.allclose(U @ (U.T @ X.values), X.values, atol=1e-10)

    def test_explained_variance_matches_eigensolve(self, rng):
        X = DataMatrix(rng.standard_normal((6, 30)))
        model = classical_pca(X, 2)
        lam = np.sort(np.linalg.eigvalsh(X.values @ X.values.T))[::-1]
        assert np.allclose(model.singular_values**2, lam[:2], rtol=1e-9)

    def test_components_orthonormal_and_sorted(self, rng):
        X = DataMatrix(rng.standard_normal((5, 20)))
        model = classical_pca(X, 3)
        gram = model.components.T @ model.components
        assert np.allclose(gram, np.eye(3), atol=1e-10)
        assert np.all(np.diff(model.singular_values) <= 1e-12)

    def test_sign_convention(self, rng):
        X = DataMatrix(rng.standard_normal((5, 15)))
        model = classical_pca(X, 4)
        for j in range(4):
            col = model.components[:, j]
            assert col[np.argmax(np.abs(col))] > 0

    def test_k_out_of_range(self, rng):
        X = DataMatrix(rng.standard_normal((3, 8)))
        with pytest.raises(ValueError):
            classical_pca(X, 0)
        with pytest.raises(ValueError):
            classical_pca(X, 4)


class TestLowrankRegression:
    def test_full_rank_gives_identity(self, rng):
        X = DataMatrix(rng.standard_normal((4, 12)))
        W = lowrank_regression_fit(X, 4)
        assert np.allclose(W.values, np.eye(4), atol=1e-10)

    def test_rank_one_data_reconstructed(self):
        direction = np.array([2.0, -1.0, 0.5])
        direction /= np.linalg.norm(direction)
        X = DataMatrix(np.outer(direction, [1.0, 3.0, -2.0]))
        W = lowrank_regression_fit(X, 1)
        assert np.allclose(W.values.T @ X.values, X.values, atol=1e-10)

    def test_symmetric_idempotent_rank_k(self, rng):
        X = DataMatrix(rng.standard_normal((6, 25)))
        k = 3
        W = lowrank_regression_fit(X, k).values
        assert np.allclose(W, W.T, atol=1e-9)
        assert np.allclose(W @ W, W, atol=1e-9)
        sv = np.linalg.svd(W, compute_uv=False)
        assert np.all(np.abs(sv[:k] - 1.0) <= 1e-9)
        assert np.all(np.abs(sv[k:]) <= 1e-9)

    def test_beats_200_random_projectors(self, rng):
        X = DataMatrix(rng.standard_normal((6, 20)))
        k = 2
        W = lowrank_regression_fit(X, k)
        best = np.linalg.norm(W.values.T @ X.values - X.values) ** 2
        for _ in range(200):
            P = random_orthonormal(rng, 6, k)
            candidate = P @ P.T
            err = np.linalg.norm(candidate.T @ X.values - X.values) ** 2
            assert best <= err + 1e-9

    def test_reconstruction_error_formula(self, rng):
        X = DataMatrix(rng.standard_normal((5, 18)))
        sv = np.linalg.svd(X.values, compute_uv=False)
        for k in range(1, 5):
            W = lowrank_regression_fit(X, k)
            err = np.linalg.norm(W.values.T @ X.values - X.values)
            expected = np.sqrt((sv[k:] ** 2).sum())
            assert err == pytest.approx(expected, rel=1e-9, abs=1e-9)


class TestEquivalence:
    def test_random_instances_all_k(self, rng):
        for _ in range(50):
            d = int(rng.integers(3, 16))
            n = int(rng.integers(5, 61))
            X = DataMatrix(rng.standard_normal((d, n)))
            bound = 1e-8 * (1.0 + np.linalg.norm(X.values))
            for k in range(1, min(d, n) + 1):
                report = check_equivalence(X, k)
                assert report.max_deviation <= bound

    def test_rank_one_exact(self):
        X = DataMatrix(np.outer([1.0, 2.0], [3.0, -1.0, 0.5]))
        report = check_equivalence(X, 1)
        assert report.pca_projection_error <= 1e-10
        assert report.regression_projection_error <= 1e-10

    def test_full_k_lossless(self, rng):
        X = DataMatrix(rng.standard_normal((4, 9)))
        report = check_equivalence(X, 4)
        assert report.pca_projection_error <= 1e-9
        assert report.regression_projection_error <= 1e-9
