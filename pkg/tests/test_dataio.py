import numpy as np
import pytest

from cspca.dataio import (
    DataError,
    DataMatrix,
    SyntheticSpec,
    center_features,
    generate_synthetic,
    load_csv,
    load_labels,
    load_results,
    save_matrix,
    save_results,
)
from cspca.evaluation import accuracy, kmeans
from cspca.features import FeatureRanking
from cspca.norms import ObjectiveValue
from cspca.solver import SolverTrace


class TestDataMatrix:
    def test_rejects_nan(self):
        with pytest.raises(DataError, match="NaN or infinite"):
            DataMatrix(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_rejects_single_sample(self):
        with pytest.raises(DataError, match="at least 2 samples"):
            DataMatrix(np.array([[1.0], [2.0]]))

    def test_rejects_wrong_name_count(self):
        with pytest.raises(DataError, match="feature names"):
            DataMatrix(np.ones((3, 4)), feature_names=["a", "b"])

    def test_shape_properties(self):
        X = DataMatrix(np.ones((3, 5)))
        assert X.d == 3 and X.n == 5


class TestLoadCsv:
    def test_samples_as_rows_shape(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("1,2,3,4\n5,6,7,8\n9,10,11,12\n")
        X = load_csv(p, has_header=False, samples_as="rows")
        assert (X.d, X.n) == (4, 3)
        assert X.values[0, 0] == 1.0 and X.values[3, 2] == 12.0

    def test_samples_as_columns_shape(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("1,2,3\n4,5,6\n")
        X = load_csv(p, has_header=False, samples_as="columns")
        assert (X.d, X.n) == (2, 3)

    def test_non_numeric_cell_reports_position(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1,2\nabc,4\n5,6\n")
        with pytest.raises(DataError, match=r"row 2, column 1"):
            load_csv(p, has_header=False, samples_as="rows")

    def test_header_offsets_error_row(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b\n1,2\nx,4\n")
        with pytest.raises(DataError, match=r"row 3, column 1"):
            load_csv(p, has_header=True, samples_as="rows")

    def test_ragged_rows_rejected(self, tmp_path):
        p = tmp_path / "ragged.csv"
        p.write_text("1,2,3\n4,5\n")
        with pytest.raises(DataError, match="cells"):
            load_csv(p, has_header=False, samples_as="rows")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            load_csv(tmp_path / "nope.csv", has_header=False, samples_as="rows")

    def test_header_becomes_feature_names(self, tmp_path):
        p = tmp_path / "named.csv"
        p.write_text("alpha,beta\n1,2\n3,4\n")
        X = load_csv(p, has_header=True, samples_as="rows")
        assert X.feature_names == ["alpha", "beta"]

    def test_fewer_than_two_samples(self, tmp_path):
        p = tmp_path / "one.csv"
        p.write_text("1,2,3\n")
        with pytest.raises(DataError):
            load_csv(p, has_header=False, samples_as="rows")


class TestRoundTrip:
    @pytest.mark.parametrize("orientation", ["rows", "columns"])
    def test_save_then_load_is_identity(self, tmp_path, rng, orientation):
        for trial in range(5):
            values = rng.standard_normal((4, 7)) * 10.0 ** rng.integers(-8, 9)
            X = DataMatrix(values)
            p = tmp_path / f"m{trial}_{orientation}.csv"
            save_matrix(X, p, samples_as=orientation, include_header=False)
            back = load_csv(p, has_header=False, samples_as=orientation)
            assert np.array_equal(back.values, X.values)

    def test_header_round_trip(self, tmp_path, rng):
        X = DataMatrix(rng.standard_normal((3, 5)),
                       feature_names=["f0", "f1", "f2"])
        p = tmp_path / "h.csv"
        save_matrix(X, p, samples_as="rows", include_header=True)
        back = load_csv(p, has_header=True, samples_as="rows")
        assert back.feature_names == X.feature_names
        assert np.array_equal(back.values, X.values)


class TestCenterFeatures:
    def test_two_point_symmetry(self):
        X = DataMatrix(np.array([[1.0, 3.0], [2.0, 2.0]]))
        centered, mean = center_features(X)
        assert np.array_equal(centered.values, [[-1.0, 1.0], [0.0, 0.0]])
        assert np.array_equal(mean, [2.0, 2.0])

    def test_idempotent(self, rng):
        X = DataMatrix(rng.standard_normal((4, 9)))
        once, _ = center_features(X)
        twice, mean2 = center_features(once)
        assert np.allclose(twice.values, once.values, atol=1e-14)
        assert np.all(np.abs(mean2) <= 1e-12)

    def test_row_means_vanish(self, rng):
        X = DataMatrix(rng.standard_normal((5, 20)) * 100.0)
        centered, _ = center_features(X)
        assert np.all(np.abs(centered.values.sum(axis=1)) <= 1e-10)


class TestGenerateSynthetic:
    def test_deterministic(self):
        spec = SyntheticSpec(50, 4, 6, 3, 8.0, 0.5, 0.1, seed=11)
        X1, y1, info1 = generate_synthetic(spec)
        X2, y2, info2 = generate_synthetic(spec)
        assert np.array_equal(X1.values, X2.values)
        assert np.array_equal(y1, y2)
        assert info1 == info2

    def test_clean_separable_data_clusters_perfectly(self):
        spec = SyntheticSpec(40, 3, 0, 2, 10.0, 0.0, 0.0, seed=3)
        X, truth, _ = generate_synthetic(spec)
        pred = kmeans(X, 2, seed=0)
        assert accuracy(pred, truth) == 1.0

    def test_feature_count(self):
        spec = SyntheticSpec(30, 5, 50, 3, 8.0, 0.5, 0.0, seed=0)
        X, _, info = generate_synthetic(spec)
        assert X.d == 55
        assert info == list(range(5))

    def test_label_range_and_balance(self):
        spec = SyntheticSpec(31, 2, 0, 3, 5.0, 0.0, 0.0, seed=1)
        _, labels, _ = generate_synthetic(spec)
        counts = np.bincount(labels, minlength=3)
        assert counts.sum() == 31 and counts.min() >= 10

    def test_outliers_replace_columns(self):
        base = SyntheticSpec(50, 3, 2, 2, 8.0, 0.3, 0.0, seed=5)
        corrupted = SyntheticSpec(50, 3, 2, 2, 8.0, 0.3, 0.2, seed=5)
        Xc, _, _ = generate_synthetic(base)
        Xo, _, _ = generate_synthetic(corrupted)
        changed = np.flatnonzero(np.any(Xc.values != Xo.values, axis=0))
        assert changed.size == 10

    def test_invalid_spec(self):
        with pytest.raises(DataError):
            SyntheticSpec(10, 3, 0, 2, 5.0, 0.0, 1.0, seed=0)
        with pytest.raises(DataError):
            SyntheticSpec(10, 0, 5, 2, 5.0, 0.0, 0.0, seed=0)
        with pytest.raises(DataError):
            SyntheticSpec(10, 3, 0, 1, 5.0, 0.0, 0.0, seed=0)


class TestSaveResults:
    def test_trace_totals_in_order(self, tmp_path):
        objs = [ObjectiveValue(loss=float(i), l21_penalty=1.0, trace_penalty=1.0,
                               total=float(i) + 2.0, alpha=1.0, beta=1.0)
                for i in (3, 2, 1)]
        trace = SolverTrace(objectives=objs, iterations=2, converged=True,
                            stop_reason="tolerance_reached")
        p = tmp_path / "trace.json"
        save_results(trace, p)
        data = load_results(p)
        assert [o["total"] for o in data["objectives"]] == [5.0, 4.0, 3.0]

    def test_ranking_round_trip_exact(self, tmp_path, rng):
        scores = rng.standard_normal(6) ** 2
        order = np.argsort(-scores, kind="stable")
        ranking = FeatureRanking(scores=scores, order=order)
        p = tmp_path / "rank.json"
        save_results(ranking, p)
        data = load_results(p)
        assert data["scores"] == scores.tolist()
        assert data["order"] == order.tolist()

    def test_unwritable_path_leaves_nothing(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        target = blocker / "sub" / "out.json"
        with pytest.raises(DataError, match="cannot write"):
            save_results({"a": 1}, target)
        assert not target.exists()
        assert list(tmp_path.iterdir()) == [blocker]


class TestLoadLabels:
    def test_reads_column(self, tmp_path):
        p = tmp_path / "y.csv"
        p.write_text("0\n1\n1\n0\n")
        assert load_labels(p).tolist() == [0, 1, 1, 0]

    def test_rejects_non_integer(self, tmp_path):
        p = tmp_path / "y.csv"
        p.write_text("0\nfoo\n")
        with pytest.raises(DataError, match="row 2"):
            load_labels(p)
