import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigpal import (
    NEG,
    POS,
    UNLABELED,
    CsvFormatError,
    DatasetError,
    DegenerateDataError,
    PartiallyLabeledDataset,
    center,
    cluster_index,
    load_csv,
    rotate_to_diagonal,
    write_csv,
)


def make(X, labels):
    return PartiallyLabeledDataset(np.asarray(X, float), np.asarray(labels, np.int8))


class TestDatasetInvariants:
    def test_counts_and_theta(self):
        ds = make([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0], [7.0, 8.0]], [POS, NEG, 0, 0])
        assert (ds.n, ds.d) == (4, 2)
        assert (ds.n_labeled, ds.n_unlabeled) == (2, 2)
        assert ds.theta == 2 / 4

    def test_rejects_nonfinite(self):
        with pytest.raises(DatasetError, match="row 1, column 0"):
            make([[1.0, 2.0], [np.inf, 0.0]], [0, 0])

    def test_rejects_bad_labels(self):
        with pytest.raises(DatasetError):
            make([[1.0], [2.0]], [2, 0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(DatasetError):
            make([[1.0], [2.0]], [0, 0, 0])

    def test_rejects_single_row(self):
        with pytest.raises(DatasetError):
            make([[1.0, 2.0]], [0])

    def test_immutable(self):
        ds = make([[1.0], [2.0]], [0, 0])
        with pytest.raises(ValueError):
            ds.X[0, 0] = 9.0


class TestCsv:
    def test_load_basic(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("x1,x2,label\n1.0,2.0,+1\n3.0,4.0,-1\n5.0,6.0,NA\n7.0,8.0,NA\n")
        ds = load_csv(path)
        assert (ds.n, ds.d, ds.n_labeled) == (4, 2, 2)
        assert ds.theta == 0.5
        assert list(ds.labels) == [POS, NEG, UNLABELED, UNLABELED]
        np.testing.assert_array_equal(ds.X[0], [1.0, 2.0])

    def test_headerless_defaults_to_last_column(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("1.0,2.0,1\n3.0,4.0,-1\n")
        ds = load_csv(path)
        assert list(ds.labels) == [POS, NEG]

    def test_label_column_by_index(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("+1,1.0,2.0\n-1,3.0,4.0\n")
        ds = load_csv(path, label_column=0)
        assert list(ds.labels) == [POS, NEG]
        np.testing.assert_array_equal(ds.X[1], [3.0, 4.0])

    def test_bad_label_names_row(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("x1,label\n1.0,+1\n2.0,2\n")
        with pytest.raises(CsvFormatError, match="row 1"):
            load_csv(path)

    def test_bad_covariate_names_cell(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("x1,x2,label\n1.0,2.0,+1\n3.0,oops,-1\n")
        with pytest.raises(CsvFormatError, match="row 1, column 1"):
            load_csv(path)

    def test_all_unlabeled_is_valid(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("x1,label\n1.0,NA\n2.0,\n")
        ds = load_csv(path)
        assert ds.n_labeled == 0
        assert ds.theta == 0.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "nope.csv")

    def test_too_few_rows(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("x1,label\n1.0,NA\n")
        with pytest.raises(CsvFormatError, match="at least 2"):
            load_csv(path)

    def test_scientific_notation(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("x1,label\n1e-3,NA\n-2.5E+2,NA\n")
        ds = load_csv(path)
        np.testing.assert_array_equal(ds.X[:, 0], [1e-3, -250.0])

    def test_round_trip_exact(self, tmp_path, rng):
        X = rng.standard_normal((7, 3)) * 10.0 ** rng.integers(-8, 8, size=(7, 3))
        labels = np.array([POS, NEG, 0, 0, POS, 0, NEG], dtype=np.int8)
        ds = PartiallyLabeledDataset(X, labels)
        path = tmp_path / "roundtrip.csv"
        write_csv(ds, path)
        back = load_csv(path)
        np.testing.assert_array_equal(back.X, ds.X)
        np.testing.assert_array_equal(back.labels, ds.labels)

    @settings(max_examples=25, deadline=None)
    @given(
        st.lists(
            st.lists(
                st.floats(
                    allow_nan=False,
                    allow_infinity=False,
                    min_value=-1e12,
                    max_value=1e12,
                ),
                min_size=2,
                max_size=2,
            ),
            min_size=2,
            max_size=6,
        )
    )
    def test_round_trip_property(self, tmp_path_factory, rows):
        X = np.asarray(rows, float)
        labels = np.zeros(X.shape[0], dtype=np.int8)
        labels[0] = POS
        ds = PartiallyLabeledDataset(X, labels)
        path = tmp_path_factory.mktemp("rt") / "data.csv"
        write_csv(ds, path)
        back = load_csv(path)
        np.testing.assert_array_equal(back.X, ds.X)


class TestCenter:
    def test_hand_case(self):
        ds = make([[1.0], [3.0]], [0, 0])
        centered, mean = center(ds)
        np.testing.assert_array_equal(centered.X, [[-1.0], [1.0]])
        np.testing.assert_array_equal(mean, [2.0])

    def test_idempotent(self, rng):
        ds = make(rng.standard_normal((5, 3)), np.zeros(5, np.int8))
        once, _ = center(ds)
        twice, _ = center(once)
        np.testing.assert_allclose(twice.X, once.X, atol=1e-12)

    def test_wide_data_means_vanish(self, rng):
        ds = make(rng.standard_normal((2, 300)), np.zeros(2, np.int8))
        centered, _ = center(ds)
        assert np.abs(centered.X.mean(axis=0)).max() < 1e-12

    def test_labels_unchanged(self, rng):
        labels = np.array([POS, NEG, 0, 0], dtype=np.int8)
        ds = make(rng.standard_normal((4, 2)), labels)
        centered, _ = center(ds)
        np.testing.assert_array_equal(centered.labels, labels)


class TestRotation:
    def test_axis_aligned_gives_signed_permutation(self, rng):
        # exactly diagonal sample covariance with distinct variances:
        # orthogonalize centered columns, then scale them apart
        raw = rng.standard_normal((30, 3))
        q, _ = np.linalg.qr(raw - raw.mean(axis=0))
        X = q * np.array([5.0, 2.0, 0.5])
        ds = make(X, np.zeros(30, np.int8))
        rot = rotate_to_diagonal(ds).rotation
        for j in range(3):
            col = np.abs(rot[:, j])
            assert np.isclose(col.max(), 1.0, atol=1e-10)
            assert np.sum(col > 1e-10) == 1

    def test_rotated_covariance_diagonal(self, rng):
        base = rng.standard_normal((40, 2))
        X = base @ np.array([[1.0, 0.8], [0.0, 0.6]])  # correlated sample
        ds = make(X, np.zeros(40, np.int8))
        res = rotate_to_diagonal(ds)
        cov = res.rotated.X.T @ res.rotated.X / 39
        lam1 = np.diag(cov).max()
        off = np.abs(cov - np.diag(np.diag(cov))).max()
        assert off < 1e-8 * lam1

    def test_variances_nonincreasing(self, rng):
        ds = make(rng.standard_normal((20, 5)) * [1, 3, 9, 0.1, 2], np.zeros(20, np.int8))
        rotated = rotate_to_diagonal(ds).rotated
        variances = rotated.X.var(axis=0, ddof=1)
        assert np.all(np.diff(variances) <= 1e-12)

    def test_preserves_pairwise_distances(self, rng):
        X = rng.standard_normal((15, 4))
        ds = make(X, np.zeros(15, np.int8))
        rotated = rotate_to_diagonal(ds).rotated.X

        def pdists(M):
            diff = M[:, None, :] - M[None, :, :]
            return np.sqrt((diff**2).sum(-1))

        np.testing.assert_allclose(pdists(rotated), pdists(X), rtol=1e-9)

    def test_ci_invariant_under_rotation(self, rng):
        X = rng.standard_normal((12, 3))
        ds = make(X, np.zeros(12, np.int8))
        clusters = np.array([1, 2] * 6)
        before = cluster_index(X, clusters)
        after = cluster_index(rotate_to_diagonal(ds).rotated.X, clusters)
        assert abs(after - before) < 1e-9 * before

    def test_degenerate_data_raises(self):
        ds = make([[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]], [0, 0, 0])
        with pytest.raises(DegenerateDataError):
            rotate_to_diagonal(ds)

    def test_labels_carried_through(self, rng):
        labels = np.array([POS, 0, NEG, 0], dtype=np.int8)
        ds = make(rng.standard_normal((4, 2)), labels)
        np.testing.assert_array_equal(rotate_to_diagonal(ds).rotated.labels, labels)
