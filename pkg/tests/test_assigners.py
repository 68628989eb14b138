import numpy as np
import pytest
from numpy.random import default_rng

from sigpal import (
    NEG,
    POS,
    AssignerSpec,
    Direction,
    InfeasibleConstraintsError,
    PartiallyLabeledDataset,
    SigPalError,
    ZeroDirectionError,
    assign_by_direction,
    brute_force_min_ci,
    cop_kmeans,
    derive_constraints,
    l1_lda_fit,
    run_assigner,
    s3lda_fit,
    two_means,
)
from sigpal.assigners import _s3lda_objective


def blobs(rng, n_per=5, gap=10.0, d=2):
    X = np.vstack(
        [rng.normal(-gap / 2, 1.0, (n_per, d)), rng.normal(gap / 2, 1.0, (n_per, d))]
    )
    return X


def dataset(X, labels=None):
    if labels is None:
        labels = np.zeros(X.shape[0], dtype=np.int8)
    return PartiallyLabeledDataset(X, np.asarray(labels, np.int8))


class TestAssignerSpec:
    def test_rejects_unknown_kind(self):
        with pytest.raises(SigPalError):
            AssignerSpec(kind="kmedoids")

    def test_dict_round_trip_accepts_hyphens(self):
        spec = AssignerSpec.from_dict({"kind": "cop-kmeans", "restarts": 3})
        assert spec.kind == "cop_kmeans"
        assert spec.restarts == 3
        assert AssignerSpec.from_dict(spec.to_dict()) == spec

    def test_validates_counts(self):
        with pytest.raises(SigPalError):
            AssignerSpec(kind="two_means", restarts=0)


class TestTwoMeans:
    def test_matches_enumeration_on_separated_blobs(self, rng):
        X = blobs(rng)
        spec = AssignerSpec(kind="two_means", restarts=50)
        result = two_means(X, spec, default_rng(0))
        oracle, oracle_ci = brute_force_min_ci(X)
        np.testing.assert_array_equal(result.clusters, oracle.clusters)
        np.testing.assert_allclose(result.ci, oracle_ci, rtol=1e-12)

    def test_two_points(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0]])
        result = two_means(X, AssignerSpec(kind="two_means"), default_rng(0))
        assert result.ci == 0.0
        assert sorted(result.clusters) == [1, 2]

    def test_deterministic_given_seed(self, rng):
        X = rng.standard_normal((20, 4))
        spec = AssignerSpec(kind="two_means", restarts=5)
        a = two_means(X, spec, default_rng(11))
        b = two_means(X, spec, default_rng(11))
        np.testing.assert_array_equal(a.clusters, b.clusters)
        assert a.ci == b.ci

    def test_lloyd_objective_monotone(self, rng):
        X = rng.standard_normal((30, 3))
        trace: list = []
        two_means(X, AssignerSpec(kind="two_means", restarts=4), default_rng(2), _trace=trace)
        assert len(trace) == 4
        for run in trace:
            assert all(b <= a + 1e-9 for a, b in zip(run, run[1:]))

    def test_cluster_one_contains_row_zero(self, rng):
        X = rng.standard_normal((10, 2))
        result = two_means(X, AssignerSpec(kind="two_means"), default_rng(3))
        assert result.clusters[0] == 1


class TestDeriveConstraints:
    def test_definition(self):
        must, cannot = derive_constraints(np.array([POS, POS, NEG, 0], dtype=np.int8))
        assert must == [(0, 1)]
        assert sorted(cannot) == [(0, 2), (1, 2)]

    def test_all_unlabeled(self):
        must, cannot = derive_constraints(np.zeros(5, dtype=np.int8))
        assert must == [] and cannot == []

    def test_single_labeled_row(self):
        must, cannot = derive_constraints(np.array([POS, 0, 0], dtype=np.int8))
        assert must == [] and cannot == []


class TestCopKmeans:
    def test_fully_labeled_returns_labels(self, rng):
        X = rng.standard_normal((8, 3))
        labels = np.array([POS, NEG, POS, NEG, POS, NEG, POS, NEG], dtype=np.int8)
        result = cop_kmeans(dataset(X, labels), AssignerSpec(kind="cop_kmeans"), default_rng(0))
        expected = np.where(labels == POS, 1, 2)
        np.testing.assert_array_equal(result.clusters, expected)

    def test_unlabeled_reduces_to_two_means(self, rng):
        X = rng.standard_normal((15, 3))
        spec_t = AssignerSpec(kind="two_means", restarts=6)
        spec_c = AssignerSpec(kind="cop_kmeans", restarts=6)
        a = two_means(X, spec_t, default_rng(21))
        b = cop_kmeans(dataset(X), spec_c, default_rng(21))
        np.testing.assert_array_equal(a.clusters, b.clusters)
        assert a.ci == b.ci

    def test_constraints_always_satisfied(self, rng):
        for seed in range(10):
            gen = default_rng(seed)
            X = gen.standard_normal((20, 4))
            labels = np.zeros(20, dtype=np.int8)
            labels[gen.choice(20, 6, replace=False)] = [POS, POS, POS, NEG, NEG, NEG]
            result = cop_kmeans(
                dataset(X, labels), AssignerSpec(kind="cop_kmeans"), default_rng(100 + seed)
            )
            must, cannot = derive_constraints(labels)
            for i, j in must:
                assert result.clusters[i] == result.clusters[j]
            for i, j in cannot:
                assert result.clusters[i] != result.clusters[j]

    def test_positive_component_is_cluster_one(self, rng):
        X = rng.standard_normal((12, 2))
        labels = np.zeros(12, dtype=np.int8)
        labels[0], labels[1] = POS, NEG
        result = cop_kmeans(dataset(X, labels), AssignerSpec(kind="cop_kmeans"), default_rng(5))
        assert result.clusters[0] == 1
        assert result.clusters[1] == 2

    def test_constraints_bind_in_mixture_regime(self):
        # mixture with a modest gap: the observed labels constrain the fit,
        # so the constrained optimum sits at or above the free 2-means CI
        # (strictly above in most seeds: some labeled rows always land on the
        # "wrong" side of the free split).  The power gain of the labeled
        # test comes from the null side, where random labels raise the null
        # CIs even more; see the engine tests.
        strictly_above = 0
        trials = 20
        for seed in range(trials):
            gen = default_rng(seed)
            n = 100
            signs = gen.integers(0, 2, n) * 2 - 1
            X = gen.standard_normal((n, 2)) + np.outer(signs, [0.5, 0.0])
            labels = np.zeros(n, dtype=np.int8)
            for value in (POS, NEG):
                pool = np.flatnonzero(signs == value)
                labels[gen.choice(pool, min(25, pool.size), replace=False)] = value
            cop = cop_kmeans(dataset(X, labels), AssignerSpec(kind="cop_kmeans"), default_rng(seed))
            plain = two_means(X, AssignerSpec(kind="two_means"), default_rng(seed))
            assert cop.ci >= plain.ci - 1e-12
            strictly_above += cop.ci > plain.ci
        assert strictly_above >= trials // 2

    def test_single_class_only_infeasible(self, rng):
        X = rng.standard_normal((4, 2))
        labels = np.array([POS, POS, POS, POS], dtype=np.int8)
        with pytest.raises(InfeasibleConstraintsError):
            cop_kmeans(dataset(X, labels), AssignerSpec(kind="cop_kmeans"), default_rng(0))

    def test_weighted_lloyd_monotone(self, rng):
        X = rng.standard_normal((25, 3))
        labels = np.zeros(25, dtype=np.int8)
        labels[:4], labels[4:8] = POS, NEG
        trace: list = []
        cop_kmeans(
            dataset(X, labels),
            AssignerSpec(kind="cop_kmeans", restarts=3),
            default_rng(4),
            _trace=trace,
        )
        for run in trace:
            assert all(b <= a + 1e-9 for a, b in zip(run, run[1:]))


class TestS3lda:
    def test_matches_grid_oracle_at_c_zero(self, rng):
        # oracle: dense sweep of the unit circle
        n = 30
        y = np.concatenate([np.ones(15), -np.ones(15)])
        X = rng.standard_normal((n, 2)) + np.outer(y, [1.0, 0.3])
        labels = y.astype(np.int8)
        ds = dataset(X, labels)
        spec = AssignerSpec(kind="s3lda", C=0.0, steps=2000)
        fitted = s3lda_fit(ds, spec, default_rng(0))

        phis = np.linspace(0, 2 * np.pi, 10_000, endpoint=False)
        W = np.stack([np.cos(phis), np.sin(phis)], axis=1)
        objs = ((y[:, None] - X @ W.T) ** 2).mean(axis=0)
        best_grid = objs.min()
        achieved = _s3lda_objective(fitted.omega, X, y, X, 0.0)
        assert achieved <= best_grid + 1e-3

    def test_large_c_recovers_principal_axis(self):
        # with a dominant hinge term, the fit aligns with the top-variance
        # axis.  n is large here because the alignment is a property of the
        # population objective: at small n the *exact* empirical optimum
        # already sits several degrees off the leading axis (checked against
        # a polished-optimization oracle), so the sample size, not the
        # solver, controls the achievable alignment.
        hits = 0
        for seed in range(10):
            gen = default_rng(seed)
            X = gen.standard_normal((4000, 6)) * np.sqrt([100.0, 1, 1, 1, 1, 1])
            labels = np.zeros(4000, dtype=np.int8)
            idx = gen.choice(4000, 40, replace=False)
            labels[idx[:20]], labels[idx[20:]] = POS, NEG
            fitted = s3lda_fit(
                dataset(X, labels),
                AssignerSpec(kind="s3lda", C=1e4, steps=1000),
                default_rng(seed),
            )
            hits += abs(fitted.omega[0]) > 0.9
        assert hits >= 9

    def test_best_objective_never_exceeds_initial(self, rng):
        X = rng.standard_normal((40, 5))
        labels = np.zeros(40, dtype=np.int8)
        labels[:5], labels[5:10] = POS, NEG
        ds = dataset(X, labels)
        spec = AssignerSpec(kind="s3lda", C=2.0, steps=50)
        fitted = s3lda_fit(ds, spec, default_rng(0))
        Xl = X[ds.labeled_mask]
        y = ds.labels[ds.labeled_mask].astype(float)
        init = X[labels == POS].mean(axis=0) - X[labels == NEG].mean(axis=0)
        init = init / np.linalg.norm(init)
        assert _s3lda_objective(fitted.omega, Xl, y, X, 2.0) <= _s3lda_objective(
            init, Xl, y, X, 2.0
        ) + 1e-12

    def test_deterministic(self, rng):
        X = rng.standard_normal((30, 4))
        labels = np.zeros(30, dtype=np.int8)
        labels[:4], labels[4:8] = POS, NEG
        ds = dataset(X, labels)
        spec = AssignerSpec(kind="s3lda")
        a = s3lda_fit(ds, spec, default_rng(1))
        b = s3lda_fit(ds, spec, default_rng(999))  # rng unused by design
        np.testing.assert_array_equal(a.omega, b.omega)

    def test_single_class_raises(self, rng):
        X = rng.standard_normal((10, 2))
        labels = np.zeros(10, dtype=np.int8)
        labels[:3] = POS
        with pytest.raises(SigPalError):
            s3lda_fit(dataset(X, labels), AssignerSpec(kind="s3lda"), default_rng(0))


class TestL1Lda:
    def make_labeled(self, rng, n=30, d=4, gap=1.0):
        y = np.concatenate([np.ones(n // 2), -np.ones(n // 2)])
        mu = np.zeros(d)
        mu[0] = gap
        X = rng.standard_normal((n, d)) + np.outer(y, mu)
        return dataset(X, y.astype(np.int8))

    def test_penalty_zero_matches_lstsq_direction(self, rng):
        # oracle: unconstrained least squares, then normalized
        ds = self.make_labeled(rng)
        fitted = l1_lda_fit(ds, AssignerSpec(kind="l1_lda", penalty=0.0, max_iters=500))
        w_ls, *_ = np.linalg.lstsq(ds.X, ds.labels.astype(float), rcond=None)
        w_ls = w_ls / np.linalg.norm(w_ls)
        assert min(
            np.abs(fitted.omega - w_ls).max(), np.abs(fitted.omega + w_ls).max()
        ) < 1e-6

    def test_zero_threshold(self, rng):
        ds = self.make_labeled(rng)
        Xl = ds.X
        y = ds.labels.astype(float)
        threshold = np.abs((2.0 / len(y)) * Xl.T @ y).max()
        with pytest.raises(ZeroDirectionError):
            l1_lda_fit(ds, AssignerSpec(kind="l1_lda", penalty=threshold * 1.001))
        # just below the threshold a direction survives
        fitted = l1_lda_fit(ds, AssignerSpec(kind="l1_lda", penalty=threshold * 0.97))
        assert np.abs(fitted.omega).max() > 0

    def test_sparsity_nonincreasing_in_penalty(self, rng):
        ds = self.make_labeled(rng, n=40, d=8)
        nnz = []
        for penalty in [0.0, 0.05, 0.1, 0.3, 0.6]:
            try:
                fitted = l1_lda_fit(ds, AssignerSpec(kind="l1_lda", penalty=penalty))
                nnz.append(int((np.abs(fitted.omega) > 1e-10).sum()))
            except ZeroDirectionError:
                nnz.append(0)
        assert all(b <= a for a, b in zip(nnz, nnz[1:]))

    def test_single_class_raises(self, rng):
        X = rng.standard_normal((6, 2))
        labels = np.full(6, POS, dtype=np.int8)
        with pytest.raises(SigPalError):
            l1_lda_fit(dataset(X, labels), AssignerSpec(kind="l1_lda"))


class TestAssignByDirection:
    def test_all_labeled_echoes_labels(self, rng):
        X = rng.standard_normal((6, 3))
        labels = np.array([POS, NEG, POS, NEG, POS, NEG], dtype=np.int8)
        w = np.zeros(3)
        w[0] = 1.0
        result = assign_by_direction(dataset(X, labels), Direction(omega=w))
        np.testing.assert_array_equal(result.clusters, np.where(labels == POS, 1, 2))

    def test_sign_rule_on_axis(self):
        X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
        result = assign_by_direction(dataset(X), Direction(omega=np.array([1.0])))
        np.testing.assert_array_equal(result.clusters, [2, 2, 1, 1])

    def test_flip_invariance(self, rng):
        X = rng.standard_normal((10, 2))
        labels = np.zeros(10, dtype=np.int8)
        labels[0], labels[1] = POS, NEG
        ds = dataset(X, labels)
        w = rng.standard_normal(2)
        w = w / np.linalg.norm(w)
        a = assign_by_direction(ds, Direction(omega=w))
        b = assign_by_direction(ds, Direction(omega=-w))
        np.testing.assert_array_equal(a.clusters, b.clusters)

    def test_tie_goes_to_cluster_one(self):
        X = np.array([[0.0, 1.0], [0.0, -1.0], [1.0, 0.0], [-1.0, 0.0]])
        result = assign_by_direction(dataset(X), Direction(omega=np.array([1.0, 0.0])))
        # rows 0 and 1 project exactly to 0
        assert result.clusters[0] == 1 and result.clusters[1] == 1


class TestRunAssigner:
    def test_respects_observed_labels(self, rng):
        X = rng.standard_normal((30, 4))
        labels = np.zeros(30, dtype=np.int8)
        labels[:5], labels[5:10] = POS, NEG
        ds = dataset(X, labels)
        for kind in ("cop_kmeans", "s3lda", "l1_lda"):
            result = run_assigner(AssignerSpec(kind=kind), ds, default_rng(0))
            np.testing.assert_array_equal(result.clusters[:5], np.ones(5))
            np.testing.assert_array_equal(result.clusters[5:10], np.full(5, 2))
            assert result.observed[:10].all() and not result.observed[10:].any()
