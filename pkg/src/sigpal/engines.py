"""The three hypothesis tests: SigPal, SigClust and DiProPerm.

SigClust asks whether the data come from a single Gaussian by comparing
the observed 2-means cluster index against cluster indices of Gaussian
null draws.  SigPal extends it to partially labeled data: the assignment
step is semi-supervised and every null replicate re-places the observed
label counts at random before re-running the same assigner.  DiProPerm is
the fully labeled permutation benchmark.

Every engine is a pure function of its inputs and an integer seed; null
replicates run on streams spawned up front, so results are identical for
any worker count.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from numpy.random import SeedSequence, default_rng

from ._rng import parallel_map
from .assigners import AssignerSpec, run_assigner
from .cluster_index import cluster_index
from .dataset import NEG, POS, UNLABELED, PartiallyLabeledDataset, center, total_sum_of_squares
from .errors import DegenerateDataError, EngineError, SigPalError
from .spectrum import (
    EigenSpectrum,
    background_noise,
    hard_threshold,
    sample_eigenvalues,
    simulate_null,
    soft_threshold,
)

EigenMethod = Union[str, EigenSpectrum]


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test run."""

    method: str
    observed_stat: float
    null_stats: np.ndarray
    p_value: float
    n_sim_or_perm: int
    seed: int
    metadata: dict

    def __post_init__(self) -> None:
        nulls = np.array(self.null_stats, dtype=float)
        if nulls.size != self.n_sim_or_perm:
            raise SigPalError("null_stats length must equal n_sim_or_perm")
        if not 0.0 <= self.p_value <= 1.0:
            raise SigPalError("p_value outside [0, 1]")
        nulls.setflags(write=False)
        object.__setattr__(self, "null_stats", nulls)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "observed_stat": self.observed_stat,
            "null_stats": [float(v) for v in self.null_stats],
            "p_value": self.p_value,
            "n_sim_or_perm": self.n_sim_or_perm,
            "seed": self.seed,
            "metadata": self.metadata,
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_nulls_csv(self, path) -> None:
        """One null statistic per line, for external plotting."""
        with open(path, "w", encoding="utf-8") as fh:
            for v in self.null_stats:
                fh.write(f"{float(v)!r}\n")


def empirical_pvalue(
    observed: float,
    nulls: np.ndarray,
    rule: str = "less",
    add_one: bool = False,
) -> float:
    """Empirical p-value by strict comparison counting.

    ``rule='less'`` counts nulls strictly below the observed statistic
    (simulation tests), ``rule='greater'`` strictly above (permutation
    tests); ties count against rejection.  ``add_one`` applies the
    ``(count + 1) / (N + 1)`` correction.
    """
    nulls = np.asarray(nulls, dtype=float)
    if nulls.size == 0:
        raise SigPalError("empty null sample")
    if rule == "less":
        count = int((nulls < observed).sum())
    elif rule == "greater":
        count = int((nulls > observed).sum())
    else:
        raise SigPalError(f"unknown rule {rule!r}; use 'less' or 'greater'")
    if add_one:
        return (count + 1) / (nulls.size + 1)
    return count / nulls.size


def _resolve_spectrum(X: np.ndarray, eigen_method: EigenMethod) -> EigenSpectrum:
    """Estimated or known null spectrum for centered data X."""
    if isinstance(eigen_method, EigenSpectrum):
        if eigen_method.d != X.shape[1]:
            raise SigPalError(
                f"known spectrum has {eigen_method.d} values but data have {X.shape[1]} columns"
            )
        return eigen_method
    sample = sample_eigenvalues(X)
    noise = background_noise(X)
    if eigen_method == "hard":
        return hard_threshold(sample, noise)
    if eigen_method == "soft":
        return soft_threshold(sample, noise)
    raise SigPalError(f"unknown eigen method {eigen_method!r}; use 'hard', 'soft' or a spectrum")


def _eigen_name(eigen_method: EigenMethod) -> str:
    return eigen_method if isinstance(eigen_method, str) else "known"


def _place_random_labels(
    labels: np.ndarray,
    n_pos: int,
    n_neg: int,
    rng: np.random.Generator,
    mode: str,
) -> None:
    """Place labels on a uniform random subset of rows, in place.

    ``counts`` mode re-uses the observed (n_pos, n_neg) split in random
    order; ``uniform`` mode draws each label as an independent fair sign.
    """
    n_l = n_pos + n_neg
    if n_l == 0:
        return
    idx = rng.choice(labels.size, size=n_l, replace=False)
    if mode == "counts":
        placed = np.concatenate([np.full(n_pos, POS), np.full(n_neg, NEG)]).astype(np.int8)
        rng.shuffle(placed)
    elif mode == "uniform":
        placed = rng.choice(np.array([POS, NEG], dtype=np.int8), size=n_l)
    else:
        raise SigPalError(f"unknown label mode {mode!r}")
    labels[idx] = placed


def _simulation_test(
    method: str,
    dataset: PartiallyLabeledDataset,
    assigner: AssignerSpec,
    sim_assigner: AssignerSpec,
    eigen_method: EigenMethod,
    n_sim: int,
    seed: int,
    workers: int,
    add_one: bool,
    label_mode: str,
) -> TestResult:
    """Shared core of sigclust and sigpal (they differ only in labels)."""
    if dataset.n < 3:
        raise SigPalError(f"{method} needs n >= 3 rows")
    if n_sim < 1:
        raise SigPalError("n_sim must be >= 1")
    centered, _ = center(dataset)
    if total_sum_of_squares(centered.X) <= 0.0:
        raise DegenerateDataError("all rows identical: test undefined")
    if assigner.needs_labels() and (dataset.n_pos < 1 or dataset.n_neg < 1):
        raise SigPalError(f"assigner {assigner.kind!r} needs labeled rows from both classes")

    spectrum = _resolve_spectrum(centered.X, eigen_method)
    n_pos, n_neg = dataset.n_pos, dataset.n_neg

    root = SeedSequence(seed)
    streams = root.spawn(n_sim + 1)
    observed = run_assigner(assigner, centered, default_rng(streams[0])).ci

    def one_replicate(item: tuple[int, SeedSequence]) -> float:
        index, stream = item
        rng = default_rng(stream)
        try:
            draw = simulate_null(spectrum, dataset.n, rng)
            draw = draw - draw.mean(axis=0)
            labels = np.zeros(dataset.n, dtype=np.int8)
            _place_random_labels(labels, n_pos, n_neg, rng, label_mode)
            sim_data = PartiallyLabeledDataset(draw, labels)
            return run_assigner(sim_assigner, sim_data, rng).ci
        except SigPalError as exc:
            raise EngineError(f"{method} replicate {index} failed: {exc}") from exc

    nulls = np.array(
        parallel_map(one_replicate, list(enumerate(streams[1:])), workers), dtype=float
    )
    p_value = empirical_pvalue(observed, nulls, rule="less", add_one=add_one)
    return TestResult(
        method=method,
        observed_stat=observed,
        null_stats=nulls,
        p_value=p_value,
        n_sim_or_perm=n_sim,
        seed=int(seed),
        metadata={
            "assigner": assigner.to_dict(),
            "sim_assigner": sim_assigner.to_dict(),
            "eigen_method": _eigen_name(eigen_method),
            "spectrum_energy_preserved": spectrum.energy_preserved,
            "statistic": "cluster_index",
            "rule": "less",
            "add_one": add_one,
            "label_mode": label_mode,
            "n_labeled": dataset.n_labeled,
            "centered": True,
        },
    )


def sigclust(
    X: np.ndarray,
    eigen_method: EigenMethod = "soft",
    n_sim: int = 100,
    spec: Optional[AssignerSpec] = None,
    seed: int = 0,
    workers: int = 1,
    add_one: bool = False,
) -> TestResult:
    """Gaussian-null cluster significance test on unlabeled data.

    The observed statistic is the best 2-means CI of ``X``; nulls are CIs of
    2-means on draws from ``N(0, diag(spectrum))``.  Small p-values mean the
    data cluster better than a single Gaussian explains.
    """
    spec = spec or AssignerSpec(kind="two_means")
    if spec.kind != "two_means":
        raise SigPalError("sigclust clusters with two_means; pass a two_means spec")
    X = np.asarray(X, dtype=float)
    dataset = PartiallyLabeledDataset(X, np.zeros(X.shape[0], dtype=np.int8))
    return _simulation_test(
        method="sigclust",
        dataset=dataset,
        assigner=spec,
        sim_assigner=spec,
        eigen_method=eigen_method,
        n_sim=n_sim,
        seed=seed,
        workers=workers,
        add_one=add_one,
        label_mode="counts",
    )


def sigpal(
    dataset: PartiallyLabeledDataset,
    assigner: AssignerSpec,
    sim_assigner: Optional[AssignerSpec] = None,
    eigen_method: EigenMethod = "soft",
    n_sim: int = 100,
    seed: int = 0,
    workers: int = 1,
    add_one: bool = False,
    label_mode: str = "counts",
) -> TestResult:
    """Cluster significance test for partially labeled data.

    The observed statistic is the CI of ``assigner`` on the data; each null
    replicate draws from ``N(0, diag(spectrum))``, places the observed label
    counts on a uniform random subset, and runs ``sim_assigner`` (defaults
    to ``assigner``).  With no labeled rows and a ``two_means`` assigner the
    result coincides with :func:`sigclust` for the same seed.
    """
    sim_assigner = sim_assigner or assigner
    return _simulation_test(
        method="sigpal",
        dataset=dataset,
        assigner=assigner,
        sim_assigner=sim_assigner,
        eigen_method=eigen_method,
        n_sim=n_sim,
        seed=seed,
        workers=workers,
        add_one=add_one,
        label_mode=label_mode,
    )


def _projection_stat(proj: np.ndarray, labels: np.ndarray, statistic: str) -> float:
    a = proj[labels == POS]
    b = proj[labels == NEG]
    if statistic == "mean_diff":
        return float(a.mean() - b.mean())
    if statistic == "t_stat":
        na, nb = a.size, b.size
        pooled = ((na - 1) * a.var(ddof=1) + (nb - 1) * b.var(ddof=1)) / (na + nb - 2)
        denom = np.sqrt(pooled * (1.0 / na + 1.0 / nb))
        if denom == 0.0:
            raise DegenerateDataError("zero pooled variance in t statistic")
        return float((a.mean() - b.mean()) / denom)
    raise SigPalError(f"unknown statistic {statistic!r}; use 'mean_diff' or 't_stat'")


def diproperm(
    X: np.ndarray,
    labels: np.ndarray,
    statistic: str = "mean_diff",
    n_perm: int = 100,
    seed: int = 0,
    workers: int = 1,
    add_one: bool = False,
) -> TestResult:
    """Direction-projection-permutation test on fully labeled data.

    Projects onto the normalized class mean difference, computes a
    univariate statistic, and compares against label permutations that
    recompute the direction each time.  Large observed statistics give
    small p-values (strict 'greater' counting).
    """
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    if np.any(labels == UNLABELED) or not np.all(np.isin(labels, (POS, NEG))):
        raise SigPalError("diproperm requires full labels (+1/-1 on every row)")
    min_per_class = 2 if statistic == "t_stat" else 1
    if (labels == POS).sum() < min_per_class or (labels == NEG).sum() < min_per_class:
        raise SigPalError(
            f"statistic {statistic!r} needs at least {min_per_class} rows per class"
        )
    if n_perm < 1:
        raise SigPalError("n_perm must be >= 1")

    scale = max(1.0, float(np.abs(X).max()))
    fallback_axis: list[np.ndarray] = []  # lazily computed first principal axis
    fallback_used = [False]

    def direction_for(lab: np.ndarray) -> np.ndarray:
        diff = X[lab == POS].mean(axis=0) - X[lab == NEG].mean(axis=0)
        norm = np.linalg.norm(diff)
        if norm > 1e-12 * scale:
            return diff / norm
        if not fallback_axis:
            Xc = X - X.mean(axis=0)
            _, _, vt = np.linalg.svd(Xc, full_matrices=False)
            fallback_axis.append(vt[0])
        if not fallback_used[0]:
            warnings.warn(
                "identical class means: falling back to the first principal axis",
                RuntimeWarning,
                stacklevel=3,
            )
            fallback_used[0] = True
        return fallback_axis[0]

    def stat_for(lab: np.ndarray) -> float:
        return _projection_stat(X @ direction_for(lab), lab, statistic)

    observed = stat_for(labels)
    root = SeedSequence(seed)

    def one_perm(item: tuple[int, SeedSequence]) -> float:
        index, stream = item
        try:
            return stat_for(default_rng(stream).permutation(labels))
        except SigPalError as exc:
            raise EngineError(f"diproperm permutation {index} failed: {exc}") from exc

    nulls = np.array(
        parallel_map(one_perm, list(enumerate(root.spawn(n_perm))), workers), dtype=float
    )
    p_value = empirical_pvalue(observed, nulls, rule="greater", add_one=add_one)
    return TestResult(
        method="diproperm",
        observed_stat=observed,
        null_stats=nulls,
        p_value=p_value,
        n_sim_or_perm=n_perm,
        seed=int(seed),
        metadata={
            "direction": "mean_difference",
            "statistic": statistic,
            "rule": "greater",
            "add_one": add_one,
            "fallback_direction_used": fallback_used[0],
        },
    )
