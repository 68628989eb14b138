"""Closed-form theory of the population cluster index (TCI) plus
Monte-Carlo probes of the assignment rule and of the large-d behavior.

For a single Gaussian with eigenvalues ``lambda_1 >= ... >= lambda_d``,
labeled fraction ``theta`` and the first-principal-axis assignment rule,
the population cluster index is

    TCI = 1 + theta - (2/pi) (1 - theta)^3 * lambda_1 / sum(lambda),

which only depends on theta and the ratio ``r = lambda_1 / sum(lambda)``.
At ``theta = 0`` this reduces to the unlabeled value ``1 - (2/pi) r``.

Note: the population normalization integrates the labeled mass at full
weight in each class, so TCI exceeds 1 for ``theta > 0`` while an
empirical CI is always <= 1.  The Monte-Carlo probe therefore matches the
closed form only at ``theta = 0``; for ``theta > 0`` it reports the
empirical value without asserting agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from numpy.random import SeedSequence, default_rng
from scipy import stats

from ._rng import parallel_map, seed_of
from .assigners import AssignerSpec
from .cluster_index import cluster_index
from .dataset import NEG, POS, PartiallyLabeledDataset
from .engines import sigpal
from .errors import SigPalError
from .spectrum import EigenSpectrum, known_spectrum

SpectrumLike = Union[EigenSpectrum, np.ndarray, Sequence[float]]


def _as_ratio(spectrum_or_r: Union[float, SpectrumLike]) -> float:
    if isinstance(spectrum_or_r, EigenSpectrum):
        r = spectrum_or_r.leading_ratio
    elif np.ndim(spectrum_or_r) == 0:
        r = float(spectrum_or_r)
    else:
        values = np.asarray(spectrum_or_r, dtype=float)
        r = float(values.max() / values.sum())
    if not 0.0 < r <= 1.0:
        raise SigPalError(f"leading eigenvalue ratio must lie in (0, 1], got {r}")
    return r


def _check_theta(theta: float) -> float:
    if not 0.0 <= theta <= 1.0:
        raise SigPalError(f"theta must lie in [0, 1], got {theta}")
    return float(theta)


def tci_sigpal(theta: float, spectrum_or_r: Union[float, SpectrumLike]) -> float:
    """Population cluster index with a labeled fraction theta."""
    theta = _check_theta(theta)
    r = _as_ratio(spectrum_or_r)
    return 1.0 + theta - (2.0 / math.pi) * (1.0 - theta) ** 3 * r


def tci_sigclust(spectrum_or_r: Union[float, SpectrumLike]) -> float:
    """Population cluster index of the unlabeled test: 1 - (2/pi) r."""
    return 1.0 - (2.0 / math.pi) * _as_ratio(spectrum_or_r)


def tci_difference(theta: float, spectrum_or_r: Union[float, SpectrumLike]) -> float:
    """Gap between the labeled and unlabeled population indices.

    Equals ``theta + (2/pi) r (1 - (1-theta)^3)``; zero at theta = 0 and
    strictly increasing in theta for any fixed r.
    """
    return tci_sigpal(theta, spectrum_or_r) - tci_sigclust(spectrum_or_r)


@dataclass(frozen=True)
class EigenBias:
    """Bias of an estimated spectrum against the truth.

    ``e`` is the difference of leading-eigenvalue ratios; negative values
    push the simulation-based tests anti-conservative.  ``delta1`` and
    ``delta_total`` are the raw biases of ``lambda_1`` and of the energy.
    """

    e: float
    delta1: float
    delta_total: float

    @property
    def anti_conservative(self) -> bool:
        return self.e < 0

    def sign_agrees_with_biases(self, truth_total: float, truth_lam1: float) -> bool:
        """Does sign(e) match sign(delta1 * sum(lambda) - lambda_1 * delta_total)?"""
        predictor = self.delta1 * truth_total - truth_lam1 * self.delta_total
        if self.e == 0.0 or predictor == 0.0:
            return (self.e == 0.0) == (predictor == 0.0)
        return (self.e < 0) == (predictor < 0)


def eigen_bias(estimated: SpectrumLike, truth: SpectrumLike) -> EigenBias:
    """Leading-ratio bias ``lam1_hat/sum_hat - lam1/sum`` plus raw biases."""
    est = estimated.values if isinstance(estimated, EigenSpectrum) else np.asarray(estimated, float)
    tru = truth.values if isinstance(truth, EigenSpectrum) else np.asarray(truth, float)
    if est.size == 0 or tru.size == 0:
        raise SigPalError("spectra must be nonempty")
    est_total, tru_total = float(est.sum()), float(tru.sum())
    if est_total <= 0.0 or tru_total <= 0.0:
        raise SigPalError("spectra must have positive totals")
    return EigenBias(
        e=float(est.max() / est_total - tru.max() / tru_total),
        delta1=float(est.max() - tru.max()),
        delta_total=est_total - tru_total,
    )


def monte_carlo_tci(
    theta: float,
    spectrum: SpectrumLike,
    n: int,
    reps: int,
    seed: int = 0,
    workers: int = 1,
) -> tuple[float, float]:
    """Empirical CI of the first-principal-axis rule on Gaussian draws.

    Rows are drawn from ``N(0, diag(lambda))``; a theta-fraction gets
    independent uniform +-1 labels and the rest split by the sign of the
    leading coordinate.  Returns (mean CI, standard error) over ``reps``.
    """
    theta = _check_theta(theta)
    if n < 100:
        raise SigPalError("need n >= 100 for a stable empirical index")
    if reps < 1:
        raise SigPalError("reps must be >= 1")
    values = spectrum.values if isinstance(spectrum, EigenSpectrum) else np.asarray(spectrum, float)
    lead = int(np.argmax(values))
    n_l = int(round(theta * n))

    def one_rep(stream: SeedSequence) -> float:
        rng = default_rng(stream)
        X = rng.standard_normal((n, values.size)) * np.sqrt(values)
        clusters = np.where(X[:, lead] >= 0, 1, 2).astype(np.int8)
        if n_l:
            idx = rng.choice(n, size=n_l, replace=False)
            clusters[idx] = rng.choice(np.array([1, 2], dtype=np.int8), size=n_l)
        return cluster_index(X, clusters)

    cis = np.array(parallel_map(one_rep, SeedSequence(seed).spawn(reps), workers))
    se = float(cis.std(ddof=1) / math.sqrt(reps)) if reps > 1 else float("nan")
    return float(cis.mean()), se


@dataclass(frozen=True)
class AsymptoticStudyConfig:
    """Mixture setup for the large-d p-value study.

    Data come from ``eta N(0, D) + (1 - eta) N(mu, D)`` with
    ``mu = (a, ..., a)`` and ``D = diag(lambda_profile(d))``; the null
    spectrum is the known Gaussian fit to the mixture,
    ``lambda_j + eta (1 - eta) a^2``.  The documented growth assumptions
    behind the p -> 0 limit (sum lambda = O(d^beta) with beta < 1,
    sum a_j^2 = O(d), sum a_j^2 lambda_j = O(d^gamma) with gamma < 2,
    bounded per-coordinate variance) are properties of the chosen profile,
    not runtime checks.
    """

    a: float
    d_grid: tuple
    reps: int
    eta: float = 0.5
    lambda_profile: Optional[Callable[[int], np.ndarray]] = None
    lambda_value: float = 1.0
    n: int = 40
    labeled_per_class: int = 5

    def __post_init__(self) -> None:
        grid = tuple(int(d) for d in self.d_grid)
        if len(grid) < 1 or any(nxt <= prev for prev, nxt in zip(grid, grid[1:])):
            raise SigPalError("d_grid must be nonempty and strictly increasing")
        if self.reps < 1:
            raise SigPalError("reps must be >= 1")
        if not 0.0 < self.eta < 1.0:
            raise SigPalError("eta must lie in (0, 1)")
        if self.a < 0:
            raise SigPalError("signal a must be nonnegative")
        object.__setattr__(self, "d_grid", grid)

    def lambdas(self, d: int) -> np.ndarray:
        if self.lambda_profile is not None:
            values = np.asarray(self.lambda_profile(d), dtype=float)
            if values.shape != (d,):
                raise SigPalError("lambda_profile must return d values")
            return values
        return np.full(d, self.lambda_value)


@dataclass(frozen=True)
class AsymptoticStudyResult:
    """P-values of the study: one row per dimension, one column per rep."""

    d_grid: tuple
    pvalues: np.ndarray

    def mean_p(self) -> np.ndarray:
        return self.pvalues.mean(axis=1)

    def sd_p(self) -> np.ndarray:
        return self.pvalues.std(axis=1, ddof=1)

    def table(self) -> list[tuple[int, float, float]]:
        return [
            (d, float(m), float(s))
            for d, m, s in zip(self.d_grid, self.mean_p(), self.sd_p())
        ]

    def trend_pvalue(self) -> float:
        """One-sided p-value for a decreasing trend of p against log d."""
        logd = np.repeat(np.log(np.asarray(self.d_grid, float)), self.pvalues.shape[1])
        fit = stats.linregress(logd, self.pvalues.reshape(-1))
        one_sided = fit.pvalue / 2.0 if fit.slope < 0 else 1.0 - fit.pvalue / 2.0
        return float(one_sided)


def asymptotic_pvalue_study(
    config: AsymptoticStudyConfig,
    seed: int = 0,
    n_sim: int = 100,
    assigner: Optional[AssignerSpec] = None,
    workers: int = 1,
) -> AsymptoticStudyResult:
    """SigPal p-values on fresh mixture draws across a dimension grid.

    Uses the known mixture-fit spectrum (the setting of the p -> 0 limit)
    and a constrained-k-means assigner by default.
    """
    assigner = assigner or AssignerSpec(kind="cop_kmeans", restarts=4)
    root = SeedSequence(seed)
    d_streams = root.spawn(len(config.d_grid))
    pvals = np.empty((len(config.d_grid), config.reps))

    for di, (d, d_stream) in enumerate(zip(config.d_grid, d_streams)):
        lam = config.lambdas(d)
        mu = np.full(d, config.a)
        null_values = lam + config.eta * (1.0 - config.eta) * config.a**2
        spectrum = known_spectrum(null_values)
        rep_streams = d_stream.spawn(config.reps)

        def one_rep(stream: SeedSequence, lam=lam, mu=mu, spectrum=spectrum) -> float:
            rng = default_rng(stream)
            for _ in range(100):
                comp = rng.random(config.n) >= config.eta  # True rows carry mean mu
                if (
                    comp.sum() >= config.labeled_per_class
                    and (~comp).sum() >= config.labeled_per_class
                ):
                    break
            else:
                raise SigPalError("mixture draw never produced both classes")
            X = rng.standard_normal((config.n, lam.size)) * np.sqrt(lam) + np.outer(comp, mu)
            labels = np.zeros(config.n, dtype=np.int8)
            for cls, value in ((comp, POS), (~comp, NEG)):
                idx = rng.choice(np.flatnonzero(cls), size=config.labeled_per_class, replace=False)
                labels[idx] = value
            data = PartiallyLabeledDataset(X, labels)
            return sigpal(
                data,
                assigner,
                eigen_method=spectrum,
                n_sim=n_sim,
                seed=seed_of(stream),
            ).p_value

        pvals[di] = parallel_map(one_rep, rep_streams, workers)
    return AsymptoticStudyResult(d_grid=config.d_grid, pvalues=pvals)
