"""Covariance eigen-spectra: estimation, noise floor, thresholding, null draws.

The Gaussian null of the simulation-based tests is ``N(0, diag(values))``
for an estimated spectrum.  Small sample eigenvalues are unreliable in the
``d >> n`` regime, so they are replaced by a background-noise floor, either
hard (floor only) or soft (floor plus a shift ``tau`` that preserves the
total energy ``sum(values)``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateDataError, SigPalError

# 1 / Phi^{-1}(0.75): converts a median absolute deviation into a normal sigma
MAD_TO_SIGMA = 1.0 / 0.6744897501960817

_SOURCES = ("sample", "hard", "soft", "known")


@dataclass(frozen=True)
class EigenSpectrum:
    """Nonincreasing, nonnegative eigenvalues of a covariance matrix.

    ``source`` records provenance: ``sample`` (raw estimate), ``hard`` /
    ``soft`` (thresholded), or ``known`` (user-supplied truth).
    ``noise_level`` is the background-noise variance used for thresholding;
    ``tau`` is the soft-threshold shift; ``energy_preserved`` says whether
    the soft rule could match the sample energy.
    """

    values: np.ndarray
    source: str
    noise_level: Optional[float] = None
    tau: Optional[float] = None
    energy_preserved: Optional[bool] = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size == 0:
            raise SigPalError("spectrum must be nonempty")
        if not np.all(np.isfinite(values)) or values[-1] < 0:
            raise SigPalError("spectrum values must be finite and nonnegative")
        if np.any(np.diff(values) > 0):
            raise SigPalError("spectrum values must be nonincreasing")
        if self.source not in _SOURCES:
            raise SigPalError(f"unknown spectrum source {self.source!r}")
        if self.source in ("hard", "soft"):
            if self.noise_level is None or self.noise_level <= 0:
                raise SigPalError("thresholded spectra require a positive noise_level")
            if values[-1] < self.noise_level * (1 - 1e-12):
                raise SigPalError("thresholded spectrum dips below its noise floor")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def d(self) -> int:
        return self.values.size

    @property
    def total(self) -> float:
        return float(self.values.sum())

    @property
    def leading_ratio(self) -> float:
        """lambda_1 / sum(lambda), the quantity the closed-form theory uses."""
        return float(self.values[0] / self.values.sum())

    def to_dict(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "source": self.source,
            "noise_level": self.noise_level,
            "tau": self.tau,
            "energy_preserved": self.energy_preserved,
        }

    @staticmethod
    def from_dict(payload: dict) -> "EigenSpectrum":
        return EigenSpectrum(
            values=np.asarray(payload["values"], dtype=float),
            source=payload.get("source", "known"),
            noise_level=payload.get("noise_level"),
            tau=payload.get("tau"),
            energy_preserved=payload.get("energy_preserved"),
        )


def known_spectrum(values) -> EigenSpectrum:
    """Wrap known covariance eigenvalues (sorted nonincreasing) as a spectrum."""
    values = np.sort(np.asarray(values, dtype=float))[::-1]
    return EigenSpectrum(values=values, source="known")


def sample_eigenvalues(X: np.ndarray) -> EigenSpectrum:
    """Spectrum of the sample covariance ``X'X / (n-1)`` of centered data.

    When ``d > n`` the n x n Gram matrix ``XX' / (n-1)`` is decomposed
    instead (same nonzero eigenvalues) and zeros are appended, so at most
    ``n - 1`` returned values are nonzero.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if n < 2:
        raise SigPalError("need n >= 2 rows for a sample spectrum")
    scale = max(1.0, float(np.abs(X).max()))
    if np.abs(X.mean(axis=0)).max() > 1e-8 * scale:
        raise SigPalError("input is not column-centered; center the data first")
    if d > n:
        gram = X @ X.T / (n - 1)
        ev = np.linalg.eigvalsh(gram)
        ev = np.concatenate([ev, np.zeros(d - n)])
    else:
        ev = np.linalg.eigvalsh(X.T @ X / (n - 1))
    ev = np.maximum(ev, 0.0)
    return EigenSpectrum(values=np.sort(ev)[::-1], source="sample")


def background_noise(X: np.ndarray) -> float:
    """Robust background-noise variance of the pooled data entries.

    Squared MAD-based sigma: ``(MAD / Phi^{-1}(0.75))**2`` where MAD is the
    median absolute deviation of all ``n*d`` entries about their median.
    """
    flat = np.asarray(X, dtype=float).reshape(-1)
    if flat.size < 2:
        raise SigPalError("need at least 2 entries to estimate noise")
    mad = float(np.median(np.abs(flat - np.median(flat))))
    sigma2 = (mad * MAD_TO_SIGMA) ** 2
    if sigma2 <= 0.0:
        raise DegenerateDataError("zero background noise: thresholding undefined")
    return sigma2


def _require_sample(spectrum: EigenSpectrum) -> None:
    if spectrum.source != "sample":
        raise SigPalError(f"thresholding expects a 'sample' spectrum, got {spectrum.source!r}")


def hard_threshold(spectrum: EigenSpectrum, noise_level: float) -> EigenSpectrum:
    """Replace every sample eigenvalue below the noise floor by the floor."""
    _require_sample(spectrum)
    if noise_level <= 0:
        raise SigPalError("noise_level must be positive")
    return EigenSpectrum(
        values=np.maximum(spectrum.values, noise_level),
        source="hard",
        noise_level=float(noise_level),
    )


def _soft_map(lam: np.ndarray, tau: float, noise_level: float) -> np.ndarray:
    return np.where(lam >= tau + noise_level, lam - tau, noise_level)


def soft_threshold(spectrum: EigenSpectrum, noise_level: float) -> EigenSpectrum:
    """Energy-preserving soft threshold.

    Values below ``tau + noise`` are floored at the noise level; the rest are
    shifted down by ``tau``, with ``tau >= 0`` chosen by bisection so the
    total energy equals the sample total.  When no ``tau`` can preserve the
    energy (sample total below ``d * noise``), the floored spectrum is
    returned with ``tau = 0`` and ``energy_preserved=False``.
    """
    _require_sample(spectrum)
    if noise_level <= 0:
        raise SigPalError("noise_level must be positive")
    lam = spectrum.values
    target = float(lam.sum())
    d = lam.size

    if target < d * noise_level:
        return EigenSpectrum(
            values=np.maximum(lam, noise_level),
            source="soft",
            noise_level=float(noise_level),
            tau=0.0,
            energy_preserved=False,
        )

    # mapped sum is continuous, nonincreasing in tau; bracket [0, lam_1]
    lo, hi = 0.0, float(lam[0])
    tol = 1e-12 * max(lam[0], 1e-300)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if _soft_map(lam, mid, noise_level).sum() >= target:
            lo = mid
        else:
            hi = mid
    tau = 0.5 * (lo + hi)
    values = np.sort(_soft_map(lam, tau, noise_level))[::-1]
    preserved = abs(values.sum() - target) <= 1e-8 * target
    return EigenSpectrum(
        values=values,
        source="soft",
        noise_level=float(noise_level),
        tau=tau,
        energy_preserved=bool(preserved),
    )


def simulate_null(spectrum: EigenSpectrum, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` rows with independent Gaussian columns ``N(0, values[j])``."""
    if n < 1:
        raise SigPalError("need n >= 1 rows")
    return rng.standard_normal((n, spectrum.d)) * np.sqrt(spectrum.values)
