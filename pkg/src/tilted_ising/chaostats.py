"""Spectral unfolding, spacing distributions and Kolmogorov-Smirnov distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

DEFAULT_FIT_DEGREE = 15
DEFAULT_TRIM = 0.05
DEGENERACY_TOL = 1e-8
MIN_LEVELS = 50
MEAN_SPACING_TOL = 0.02


class UnfoldingError(RuntimeError):
    """The staircase fit is not monotone, or not unit-mean, on the retained part of the spectrum."""


@dataclass(frozen=True)
class UnfoldedSpectrum:
    raw: np.ndarray
    unfolded: np.ndarray
    spacings: np.ndarray
    fit_degree: int
    trim_fraction: float

    @property
    def mean_spacing(self) -> float:
        return float(np.mean(self.spacings))


@dataclass(frozen=True)
class KSReport:
    D_poisson: float
    D_wigner: float
    n: int


def unfold(
    eigenvalues,
    fit_degree: int = DEFAULT_FIT_DEGREE,
    trim_fraction: float = DEFAULT_TRIM,
) -> UnfoldedSpectrum:
    """Map a sector spectrum to unit mean spacing with a polynomial staircase fit.

    The staircase takes the value ``i - 1/2`` at the i-th level (1-based), and
    a least-squares polynomial of ``fit_degree`` is fitted to it over the whole
    spectrum. ``trim_fraction`` of the levels at each edge is then dropped
    before spacings are taken. A fit whose retained spacings do not average
    to 1 within ``MEAN_SPACING_TOL`` is rejected, since the staircase shape was
    not captured.
    """
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    n = len(lam)
    cut = int(np.floor(trim_fraction * n))
    kept = lam[cut:n - cut]
    if len(kept) < MIN_LEVELS:
        raise ValueError(f"need at least {MIN_LEVELS} levels after trimming, got {len(kept)}")
    if kept[-1] == kept[0]:
        raise UnfoldingError("retained spectrum is fully degenerate")
    staircase = np.arange(1, n + 1) - 0.5
    fit = Polynomial.fit(lam, staircase, fit_degree)

    # monotone on the retained range: derivative positive on a dense grid
    probe = np.linspace(kept[0], kept[-1], max(20 * len(kept), 1000))
    slope = fit.deriv()(probe)
    if np.any(slope <= 0):
        raise UnfoldingError(
            f"degree-{fit_degree} staircase fit is not increasing on the retained "
            f"spectrum; try a lower --fit-degree"
        )
    u = fit(kept)
    spacings = np.diff(u)
    mean = float(np.mean(spacings))
    if abs(mean - 1.0) > MEAN_SPACING_TOL:
        raise UnfoldingError(
            f"degree-{fit_degree} staircase fit gives mean spacing {mean:.4f}; "
            f"try a different --fit-degree"
        )
    return UnfoldedSpectrum(lam, u, spacings, fit_degree, trim_fraction)


def degeneracy_fraction(eigenvalues, tol: float = DEGENERACY_TOL) -> float:
    """Fraction of adjacent raw spacings smaller than ``tol``."""
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    if len(lam) < 2:
        return 0.0
    return float(np.mean(np.diff(lam) < tol))


def _check_nonneg(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("spacings must be nonnegative")
    return s


def wigner_pdf(s):
    s = _check_nonneg(s)
    return 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s * s)


def poisson_pdf(s):
    s = _check_nonneg(s)
    return np.exp(-s)


def wigner_cdf(s):
    """CDF of the GOE Wigner surmise, ``1 - exp(-pi s^2 / 4)``."""
    s = _check_nonneg(s)
    return -np.expm1(-0.25 * np.pi * s * s)


def poisson_cdf(s):
    """CDF of exponentially distributed spacings, ``1 - exp(-s)``."""
    s = _check_nonneg(s)
    return -np.expm1(-s)


def nnsd_histogram(spacings, bin_width: float = 0.1, s_max: float | None = None):
    """Density-normalized histogram of spacings on bins ``[0, w), [w, 2w), ...``.

    Returns ``(centers, densities)``; the densities integrate to 1.
    """
    s = _check_nonneg(spacings)
    if s.size == 0:
        raise ValueError("no spacings to histogram")
    top = max(float(s.max()), s_max or 0.0)
    n_bins = int(np.floor(top / bin_width)) + 1
    edges = bin_width * np.arange(n_bins + 1)
    counts = np.bincount(np.minimum((s / bin_width).astype(int), n_bins - 1), minlength=n_bins)
    return 0.5 * (edges[1:] + edges[:-1]), counts / (s.size * bin_width)


def ks_distance(samples, cdf) -> float:
    """sup |F_emp - F| over the sample, checking both sides of every jump."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    F = cdf(x)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(n) / n
    return float(max(upper.max(), lower.max()))


def ks_statistic(spacings) -> KSReport:
    s = _check_nonneg(spacings)
    return KSReport(ks_distance(s, poisson_cdf), ks_distance(s, wigner_cdf), int(s.size))


@dataclass(frozen=True)
class SpacingAnalysis:
    """Unfold + KS summary of one sector spectrum.

    ``ks`` is None when the spectrum is too degenerate to unfold; the
    degeneracy fraction is always reported.
    """

    degeneracy: float
    unfolded: UnfoldedSpectrum | None
    ks: KSReport | None
    note: str = ""


def analyze_spacings(
    eigenvalues,
    fit_degree: int = DEFAULT_FIT_DEGREE,
    trim_fraction: float = DEFAULT_TRIM,
    degenerate_cutoff: float = 0.5,
) -> SpacingAnalysis:
    """Degeneracy count, unfolding and KS distances for one spectrum.

    Spacings below ``DEGENERACY_TOL`` are left out of the KS input. If more
    than ``degenerate_cutoff`` of the raw spacings are degenerate the
    unfolding is skipped altogether.
    """
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    deg = degeneracy_fraction(lam)
    if deg > degenerate_cutoff:
        return SpacingAnalysis(deg, None, None, f"spectrum degenerate ({deg:.2%} of spacings < {DEGENERACY_TOL:g}); KS skipped")
    unf = unfold(lam, fit_degree, trim_fraction)
    s = unf.spacings[unf.spacings >= DEGENERACY_TOL]
    return SpacingAnalysis(deg, unf, ks_statistic(s))
