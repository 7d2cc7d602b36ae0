"""Eigendecomposition, level dynamics in theta, and avoided-crossing search."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import entanglement as ent
from .hamiltonian import SymmetrySector, sector_hamiltonian
from .state import ChainParams

DEGENERATE_GAP = 1e-12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SpectrumResult:
    params: Optional[ChainParams]
    sector: str
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n_levels(self) -> int:
        return len(self.eigenvalues)


def diagonalize(
    H: np.ndarray,
    want_vectors: bool = True,
    *,
    params: ChainParams | None = None,
    sector: str = "full",
    embed: SymmetrySector | None = None,
) -> SpectrumResult:
    """Full spectrum of a real symmetric matrix, eigenvalues ascending.

    When ``embed`` is given the eigenvectors are mapped from sector
    coordinates to the full ``2**L`` space.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    asym = np.max(np.abs(H - H.T)) if H.size else 0.0
    if asym > 1e-10:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    if want_vectors:
        w, v = np.linalg.eigh(H)
        if embed is not None:
            v = embed.embed(v)
        return SpectrumResult(params, sector, w, v)
    return SpectrumResult(params, sector, np.linalg.eigvalsh(H), None)


def spectrum(params: ChainParams, sector: str = "full", want_vectors: bool = True) -> SpectrumResult:
    """Diagonalize H(params) in one reflection sector (or the full space)."""
    H, sec = sector_hamiltonian(params, sector)
    return diagonalize(H, want_vectors, params=params, sector=sector, embed=sec)


@dataclass
class LevelTrack:
    """Eigenvalues of one sector over a grid of tilt angles.

    ``levels[i, k]`` is the k-th lowest level at ``theta_grid[i]``. The optional
    ``matrix_fn`` rebuilds the sector matrix at any angle; crossing refinement
    needs it. ``measures`` maps a measure name to an array shaped like
    ``levels``.
    """

    theta_grid: np.ndarray
    levels: np.ndarray
    matrix_fn: Optional[Callable[[float], np.ndarray]] = field(default=None, repr=False)
    measures: dict = field(default_factory=dict, repr=False)

    @property
    def n_levels(self) -> int:
        return self.levels.shape[1]

    def gap(self, k: int) -> np.ndarray:
        return self.levels[:, k + 1] - self.levels[:, k]


@dataclass(frozen=True)
class AvoidedCrossing:
    level_pair: tuple[int, int]
    theta_star: float
    min_gap: float
    bracket: tuple[float, float]

    @property
    def degenerate(self) -> bool:
        """True if the gap closes to numerical zero (a real crossing)."""
        return self.min_gap < DEGENERATE_GAP


def sector_matrix_fn(params_base: ChainParams, sector: str) -> Callable[[float], np.ndarray]:
    def build(theta: float) -> np.ndarray:
        return sector_hamiltonian(params_base.replace(theta=float(theta)), sector)[0]

    return build


def _map(fn, items, workers: int):
    if workers is None or workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sweep_spectrum(
    params_base: ChainParams,
    theta_grid: Sequence[float],
    sector: str = "even",
    *,
    levels: Sequence[int] | None = None,
    measures: bool = False,
    workers: int = 1,
) -> LevelTrack:
    """Sector spectra over ``theta_grid``.

    Levels are labelled by their ascending index within the sector; since a
    single symmetry class has no true crossings this follows each level
    adiabatically. ``levels`` restricts the returned columns. With
    ``measures=True`` Q, total tangle and S_{L/2} of the selected eigenstates
    are recorded as well.
    """
    grid = np.asarray(theta_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1:
        raise ValueError("theta grid must be a nonempty 1-d sequence")
    build = sector_matrix_fn(params_base, sector)
    embed = None if sector == "full" else sector_hamiltonian(params_base, sector)[1]
    cols = None if levels is None else np.asarray(levels, dtype=int)

    def one(theta):
        H = build(theta)
        if not measures:
            w = np.linalg.eigvalsh(H)
            return (w if cols is None else w[cols]), None
        w, v = np.linalg.eigh(H)
        sel = np.arange(len(w)) if cols is None else cols
        vecs = v[:, sel] if embed is None else embed.embed(v[:, sel])
        rec = np.array(
            [[ent.q_measure(x), ent.total_tangle(x), ent.entropy_block(x, params_base.L // 2)]
             for x in vecs.T]
        )
        return w[sel], rec

    out = _map(one, grid, workers)
    track = LevelTrack(grid, np.array([o[0] for o in out]), matrix_fn=build)
    if measures:
        rec = np.array([o[1] for o in out])
        track.measures = {"Q": rec[..., 0], "total_tangle": rec[..., 1], "S_half": rec[..., 2]}
    if cols is not None:
        track.measures["level_index"] = cols
    return track


def level_gap(matrix_fn: Callable[[float], np.ndarray], k: int) -> Callable[[float], float]:
    def gap(theta: float) -> float:
        w = np.linalg.eigvalsh(matrix_fn(theta))
        return float(w[k + 1] - w[k])

    return gap


def golden_section_min(f: Callable[[float], float], a: float, b: float, tol: float) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[a, b]`` until the bracket is shorter than ``tol``."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    # keep the best evaluated point; the midpoint is not always it
    best = min((fx, x), (fc, c), (fd, d))
    return best[1], best[0]


def find_avoided_crossings(
    track: LevelTrack,
    pair: tuple[int, int],
    refine_tol: float = 1e-6,
    *,
    gap_fn: Callable[[float], float] | None = None,
    workers: int = 1,
) -> list[AvoidedCrossing]:
    """Locate and refine the gap minima of two adjacent levels of ``track``.

    ``pair`` indexes columns of ``track.levels``; the returned crossings carry
    sector level indices. Each interior local minimum
    of the gap on the grid is refined by golden-section search on the exact
    gap between its two neighbouring grid points. The exact gap comes from
    ``gap_fn`` if given, otherwise from rediagonalizing ``track.matrix_fn``;
    in that case the column index must equal the level index in the sector,
    or ``track.measures['level_index']`` must give the mapping.
    """
    k, k1 = pair
    if k1 != k + 1 or k < 0 or k1 >= track.n_levels:
        raise ValueError(f"pair must be adjacent columns within 0..{track.n_levels - 1}, got {pair}")
    idx = track.measures.get("level_index")
    lev = k if idx is None else int(idx[k])
    if gap_fn is None:
        if track.matrix_fn is None:
            raise ValueError("track carries no matrix_fn; pass gap_fn to refine")
        if idx is not None and int(idx[k1]) != lev + 1:
            raise ValueError("tracked columns are not adjacent sector levels")
        gap_fn = level_gap(track.matrix_fn, lev)

    grid = track.theta_grid
    g = track.gap(k)
    minima = [i for i in range(1, len(grid) - 1) if g[i] <= g[i - 1] and g[i] <= g[i + 1]
              and (g[i] < g[i - 1] or g[i] < g[i + 1])]

    def refine(i):
        a, b = grid[i - 1], grid[i + 1]
        theta, gmin = golden_section_min(gap_fn, a, b, refine_tol)
        if g[i] < gmin:
            theta, gmin = float(grid[i]), float(g[i])
        return AvoidedCrossing((lev, lev + 1), float(theta), float(gmin), (float(a), float(b)))

    return _map(refine, minima, workers)


@dataclass
class EigenstateRow:
    energy: float
    log_PR: float
    S_sh: float
    Q: float
    S_half: float


def eigenstate_report(result: SpectrumResult, *, workers: int = 1) -> list[EigenstateRow]:
    """Per-eigenstate localization and entanglement, sorted by energy."""
    if result.eigenvectors is None:
        raise ValueError("spectrum was computed without eigenvectors")
    vecs = result.eigenvectors
    s_half = ent.half_chain_entropies(vecs)

    def row(k):
        psi = vecs[:, k]
        log_pr, s_sh = ent.localization(psi)
        return EigenstateRow(float(result.eigenvalues[k]), log_pr, s_sh, ent.q_measure(psi), float(s_half[k]))

    rows = _map(row, range(vecs.shape[1]), workers)
    return sorted(rows, key=lambda r: r.energy)


def crossing_width(gap_fn: Callable[[float], float], ac: AvoidedCrossing, h: float | None = None) -> float:
    """Angular width ``g / v`` of an avoided crossing.

    Near the minimum the gap behaves as ``sqrt(g^2 + v^2 (theta - theta*)^2)``
    so its curvature there is ``v^2 / g``; the width follows from a central
    second difference.
    """
    g = ac.min_gap
    if h is None:
        h = max(1e-3 * (ac.bracket[1] - ac.bracket[0]), 1e-7)
    t = ac.theta_star
    curv = (gap_fn(t + h) - 2.0 * gap_fn(t) + gap_fn(t - h)) / (h * h)
    if curv <= 0 or g <= 0:
        return 0.5 * (ac.bracket[1] - ac.bracket[0])
    return float(np.sqrt(g / curv))


@dataclass
class CrossingProfile:
    """Entanglement of the two levels of an avoided crossing across a window.

    Arrays are indexed ``[theta, level]`` for the per-level quantities.
    """

    crossing: AvoidedCrossing
    theta: np.ndarray
    energies: np.ndarray
    Q: np.ndarray
    total_tangle: np.ndarray
    S_half: np.ndarray

    @property
    def avg_Q(self) -> np.ndarray:
        return self.Q.mean(axis=1)

    @property
    def avg_tangle(self) -> np.ndarray:
        return self.total_tangle.mean(axis=1)

    @property
    def avg_S_half(self) -> np.ndarray:
        return self.S_half.mean(axis=1)


def crossing_profile(
    params_base: ChainParams,
    sector: str,
    ac: AvoidedCrossing,
    level: int | None = None,
    *,
    half_width: float | None = None,
    widths: float = 5.0,
    n_points: int = 41,
    workers: int = 1,
) -> CrossingProfile:
    """Fine sweep of Q, total tangle and S_{L/2} of both levels around ``ac``.

    ``level`` is the sector index of the lower level (defaults to
    ``ac.level_pair[0]``). The window is ``theta* +/- half_width``; by default
    ``widths`` crossing widths.
    """
    k = ac.level_pair[0] if level is None else level
    build = sector_matrix_fn(params_base, sector)
    if half_width is None:
        half_width = widths * crossing_width(level_gap(build, k), ac)
    theta = np.linspace(ac.theta_star - half_width, ac.theta_star + half_width, n_points)
    track = sweep_spectrum(params_base, theta, sector, levels=[k, k + 1], measures=True, workers=workers)
    return CrossingProfile(
        ac, theta, track.levels, track.measures["Q"], track.measures["total_tangle"], track.measures["S_half"]
    )


def two_level_matrix_fn(theta0: float, g: float) -> Callable[[float], np.ndarray]:
    """``[[t - t0, g], [g, -(t - t0)]]``: an isolated crossing with gap ``2g`` at ``t0``."""

    def build(theta: float) -> np.ndarray:
        d = theta - theta0
        return np.array([[d, g], [g, -d]])

    return build


def synthetic_track(matrix_fn: Callable[[float], np.ndarray], theta_grid) -> LevelTrack:
    grid = np.asarray(theta_grid, dtype=float)
    levels = np.array([np.linalg.eigvalsh(matrix_fn(t)) for t in grid])
    return LevelTrack(grid, levels, matrix_fn=matrix_fn)
