"""Unitary evolution by spectral decomposition and time-resolved entanglement."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import entanglement as ent
from .hamiltonian import build_hamiltonian
from .state import ChainParams, basis_index

DEFAULT_MAX_L = 14
OBSERVABLES = ("nn_concurrence", "Q", "total_tangle")
NOT_QUENCHED = math.inf


class ResourceLimitError(RuntimeError):
    """Chain too long for dense exact diagonalization under the current limit."""


def max_chain_length() -> int:
    return int(os.environ.get("TILTED_ISING_MAX_L", DEFAULT_MAX_L))


def check_size(L: int) -> None:
    limit = max_chain_length()
    if L > limit:
        raise ResourceLimitError(
            f"L={L} exceeds the limit of {limit} sites; set TILTED_ISING_MAX_L to raise it"
        )


def bell_seed_state(L: int, pair: tuple[int, int] = (1, 2), filler: int = 1) -> np.ndarray:
    """``(|11> + |00>)/sqrt(2)`` on ``pair``, every other site in ``|filler>``.

    The default is the state with the Bell pair on the first two sites and
    all remaining spins down.
    """
    if L < 3:
        raise ValueError(f"need at least 3 sites, got L={L}")
    i, j = pair
    if not 1 <= i < j <= L:
        raise ValueError(f"invalid pair {pair} for L={L}")
    if filler not in (0, 1):
        raise ValueError("filler bit must be 0 or 1")
    psi = np.zeros(2 ** L, dtype=complex)
    for b in (0, 1):
        spins = [filler] * L
        spins[i - 1] = spins[j - 1] = b
        psi[basis_index(spins)] = 1.0 / np.sqrt(2.0)
    return psi


@dataclass
class EvolutionPlan:
    params: ChainParams
    initial: np.ndarray
    t_grid: np.ndarray
    observables: tuple[str, ...] = OBSERVABLES

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        if np.any(self.t_grid < 0) or np.any(np.diff(self.t_grid) < 0):
            raise ValueError("time grid must be nonnegative and ascending")
        unknown = set(self.observables) - set(OBSERVABLES)
        if unknown:
            raise ValueError(f"unknown observables {sorted(unknown)}")


@dataclass
class TimeSeries:
    times: np.ndarray
    nn_concurrence: np.ndarray | None = None
    Q: np.ndarray | None = None
    total_tangle: np.ndarray | None = None
    norm: np.ndarray | None = field(default=None, repr=False)

    @property
    def avg_nn_concurrence(self) -> np.ndarray:
        return self.nn_concurrence.mean(axis=1)


class SpectralPropagator:
    """``exp(-i H t)`` applied through one full eigendecomposition of H."""

    def __init__(self, params: ChainParams):
        check_size(params.L)
        self.params = params
        self.H = build_hamiltonian(params).dense()
        self.energies, self.vectors = np.linalg.eigh(self.H)

    def coefficients(self, psi0: np.ndarray) -> np.ndarray:
        return self.vectors.T @ psi0

    def states(self, psi0: np.ndarray, times: Sequence[float]) -> np.ndarray:
        """Evolved states as rows, one per time."""
        c = self.coefficients(np.asarray(psi0, dtype=complex))
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.energies))
        return (phases * c) @ self.vectors.T

    def state(self, psi0: np.ndarray, t: float) -> np.ndarray:
        return self.states(psi0, [t])[0]

    def energy(self, psi: np.ndarray) -> float:
        return float(np.real(np.vdot(psi, self.H @ psi)))


def _observe(psi: np.ndarray, observables) -> tuple:
    L = int(np.log2(len(psi)))
    if "total_tangle" in observables:
        C = ent.concurrence_matrix(psi)
        nn = np.diagonal(C, 1).copy()
        tau = float(np.sum(np.triu(C, 1) ** 2))
    else:
        nn = ent.nn_concurrences(psi) if "nn_concurrence" in observables else np.zeros(L - 1)
        tau = np.nan
    q = ent.q_measure(psi) if "Q" in observables else np.nan
    return nn, q, tau


def evolve(plan: EvolutionPlan, *, workers: int = 1, chunk: int = 256) -> TimeSeries:
    """Evolve ``plan.initial`` under H(plan.params) and record the observables."""
    prop = SpectralPropagator(plan.params)
    obs = set(plan.observables)
    rows = []
    norms = []
    for start in range(0, len(plan.t_grid), chunk):
        block = prop.states(plan.initial, plan.t_grid[start:start + chunk])
        norms.append(np.linalg.norm(block, axis=1))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows.extend(pool.map(lambda x: _observe(x, obs), block))
        else:
            rows.extend(_observe(x, obs) for x in block)
    series = TimeSeries(plan.t_grid, norm=np.concatenate(norms))
    if "nn_concurrence" in obs:
        series.nn_concurrence = np.array([r[0] for r in rows])
    if "Q" in obs:
        series.Q = np.array([r[1] for r in rows])
    if "total_tangle" in obs:
        series.total_tangle = np.array([r[2] for r in rows])
    return series


def quench_time(times, values, threshold: float = 0.05, window: float = 5.0) -> float:
    """First time after which ``values`` stay below ``threshold`` for ``window``.

    Returns ``NOT_QUENCHED`` (infinity) when no such time exists inside the
    sampled range.
    """
    times = np.asarray(times, dtype=float)
    below = np.asarray(values, dtype=float) < threshold
    n = len(times)
    # last index of the current run of below-threshold samples
    run_end = np.full(n, -1)
    end = -1
    for i in range(n - 1, -1, -1):
        if below[i]:
            if end < 0:
                end = i
            run_end[i] = end
        else:
            end = -1
    for i in range(n):
        if below[i] and (i == 0 or not below[i - 1]) and times[run_end[i]] - times[i] >= window:
            return float(times[i])
    return NOT_QUENCHED
