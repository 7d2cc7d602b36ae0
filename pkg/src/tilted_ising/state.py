"""Basis conventions, pure states and partial traces.

Basis convention used throughout the package: a chain of ``L`` spins is stored
as a complex vector of length ``2**L``. The spin string ``s_1 s_2 ... s_L`` maps
to the integer ``sum_n s_n 2**(L-n)``, so site 1 is the most significant bit.
Bit 0 is sigma^z = +1 (spin up), bit 1 is sigma^z = -1.

Sites are addressed 1-based in the public functions, matching the usual
physics labelling of the chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

#: eigenvalues of a reduced density matrix above this negative value are
#: rounding noise and get clipped to zero before any logarithm
EIG_CLIP = 1e-10


@dataclass(frozen=True)
class ChainParams:
    """Parameters of the tilted-field Ising chain.

    ``H = J sum_n sz_n sz_{n+1} + B sum_n (sin(theta) sx_n + cos(theta) sz_n)``
    with open boundaries.
    """

    L: int
    J: float = 1.0
    B: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"chain length must be a positive integer, got {self.L!r}")

    @property
    def dim(self) -> int:
        return 2 ** self.L

    def replace(self, **changes) -> "ChainParams":
        fields = dict(L=self.L, J=self.J, B=self.B, theta=self.theta)
        fields.update(changes)
        return ChainParams(**fields)


@dataclass(frozen=True)
class ReducedDensityMatrix:
    sites: tuple[int, ...]
    matrix: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order, tiny negatives clipped to zero."""
        w = np.linalg.eigvalsh(self.matrix)
        return np.where(w < EIG_CLIP, np.maximum(w, 0.0), w)


def num_sites(psi: np.ndarray) -> int:
    """Chain length of a state vector; raises if the length is not a power of 2."""
    dim = np.shape(psi)[-1]
    L = int(dim).bit_length() - 1
    if dim < 2 or 2 ** L != dim:
        raise ValueError(f"state length {dim} is not 2**L with L >= 1")
    return L


def basis_index(spins: Sequence[int], L: int | None = None) -> int:
    """Integer label of a computational basis state.

    >>> basis_index([0, 1, 0])
    2
    """
    if L is not None and len(spins) != L:
        raise ValueError(f"expected {L} spins, got {len(spins)}")
    k = 0
    for s in spins:
        if s not in (0, 1):
            raise ValueError(f"spin values must be 0 or 1, got {s!r}")
        k = (k << 1) | int(s)
    return k


def basis_state(spins: Sequence[int]) -> np.ndarray:
    psi = np.zeros(2 ** len(spins), dtype=complex)
    psi[basis_index(spins)] = 1.0
    return psi


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return psi / norm


def bit_reverse_indices(L: int) -> np.ndarray:
    """Permutation ``k -> reverse of the L-bit word of k`` for all k."""
    k = np.arange(2 ** L)
    rev = np.zeros_like(k)
    for n in range(L):
        rev |= ((k >> n) & 1) << (L - 1 - n)
    return rev


def bit_reverse_state(psi: np.ndarray) -> np.ndarray:
    """Reflect the chain: amplitude at index k moves to the reversed word of k."""
    psi = np.asarray(psi)
    out = np.empty_like(psi)
    out[..., bit_reverse_indices(num_sites(psi))] = psi
    return out


def _check_sites(sites: Iterable[int], L: int) -> tuple[int, ...]:
    sites = tuple(int(s) for s in sites)
    if not sites:
        raise ValueError("site subset must be nonempty")
    if any(b <= a for a, b in zip(sites, sites[1:])):
        raise ValueError(f"sites must be strictly increasing, got {sites}")
    if sites[0] < 1 or sites[-1] > L:
        raise ValueError(f"sites must lie in [1, {L}], got {sites}")
    return sites


def partial_trace(psi: np.ndarray, keep: Iterable[int]) -> ReducedDensityMatrix:
    """Reduced density matrix of the sites in ``keep`` (1-based, increasing).

    ``<a|rho|b> = sum_e psi(a, e) conj(psi(b, e))`` with ``e`` running over the
    configurations of the traced-out sites. The kept sites keep their relative
    order, the lowest-numbered site being the most significant bit of the
    reduced basis.
    """
    psi = np.asarray(psi)
    L = num_sites(psi)
    sites = _check_sites(keep, L)
    axes = [s - 1 for s in sites]
    rest = [n for n in range(L) if n not in axes]
    m = np.transpose(psi.reshape((2,) * L), axes + rest).reshape(2 ** len(axes), -1)
    rho = m @ m.conj().T
    # exact Hermiticity; the product is Hermitian only up to rounding
    rho = 0.5 * (rho + rho.conj().T)
    return ReducedDensityMatrix(sites, rho)


def partial_trace_pair(psi: np.ndarray, i: int, j: int) -> ReducedDensityMatrix:
    """Two-site reduced state in the order |00>, |01>, |10>, |11> (site i first)."""
    if i == j:
        raise ValueError("pair sites must differ")
    if i > j:
        raise ValueError(f"expected i < j, got ({i}, {j})")
    return partial_trace(psi, (i, j))


def single_site_purities(psi: np.ndarray) -> np.ndarray:
    """Tr(rho_k^2) for every site k = 1..L, in one pass."""
    psi = np.asarray(psi)
    L = num_sites(psi)
    t = psi.reshape((2,) * L)
    out = np.empty(L)
    for n in range(L):
        m = np.moveaxis(t, n, 0).reshape(2, -1)
        rho = m @ m.conj().T
        out[n] = np.real(np.vdot(rho, rho))
    return out


def random_state(L: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state of ``L`` qubits."""
    psi = rng.standard_normal(2 ** L) + 1j * rng.standard_normal(2 ** L)
    return psi / np.linalg.norm(psi)
