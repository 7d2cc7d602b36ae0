"""Hamiltonian of the Ising chain in a tilted field and its reflection sectors.

The matrix is assembled in CSR form (``L + 1`` nonzeros per row) and densified
on demand. At L = 13 the dense matrix already takes half a gigabyte, while the
two reflection blocks together take a quarter of that, so the sector blocks
are projected straight from the sparse form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse

from .state import ChainParams, bit_reverse_indices

SECTORS = ("even", "odd", "full")


def spin_z(L: int) -> np.ndarray:
    """Array ``z[n, k]`` of sigma^z eigenvalues (+1/-1) of site n+1 in basis state k."""
    k = np.arange(2 ** L)
    shifts = L - 1 - np.arange(L)
    return 1 - 2 * ((k[None, :] >> shifts[:, None]) & 1)


def diagonal_terms(L: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-basis-state coupling sum ``sum z_n z_{n+1}`` and magnetization ``sum z_n``."""
    z = spin_z(L)
    bonds = (z[:-1] * z[1:]).sum(axis=0) if L > 1 else np.zeros(2 ** L, dtype=int)
    return bonds, z.sum(axis=0)


@dataclass(frozen=True)
class HamiltonianMatrix:
    params: ChainParams
    matrix: sparse.csr_matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __array__(self, dtype=None, copy=None):
        return self.dense() if dtype is None else self.dense().astype(dtype)


def build_hamiltonian(params: ChainParams) -> HamiltonianMatrix:
    """Build H(J, B, theta) for an open chain of ``params.L`` spins."""
    L = params.L
    if L < 1:
        raise ValueError("chain length must be at least 1")
    dim = 2 ** L
    bonds, mag = diagonal_terms(L)
    diag = params.J * bonds + params.B * np.cos(params.theta) * mag

    k = np.arange(dim)
    hx = params.B * np.sin(params.theta)
    rows = [k]
    cols = [k]
    vals = [diag.astype(float)]
    if hx != 0.0:
        for n in range(L):
            rows.append(k)
            cols.append(k ^ (1 << n))
            vals.append(np.full(dim, hx))
    H = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    H.sort_indices()
    return HamiltonianMatrix(params, H)


@dataclass(frozen=True)
class SymmetrySector:
    """Basis of one bit-reversal parity sector.

    Every basis vector is ``(|a> + sign |b>)/sqrt(2)`` for a non-palindromic
    pair ``a < b = reverse(a)``, or ``|a>`` for a palindrome. Palindromes come
    first (ascending), then the pairs ordered by their smaller index.
    """

    L: int
    parity: str
    first: np.ndarray
    second: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.first)

    @cached_property
    def basis(self) -> sparse.csc_matrix:
        """Sparse ``2**L x dim`` matrix whose columns are the sector basis vectors."""
        sign = 1.0 if self.parity == "even" else -1.0
        cols = np.arange(self.dim)
        pal = self.first == self.second
        w = np.where(pal, 1.0, 1.0 / np.sqrt(2.0))
        rows = np.concatenate([self.first, self.second[~pal]])
        cc = np.concatenate([cols, cols[~pal]])
        vals = np.concatenate([w, sign * w[~pal]])
        return sparse.csc_matrix((vals, (rows, cc)), shape=(2 ** self.L, self.dim))

    def dense_basis(self) -> np.ndarray:
        return self.basis.toarray()

    def embed(self, vectors: np.ndarray) -> np.ndarray:
        """Map sector-coordinate vectors (columns) to the full space."""
        return np.asarray(self.basis @ vectors)


def build_sectors(L: int) -> tuple[SymmetrySector, SymmetrySector]:
    """Even and odd sectors of the reflection ``|s_1 ... s_L> -> |s_L ... s_1>``."""
    if L < 1:
        raise ValueError("chain length must be at least 1")
    k = np.arange(2 ** L)
    rev = bit_reverse_indices(L)
    pal = k[rev == k]
    lo = k[k < rev]
    even = SymmetrySector(L, "even", np.concatenate([pal, lo]), np.concatenate([pal, rev[lo]]))
    odd = SymmetrySector(L, "odd", lo, rev[lo])
    return even, odd


def sector_dims(L: int) -> tuple[int, int]:
    n_pal = 2 ** ((L + 1) // 2)
    return (2 ** L + n_pal) // 2, (2 ** L - n_pal) // 2


def project_to_sector(H: HamiltonianMatrix, sector: SymmetrySector) -> np.ndarray:
    """Dense block ``V^T H V`` of the Hamiltonian in a parity sector."""
    if sector.L != H.params.L:
        raise ValueError(f"sector built for L={sector.L}, Hamiltonian has L={H.params.L}")
    V = sector.basis
    block = (V.T @ H.matrix @ V).toarray()
    # V^T H V is symmetric in exact arithmetic; enforce it bitwise
    return 0.5 * (block + block.T)


def cross_block_norm(H: HamiltonianMatrix) -> float:
    """Largest matrix element of H between the even and odd sectors."""
    even, odd = build_sectors(H.params.L)
    if odd.dim == 0:
        return 0.0
    block = even.basis.T @ H.matrix @ odd.basis
    return float(abs(block).max()) if block.nnz else 0.0


def sector_hamiltonian(params: ChainParams, sector: str) -> tuple[np.ndarray, SymmetrySector | None]:
    """Dense Hamiltonian restricted to ``sector`` ('even', 'odd' or 'full')."""
    if sector not in SECTORS:
        raise ValueError(f"sector must be one of {SECTORS}, got {sector!r}")
    H = build_hamiltonian(params)
    if sector == "full":
        return H.dense(), None
    even, odd = build_sectors(params.L)
    sec = even if sector == "even" else odd
    return project_to_sector(H, sec), sec


def spin_flip_y(L: int) -> sparse.csr_matrix:
    """The operator ``sigma^y x ... x sigma^y`` on L sites."""
    sy = sparse.csr_matrix(np.array([[0, -1j], [1j, 0]]))
    op = sy
    for _ in range(L - 1):
        op = sparse.kron(op, sy, format="csr")
    return op


def duality_check(params: ChainParams, explicit_max_L: int = 6) -> float:
    """Deviation of the spectrum of H(J) from the negated, reversed spectrum of H(-J).

    For chains up to ``explicit_max_L`` sites the conjugation by the
    product of sigma^y is also checked at matrix level and the larger of the
    two deviations is returned.
    """
    H = build_hamiltonian(params)
    Hm = build_hamiltonian(params.replace(J=-params.J))
    e = np.linalg.eigvalsh(H.dense())
    em = np.linalg.eigvalsh(Hm.dense())
    dev = float(np.max(np.abs(e + em[::-1])))
    if params.L <= explicit_max_L:
        Y = spin_flip_y(params.L)
        conj = (Y @ H.matrix @ Y).toarray()
        dev = max(dev, float(np.max(np.abs(conj + Hm.dense()))))
    return dev
