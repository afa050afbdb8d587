"""
Determinants and Slater-Condon matrix elements on qubit occupation masks.

A determinant is stored as one integer whose bit 2p + sigma is the
occupation of spatial orbital p with spin sigma (same layout as the
statevector basis index). Fermionic signs follow the Jordan-Wigner order.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Sequence, Tuple, Union
import logging
import math

import numpy as np
from scipy import sparse

from algorithms.bitops import bits_below, occupied, parity, popcount, popcount_array
from algorithms.fermion import EffectiveHamiltonian
from data.hamiltonian import MolecularHamiltonian
from utils.errors import CapacityError

logger = logging.getLogger(__name__)

MATRIX_TOL = 1e-12
MAX_FCI_DETERMINANTS = 2_000_000

_ALPHA_BITS = int("01" * 32, 2)
_BETA_BITS = _ALPHA_BITS << 1


@dataclass(frozen=True, order=True)
class Determinant:
    """
    Slater determinant as per-spin occupation masks over spatial orbitals.

    Attributes:
        alpha_mask: Bit p set when orbital p holds an alpha electron
        beta_mask: Bit p set when orbital p holds a beta electron
    """

    alpha_mask: int
    beta_mask: int

    @classmethod
    def from_index(cls, index: int) -> "Determinant":
        alpha = beta = 0
        p = 0
        while index:
            alpha |= (index & 1) << p
            beta |= ((index >> 1) & 1) << p
            index >>= 2
            p += 1
        return cls(alpha, beta)

    def to_index(self) -> int:
        index = 0
        for p in occupied(self.alpha_mask):
            index |= 1 << (2 * p)
        for p in occupied(self.beta_mask):
            index |= 1 << (2 * p + 1)
        return index

    @property
    def n_alpha(self) -> int:
        return popcount(self.alpha_mask)

    @property
    def n_beta(self) -> int:
        return popcount(self.beta_mask)


def sector_counts(index: int) -> Tuple[int, int]:
    """(n_alpha, n_beta) of a qubit occupation index."""
    return popcount(index & _ALPHA_BITS), popcount(index & _BETA_BITS)


def sector_counts_array(indices: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    indices = np.asarray(indices, dtype=np.int64)
    return popcount_array(indices & _ALPHA_BITS), popcount_array((indices >> 1) & _ALPHA_BITS)


def sector_size(n_orbitals: int, n_alpha: int, n_beta: int) -> int:
    return math.comb(n_orbitals, n_alpha) * math.comb(n_orbitals, n_beta)


def fci_space(
    n_orbitals: int,
    n_alpha: int,
    n_beta: int,
    max_determinants: int = MAX_FCI_DETERMINANTS,
) -> np.ndarray:
    """
    All determinants of the (n_alpha, n_beta) sector, sorted by index.

    Raises:
        CapacityError: the sector holds more than ``max_determinants``
    """
    size = sector_size(n_orbitals, n_alpha, n_beta)
    if size > max_determinants:
        raise CapacityError(
            f"FCI sector of {size} determinants exceeds the cap of {max_determinants}"
        )
    alpha_indices = [
        sum(1 << (2 * p) for p in occ) for occ in combinations(range(n_orbitals), n_alpha)
    ]
    beta_indices = [
        sum(1 << (2 * p + 1) for p in occ) for occ in combinations(range(n_orbitals), n_beta)
    ]
    dets = np.array([a | b for a in alpha_indices for b in beta_indices], dtype=np.int64)
    return np.sort(dets)


def _as_effective(hamiltonian: Union[MolecularHamiltonian, EffectiveHamiltonian]) -> EffectiveHamiltonian:
    if isinstance(hamiltonian, MolecularHamiltonian):
        return EffectiveHamiltonian.from_molecular(hamiltonian)
    return hamiltonian


def _excitation_sign(state: int, creations: Sequence[int], annihilations: Sequence[int]) -> int:
    """Sign of a+_c1 ... a+_ck a_a1 ... a_al |state>, rightmost operator first."""
    sign = 1
    for mode in reversed(annihilations):
        if parity(state & bits_below(mode)):
            sign = -sign
        state ^= 1 << mode
    for mode in reversed(creations):
        if parity(state & bits_below(mode)):
            sign = -sign
        state ^= 1 << mode
    return sign


class _ElementKernel:
    """Slater-Condon rules against one effective Hamiltonian."""

    def __init__(self, hamiltonian: EffectiveHamiltonian):
        self.h = hamiltonian.h
        self.v = hamiltonian.v
        self.constant = hamiltonian.constant
        self.n_modes = hamiltonian.n_modes
        # pair_diagonal[P, Q] = V[P, Q, P, Q]
        self.pair_diagonal = np.einsum("pqpq->pq", self.v)
        # spectator[P, R, Q] = V[P, Q, R, Q]
        self.spectator = np.einsum("pqrq->prq", self.v)
        self.dtype = np.result_type(self.h.dtype, self.v.dtype, np.asarray(self.constant).dtype)
        if np.issubdtype(self.dtype, np.complexfloating) and abs(complex(self.constant).imag) < MATRIX_TOL:
            self.constant = complex(self.constant).real

    def diagonal(self, det: int):
        occ = list(occupied(det))
        if not occ:
            return self.constant
        one_body = sum(self.h[p, p] for p in occ)
        two_body = 0.5 * self.pair_diagonal[np.ix_(occ, occ)].sum()
        return self.constant + one_body + two_body

    def element(self, x: int, y: int):
        if x == y:
            return self.diagonal(x)
        if popcount(x) != popcount(y):
            return 0.0
        difference = x ^ y
        degree = popcount(difference)
        if degree > 4:
            return 0.0
        particles = [q for q in occupied(difference & x)]
        holes = [q for q in occupied(difference & y)]
        if degree == 2:
            p, r = particles[0], holes[0]
            occ = list(occupied(y))
            value = self.h[p, r] + self.spectator[p, r, occ].sum()
            return _excitation_sign(y, [p], [r]) * value
        p, q = particles
        r, s = holes
        # a+p a+q a_s a_r: annihilate r first
        return _excitation_sign(y, [p, q], [s, r]) * self.v[p, q, r, s]


def slater_condon_element(
    hamiltonian: Union[MolecularHamiltonian, EffectiveHamiltonian],
    x: Union[int, Determinant],
    y: Union[int, Determinant],
):
    """
    Matrix element <x|H|y> between two determinants.

    Args:
        hamiltonian: Molecular or spin-orbital effective Hamiltonian
        x: Bra determinant (qubit index or Determinant)
        y: Ket determinant

    Returns:
        Real or complex scalar; zero beyond double excitations
    """
    if isinstance(x, Determinant):
        x = x.to_index()
    if isinstance(y, Determinant):
        y = y.to_index()
    return _ElementKernel(_as_effective(hamiltonian)).element(int(x), int(y))


@dataclass
class SubspaceProblem:
    """
    Hamiltonian projected onto a determinant set.

    Attributes:
        dets: Distinct determinant indices (dimension d)
        matrix: (d, d) Hermitian sparse matrix, rows/columns in ``dets`` order
    """

    dets: np.ndarray
    matrix: sparse.csr_matrix = field(repr=False)

    @property
    def dimension(self) -> int:
        return int(self.dets.shape[0])

    def diagonal(self) -> np.ndarray:
        return np.real(self.matrix.diagonal())


def project(
    hamiltonian: Union[MolecularHamiltonian, EffectiveHamiltonian],
    dets: Sequence[int],
) -> SubspaceProblem:
    """
    Project a Hamiltonian onto the span of the given determinants.

    Only pairs within double-excitation distance are evaluated; the lower
    triangle is the conjugate of the upper one and entries below 1e-12 are
    not stored.

    Args:
        hamiltonian: Molecular or effective Hamiltonian
        dets: Distinct determinant indices

    Returns:
        SubspaceProblem

    Raises:
        ValueError: empty or repeated determinants
    """
    dets = np.asarray(dets, dtype=np.int64)
    if dets.size == 0:
        raise ValueError("cannot project onto an empty determinant set")
    if np.unique(dets).size != dets.size:
        raise ValueError("determinants passed to project must be distinct")

    kernel = _ElementKernel(_as_effective(hamiltonian))
    d = dets.shape[0]
    counts = popcount_array(dets)
    rows: List[int] = []
    cols: List[int] = []
    values: List[complex] = []

    for i in range(d):
        x = int(dets[i])
        diagonal = kernel.diagonal(x)
        rows.append(i)
        cols.append(i)
        values.append(np.real(diagonal) if np.iscomplexobj(diagonal) else diagonal)
        if i + 1 == d:
            continue
        distance = popcount_array(dets[i + 1:] ^ x)
        candidates = np.nonzero((distance <= 4) & (counts[i + 1:] == counts[i]))[0] + i + 1
        for j in candidates:
            value = kernel.element(x, int(dets[j]))
            if abs(value) < MATRIX_TOL:
                continue
            rows.extend((i, int(j)))
            cols.extend((int(j), i))
            values.extend((value, np.conj(value)))

    dtype = complex if np.issubdtype(kernel.dtype, np.complexfloating) else float
    matrix = sparse.coo_matrix(
        (np.array(values, dtype=dtype), (np.array(rows), np.array(cols))),
        shape=(d, d),
    ).tocsr()
    logger.debug(f"Projected onto {d} determinants: {matrix.nnz} stored entries")
    return SubspaceProblem(dets=dets, matrix=matrix)
