"""
Normal-ordered fermionic operator sums and the spin-orbital effective Hamiltonian.

Spin-orbital (qubit) index: P = 2p + sigma with sigma = 0 for alpha, 1 for beta.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple
from collections import defaultdict
import logging

import numpy as np
from scipy import sparse

from algorithms.bitops import parity_array
from data.hamiltonian import MolecularHamiltonian

logger = logging.getLogger(__name__)

PRUNE_TOL = 1e-12

# (creation indices ascending, annihilation indices ascending)
TermKey = Tuple[Tuple[int, ...], Tuple[int, ...]]


def spin_of(mode: int) -> int:
    return mode & 1


class FermionTermSum:
    """
    Sum of normal-ordered fermionic monomials.

    A key ``((c1, ..., ck), (a1, ..., al))`` with ascending indices in each
    block stands for a+_c1 ... a+_ck a_a1 ... a_al.

    Attributes:
        n_modes: Number of spin-orbitals
        truncated_weight: Coefficient mass omitted by a length cut upstream
    """

    def __init__(
        self,
        n_modes: int,
        terms: Optional[Dict[TermKey, complex]] = None,
        truncated_weight: float = 0.0,
        tol: float = PRUNE_TOL,
    ):
        self.n_modes = n_modes
        self.truncated_weight = float(truncated_weight)
        self._terms: Dict[TermKey, complex] = {}
        for key, coefficient in (terms or {}).items():
            creations, annihilations = key
            if list(creations) != sorted(set(creations)) or list(annihilations) != sorted(set(annihilations)):
                raise ValueError(f"term {key} is not in canonical normal order")
            if any(not 0 <= mode < n_modes for mode in creations + annihilations):
                raise ValueError(f"term {key} addresses a mode outside [0, {n_modes})")
            if abs(coefficient) >= tol:
                self._terms[key] = complex(coefficient)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[TermKey]:
        return iter(sorted(self._terms))

    def __getitem__(self, key: TermKey) -> complex:
        return self._terms.get(key, 0.0)

    def items(self) -> List[Tuple[TermKey, complex]]:
        return [(key, self._terms[key]) for key in sorted(self._terms)]

    def lengths(self) -> Dict[int, int]:
        """Number of terms per operator length."""
        counts: Dict[int, int] = defaultdict(int)
        for creations, annihilations in self._terms:
            counts[len(creations) + len(annihilations)] += 1
        return dict(sorted(counts.items()))

    def to_sparse_matrix(self) -> sparse.csr_matrix:
        """Fock-space matrix in the same little-endian basis as PauliSum."""
        dim = 1 << self.n_modes
        rows, cols, values = [], [], []
        for (creations, annihilations), coefficient in self.items():
            state = np.arange(dim, dtype=np.int64)
            valid = np.ones(dim, dtype=bool)
            sign = np.ones(dim)
            # Rightmost operator acts first
            sequence = [(m, False) for m in reversed(annihilations)] + [
                (m, True) for m in reversed(creations)
            ]
            for mode, create in sequence:
                bit = 1 << mode
                occupied = (state & bit) != 0
                valid &= ~occupied if create else occupied
                sign *= 1 - 2 * parity_array(state & (bit - 1))
                state = state ^ bit
            columns = np.nonzero(valid)[0]
            rows.append(state[columns])
            cols.append(columns)
            values.append(coefficient * sign[columns])
        if not rows:
            return sparse.csr_matrix((dim, dim), dtype=complex)
        return sparse.coo_matrix(
            (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
            dtype=complex,
        ).tocsr()

    def __repr__(self) -> str:
        return f"FermionTermSum(n_modes={self.n_modes}, terms={len(self)}, lengths={self.lengths()})"


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """
    Particle-number and S_z conserving Hamiltonian over spin-orbitals:

        H = constant + sum_PR h[P,R] a+_P a_R + 1/4 sum_PQRS V[P,Q,R,S] a+_P a+_Q a_S a_R

    with V antisymmetric in (P,Q) and in (R,S). ``h`` and ``V`` may be complex
    Hermitian (rotated measurement bases); molecular input stays real.

    Attributes:
        n_orbitals: Number of spatial orbitals (n_modes = 2 * n_orbitals)
        n_alpha: Alpha electron count of the target sector
        n_beta: Beta electron count of the target sector
        constant: Scalar term
        h: (M, M) one-body matrix
        v: (M, M, M, M) antisymmetrized two-body tensor
        discarded_weight: Coefficient mass dropped while filtering, 0 for exact input
    """

    n_orbitals: int
    n_alpha: int
    n_beta: int
    constant: complex
    h: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    discarded_weight: float = 0.0

    @classmethod
    def from_molecular(cls, hamiltonian: MolecularHamiltonian) -> "EffectiveHamiltonian":
        """Spin-orbital form of a molecular Hamiltonian (chemists' integrals)."""
        n = hamiltonian.n_orbitals
        m = 2 * n
        identity = np.eye(2)
        h = np.kron(hamiltonian.one_body, identity)
        # phys[p,q,r,s] = (pr|qs)
        phys = hamiltonian.two_body.transpose(0, 2, 1, 3)
        g = np.einsum("pqrs,ac,bd->paqbrcsd", phys, identity, identity).reshape(m, m, m, m)
        v = g - g.transpose(0, 1, 3, 2)
        return cls(
            n_orbitals=n,
            n_alpha=hamiltonian.n_alpha,
            n_beta=hamiltonian.n_beta,
            constant=hamiltonian.core_energy,
            h=h,
            v=v,
        )

    @property
    def n_modes(self) -> int:
        return 2 * self.n_orbitals

    @property
    def is_real(self) -> bool:
        return bool(
            abs(complex(self.constant).imag) < PRUNE_TOL
            and np.max(np.abs(np.imag(self.h)), initial=0.0) < PRUNE_TOL
            and np.max(np.abs(np.imag(self.v)), initial=0.0) < PRUNE_TOL
        )

    def real_if_close(self) -> "EffectiveHamiltonian":
        """Drop negligible imaginary parts so real problems stay on the real code path."""
        if not self.is_real:
            return self
        return EffectiveHamiltonian(
            n_orbitals=self.n_orbitals,
            n_alpha=self.n_alpha,
            n_beta=self.n_beta,
            constant=float(complex(self.constant).real),
            h=np.real(self.h).copy(),
            v=np.real(self.v).copy(),
            discarded_weight=self.discarded_weight,
        )

    def to_fermion_terms(self, tol: float = PRUNE_TOL) -> FermionTermSum:
        """Canonical normal-ordered form (P < Q, R < S for the two-body part)."""
        m = self.n_modes
        terms: Dict[TermKey, complex] = defaultdict(complex)
        if abs(self.constant) >= tol:
            terms[((), ())] += self.constant
        for p, r in zip(*np.nonzero(np.abs(self.h) >= tol)):
            terms[((int(p),), (int(r),))] += self.h[p, r]
        for p, q, r, s in zip(*np.nonzero(np.abs(self.v) >= tol)):
            if p < q and r < s:
                # 1/4 V a+p a+q a_s a_r summed over the four images
                # = V[p,q,r,s] a+p a+q a_s a_r = -V[p,q,r,s] a+p a+q a_r a_s
                terms[((int(p), int(q)), (int(r), int(s)))] -= self.v[p, q, r, s]
        return FermionTermSum(m, terms, tol=tol)

    def to_sparse_matrix(self) -> sparse.csr_matrix:
        return self.to_fermion_terms().to_sparse_matrix()


def filter_physical(terms: FermionTermSum) -> Tuple[EffectiveHamiltonian, float]:
    """
    Keep the scalar, the spin-conserving a+_P a_R terms and the S_z-conserving
    a+_A a+_B a_C a_D terms; drop everything else.

    Args:
        terms: Normal-ordered fermionic sum

    Returns:
        (effective Hamiltonian with zero electron counts, discarded weight).
        The discarded weight is the summed |coefficient| of dropped terms plus
        ``terms.truncated_weight``. Callers set the electron counts.
    """
    m = terms.n_modes
    if m % 2:
        raise ValueError(f"spin-orbital count must be even, got {m}")
    constant = 0.0 + 0.0j
    h = np.zeros((m, m), dtype=complex)
    v = np.zeros((m, m, m, m), dtype=complex)
    discarded = terms.truncated_weight

    for (creations, annihilations), c in terms.items():
        if not creations and not annihilations:
            constant += c
        elif len(creations) == 1 and len(annihilations) == 1 and spin_of(creations[0]) == spin_of(annihilations[0]):
            h[creations[0], annihilations[0]] += c
        elif (
            len(creations) == 2
            and len(annihilations) == 2
            and sorted(map(spin_of, creations)) == sorted(map(spin_of, annihilations))
        ):
            a, b = creations
            cc, d = annihilations
            # c a+A a+B a_C a_D: V[A,B,D,C] = c with the antisymmetric images
            v[a, b, d, cc] += c
            v[b, a, d, cc] -= c
            v[a, b, cc, d] -= c
            v[b, a, cc, d] += c
        else:
            discarded += abs(c)

    effective = EffectiveHamiltonian(
        n_orbitals=m // 2,
        n_alpha=0,
        n_beta=0,
        constant=constant,
        h=h,
        v=v,
        discarded_weight=float(discarded),
    ).real_if_close()
    logger.debug(
        f"filter_physical: kept {len(terms)} -> one/two-body form, discarded weight {discarded:.3e}"
    )
    return effective, float(discarded)
