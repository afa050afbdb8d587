"""
Second-quantized molecular Hamiltonian and frozen-core active-space reduction.

Integrals follow the chemists' convention: the electronic Hamiltonian is

    H = E_core + sum_{pr,s} h_pr a+_ps a_rs
        + 1/2 sum_{pqrs,st} (pr|qs) a+_ps a+_qt a_st a_rs

with spatial indices p, q, r, s and spin indices s, t.
"""

from dataclasses import dataclass, field
from typing import Tuple
import logging

import numpy as np

from utils.errors import ActiveSpaceError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10

# Axis permutations generating the 8-fold symmetry images of (pq|rs).
EIGHTFOLD_PERMUTATIONS: Tuple[Tuple[int, int, int, int], ...] = (
    (0, 1, 2, 3),
    (1, 0, 2, 3),
    (0, 1, 3, 2),
    (1, 0, 3, 2),
    (2, 3, 0, 1),
    (3, 2, 0, 1),
    (2, 3, 1, 0),
    (3, 2, 1, 0),
)


def _frozen_array(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class MolecularHamiltonian:
    """
    Electronic Hamiltonian over spatial orbitals with 8-fold symmetric integrals.

    Attributes:
        n_orbitals: Number of spatial orbitals
        n_alpha: Number of alpha electrons
        n_beta: Number of beta electrons
        core_energy: Scalar energy (nuclear repulsion plus frozen core), Hartree
        one_body: Symmetric (n, n) matrix h_pr
        two_body: (n, n, n, n) tensor (pq|rs) in chemists' notation
    """

    n_orbitals: int
    n_alpha: int
    n_beta: int
    core_energy: float
    one_body: np.ndarray = field(repr=False)
    two_body: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.n_orbitals
        if n < 1:
            raise ValueError(f"n_orbitals must be positive, got {n}")
        one_body = _frozen_array(self.one_body)
        two_body = _frozen_array(self.two_body)
        if one_body.shape != (n, n):
            raise ValueError(f"one_body shape {one_body.shape} != {(n, n)}")
        if two_body.shape != (n, n, n, n):
            raise ValueError(f"two_body shape {two_body.shape} != {(n,) * 4}")
        if not np.allclose(one_body, one_body.T, atol=SYMMETRY_TOL, rtol=0.0):
            raise ValueError("one_body integrals are not symmetric")
        for perm in EIGHTFOLD_PERMUTATIONS[1:]:
            if not np.allclose(two_body, two_body.transpose(perm), atol=SYMMETRY_TOL, rtol=0.0):
                raise ValueError(f"two_body integrals violate permutation symmetry {perm}")
        for label, count in (("n_alpha", self.n_alpha), ("n_beta", self.n_beta)):
            if not 0 <= count <= n:
                raise ValueError(f"{label}={count} outside [0, {n}]")
        object.__setattr__(self, "one_body", one_body)
        object.__setattr__(self, "two_body", two_body)
        object.__setattr__(self, "core_energy", float(self.core_energy))

    @property
    def n_qubits(self) -> int:
        """Qubit count under the Jordan-Wigner mapping (two spin-orbitals per orbital)."""
        return 2 * self.n_orbitals

    @property
    def n_electrons(self) -> int:
        return self.n_alpha + self.n_beta

    def summary(self) -> dict:
        """Short description used by the ``parse`` command and result records."""
        return {
            "n_orbitals": self.n_orbitals,
            "n_alpha": self.n_alpha,
            "n_beta": self.n_beta,
            "n_qubits": self.n_qubits,
            "core_energy": self.core_energy,
        }


@dataclass(frozen=True)
class ActiveSpaceSpec:
    """
    Frozen-orbital selection: the listed spatial orbitals are held doubly occupied.

    Attributes:
        frozen_orbitals: Ordered spatial-orbital indices
    """

    frozen_orbitals: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "frozen_orbitals", tuple(int(i) for i in self.frozen_orbitals))

    @classmethod
    def lowest(cls, count: int) -> "ActiveSpaceSpec":
        """Freeze the ``count`` lowest-index orbitals."""
        return cls(tuple(range(count)))

    def validate(self, hamiltonian: MolecularHamiltonian) -> None:
        """
        Check the selection against a Hamiltonian.

        Raises:
            ActiveSpaceError: duplicate or out-of-range indices, more frozen
                orbitals than electrons of either spin, or no active orbital left
        """
        frozen = self.frozen_orbitals
        if len(set(frozen)) != len(frozen):
            raise ActiveSpaceError(f"duplicate frozen orbitals in {list(frozen)}")
        for index in frozen:
            if not 0 <= index < hamiltonian.n_orbitals:
                raise ActiveSpaceError(
                    f"frozen orbital {index} outside [0, {hamiltonian.n_orbitals})"
                )
        limit = min(hamiltonian.n_alpha, hamiltonian.n_beta)
        if len(frozen) > limit:
            raise ActiveSpaceError(
                f"{len(frozen)} frozen orbitals exceed min(n_alpha, n_beta) = {limit}"
            )
        if len(frozen) >= hamiltonian.n_orbitals:
            raise ActiveSpaceError(
                f"freezing {len(frozen)} of {hamiltonian.n_orbitals} orbitals leaves an empty active space"
            )


def apply_frozen_orbitals(
    hamiltonian: MolecularHamiltonian,
    spec: ActiveSpaceSpec,
) -> MolecularHamiltonian:
    """
    Fold doubly occupied frozen orbitals into the core energy and a mean-field shift.

    Args:
        hamiltonian: Full-space Hamiltonian
        spec: Frozen-orbital selection

    Returns:
        Active-space Hamiltonian over the non-frozen orbitals (original order)

    Raises:
        ActiveSpaceError: if the selection is invalid for this Hamiltonian
    """
    spec.validate(hamiltonian)
    frozen = list(spec.frozen_orbitals)
    if not frozen:
        return hamiltonian

    h = hamiltonian.one_body
    g = hamiltonian.two_body
    active = [p for p in range(hamiltonian.n_orbitals) if p not in set(frozen)]

    core = hamiltonian.core_energy + 2.0 * sum(h[f, f] for f in frozen)
    for f in frozen:
        for f2 in frozen:
            core += 2.0 * g[f, f, f2, f2] - g[f, f2, f2, f]

    # Mean field of the frozen core: sum_f 2 (pr|ff) - (pf|fr)
    coulomb = sum(g[:, :, f, f] for f in frozen)
    exchange = sum(g[:, f, f, :] for f in frozen)
    mean_field = 2.0 * coulomb - exchange
    one_body = (h + mean_field)[np.ix_(active, active)]
    two_body = g[np.ix_(active, active, active, active)]

    n_frozen = len(frozen)
    reduced = MolecularHamiltonian(
        n_orbitals=len(active),
        n_alpha=hamiltonian.n_alpha - n_frozen,
        n_beta=hamiltonian.n_beta - n_frozen,
        core_energy=core,
        one_body=one_body,
        two_body=two_body,
    )
    logger.info(
        f"Froze orbitals {frozen}: {hamiltonian.n_orbitals} -> {reduced.n_orbitals} orbitals, "
        f"core energy {reduced.core_energy:.8f}"
    )
    return reduced


def symmetrize_two_body(tensor: np.ndarray) -> np.ndarray:
    """
    Average a four-index tensor over its 8 permutation images.

    Args:
        tensor: (n, n, n, n) array

    Returns:
        Tensor with full 8-fold (pq|rs) symmetry
    """
    return sum(tensor.transpose(perm) for perm in EIGHTFOLD_PERMUTATIONS) / 8.0
