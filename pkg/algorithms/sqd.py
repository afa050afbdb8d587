"""
Sample-based diagonalization with self-consistent configuration recovery.

Each round repairs the sampled bitstrings towards the target particle sector
using the current orbital occupancies, draws K batches of at most d distinct
determinants, diagonalizes the Hamiltonian projected onto each batch and
averages the batch ground-state occupancies for the next round.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from algorithms.davidson import davidson_ground
from algorithms.fermion import EffectiveHamiltonian
from algorithms.slater_condon import project, sector_counts_array
from data.hamiltonian import MolecularHamiltonian
from utils.errors import RecoveryError
from utils.helpers import PhaseTimer

logger = logging.getLogger(__name__)

HamiltonianLike = Union[MolecularHamiltonian, EffectiveHamiltonian]


@dataclass(frozen=True)
class Occupancies:
    """
    Spin-orbital occupation numbers n_q in [0, 1], indexed by qubit 2p + sigma.
    """

    values: np.ndarray

    @property
    def n_orbitals(self) -> int:
        return self.values.shape[0] // 2

    @property
    def alpha(self) -> np.ndarray:
        return self.values[0::2]

    @property
    def beta(self) -> np.ndarray:
        return self.values[1::2]

    @classmethod
    def uniform(cls, n_orbitals: int, n_alpha: int, n_beta: int) -> "Occupancies":
        values = np.empty(2 * n_orbitals)
        values[0::2] = n_alpha / n_orbitals
        values[1::2] = n_beta / n_orbitals
        return cls(values)

    def as_list(self) -> List[float]:
        return [float(v) for v in self.values]


def compute_occupancies(
    vectors: Sequence[np.ndarray],
    batches: Sequence[Sequence[int]],
    n_orbitals: int,
) -> Occupancies:
    """
    Batch-averaged occupations n_q = (1/K) sum_k sum_x |psi_k(x)|^2 occ(x, q).

    Args:
        vectors: Ground-state coefficient vectors, one per batch
        batches: Determinant indices of each batch, in vector order
        n_orbitals: Spatial orbitals

    Returns:
        Occupancies
    """
    if len(vectors) != len(batches) or not vectors:
        raise ValueError("need one ground-state vector per batch and at least one batch")
    n_qubits = 2 * n_orbitals
    total = np.zeros(n_qubits)
    for vector, dets in zip(vectors, batches):
        weights = np.abs(np.asarray(vector)) ** 2
        weights = weights / weights.sum()
        dets = np.asarray(dets, dtype=np.int64)
        bits = (dets[:, None] >> np.arange(n_qubits)) & 1
        total += weights @ bits
    return Occupancies(total / len(vectors))


def filter_sector(
    samples: np.ndarray,
    n_alpha: int,
    n_beta: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distinct in-sector bitstrings and their shot counts.

    Returns:
        (sorted determinant indices, counts)
    """
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size == 0:
        return samples, np.zeros(0, dtype=np.int64)
    alpha, beta = sector_counts_array(samples)
    kept = samples[(alpha == n_alpha) & (beta == n_beta)]
    return np.unique(kept, return_counts=True)


def _repair(
    bitstring: int,
    occupancies: np.ndarray,
    targets: Tuple[int, int],
    n_orbitals: int,
    rng: np.random.Generator,
) -> int:
    for sigma, target in enumerate(targets):
        qubits = np.arange(sigma, 2 * n_orbitals, 2)
        while True:
            bits = (bitstring >> qubits) & 1
            count = int(bits.sum())
            if count == target:
                break
            if count > target:
                candidates = qubits[bits == 1]
                weights = 1.0 - occupancies[candidates]
            else:
                candidates = qubits[bits == 0]
                weights = occupancies[candidates].copy()
            weights = np.clip(weights, 0.0, None)
            if weights.sum() <= 0.0:
                weights = np.ones(candidates.shape[0])
            chosen = int(rng.choice(candidates, p=weights / weights.sum()))
            bitstring ^= 1 << chosen
    return bitstring


def configuration_recovery(
    samples: np.ndarray,
    occupancies: Occupancies,
    n_alpha: int,
    n_beta: int,
    seed: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Repair sampled bitstrings to the (n_alpha, n_beta) sector.

    For a spin with surplus electrons an occupied orbital is emptied with
    probability proportional to 1 - n_q; for a deficit an empty orbital is
    filled with probability proportional to n_q (uniform if all weights
    vanish). In-sector bitstrings pass through unchanged.

    Args:
        samples: Sampled basis indices (one per shot)
        occupancies: Current occupation estimates
        n_alpha: Target alpha count
        n_beta: Target beta count
        seed: Seed for the flip choices

    Returns:
        (distinct repaired determinants sorted by index, shot counts)

    Raises:
        RecoveryError: target counts do not fit the orbital count
    """
    n_orbitals = occupancies.n_orbitals
    if not (0 <= n_alpha <= n_orbitals and 0 <= n_beta <= n_orbitals):
        raise RecoveryError(
            f"cannot place ({n_alpha}, {n_beta}) electrons in {n_orbitals} orbitals"
        )
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size == 0:
        return samples, np.zeros(0, dtype=np.int64)
    rng = np.random.default_rng(seed)
    values, counts = np.unique(samples, return_counts=True)
    alpha, beta = sector_counts_array(values)
    repaired: Dict[int, int] = {}
    repaired_shots = 0
    for value, count, n_a, n_b in zip(values, counts, alpha, beta):
        value = int(value)
        if n_a == n_alpha and n_b == n_beta:
            repaired[value] = repaired.get(value, 0) + int(count)
            continue
        repaired_shots += int(count)
        for _ in range(int(count)):
            fixed = _repair(value, occupancies.values, (n_alpha, n_beta), n_orbitals, rng)
            repaired[fixed] = repaired.get(fixed, 0) + 1
    if repaired_shots:
        logger.debug(f"Recovered {repaired_shots} of {samples.size} shots outside the target sector")
    dets = np.array(sorted(repaired), dtype=np.int64)
    return dets, np.array([repaired[int(d)] for d in dets], dtype=np.int64)


@dataclass
class RoundDiagnostics:
    """One self-consistency round."""

    round_index: int
    batch_energies: List[float]
    dimensions: List[int]
    occupancies: List[float]
    pool_size: int

    @property
    def energy(self) -> float:
        return min(self.batch_energies)

    def as_dict(self) -> dict:
        return {
            "round": self.round_index,
            "energy": self.energy,
            "batch_energies": list(self.batch_energies),
            "dimensions": list(self.dimensions),
            "occupancies": list(self.occupancies),
            "pool_size": self.pool_size,
        }


@dataclass
class SqdResult:
    """
    Outcome of :func:`sqd_energy`.

    Attributes:
        energy: Minimum batch energy of the final round
        occupancies: Occupancies of the final round
        diagnostics: Per-round records
        dets: Determinants of the lowest-energy batch of the final round
        vector: Its ground-state coefficients
    """

    energy: float
    occupancies: Occupancies
    diagnostics: List[RoundDiagnostics] = field(default_factory=list)
    dets: Optional[np.ndarray] = None
    vector: Optional[np.ndarray] = None

    @property
    def rounds(self) -> int:
        return len(self.diagnostics)


def _draw_batches(
    dets: np.ndarray,
    counts: np.ndarray,
    n_batches: int,
    batch_size: int,
    rng: np.random.Generator,
) -> List[np.ndarray]:
    if dets.shape[0] <= batch_size:
        return [dets]
    weights = counts / counts.sum()
    return [
        np.sort(rng.choice(dets, size=batch_size, replace=False, p=weights))
        for _ in range(n_batches)
    ]


def sqd_energy(
    hamiltonian: HamiltonianLike,
    samples: np.ndarray,
    n_alpha: Optional[int] = None,
    n_beta: Optional[int] = None,
    batches: int = 3,
    batch_size: int = 200,
    max_rounds: int = 10,
    energy_tol: float = 1e-6,
    recover: bool = True,
    seed: Optional[int] = None,
    davidson_tol: float = 1e-8,
    davidson_max_iter: int = 200,
    timer: Optional[PhaseTimer] = None,
) -> SqdResult:
    """
    Sample-based ground-state energy.

    Round 0 uses the raw in-sector samples (or uniform occupancies when no
    sample is in sector). With ``recover=False`` the samples are only
    sector-filtered and a single round is run.

    Args:
        hamiltonian: Molecular or effective Hamiltonian
        samples: Sampled basis indices
        n_alpha: Target alpha count (defaults to the Hamiltonian's)
        n_beta: Target beta count (defaults to the Hamiltonian's)
        batches: Number of batches K per round
        batch_size: Maximum batch dimension d
        max_rounds: Round limit
        energy_tol: Stop when successive round energies differ by less
        recover: Repair out-of-sector samples instead of discarding them
        seed: Seed for recovery flips and batch draws
        davidson_tol: Residual tolerance of each diagonalization
        davidson_max_iter: Iteration limit of each diagonalization
        timer: Optional phase timer ("projection", "davidson")

    Returns:
        SqdResult

    Raises:
        RecoveryError: no usable determinants (empty samples, or nothing in
            sector with recovery disabled)
        DavidsonConvergenceError: propagated from a batch diagonalization
    """
    n_alpha = hamiltonian.n_alpha if n_alpha is None else n_alpha
    n_beta = hamiltonian.n_beta if n_beta is None else n_beta
    n_orbitals = hamiltonian.n_orbitals
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size == 0:
        raise RecoveryError("no samples to diagonalize")
    timer = timer or PhaseTimer()
    rng = np.random.default_rng(seed)

    pool, counts = filter_sector(samples, n_alpha, n_beta)
    occupancies = None
    if pool.size == 0:
        if not recover:
            raise RecoveryError(f"no sample lies in the ({n_alpha}, {n_beta}) sector")
        occupancies = Occupancies.uniform(n_orbitals, n_alpha, n_beta)
        pool, counts = configuration_recovery(
            samples, occupancies, n_alpha, n_beta, seed=int(rng.integers(2**62))
        )

    diagnostics: List[RoundDiagnostics] = []
    previous = None
    result = None
    for round_index in range(max_rounds):
        if round_index > 0:
            pool, counts = configuration_recovery(
                samples, occupancies, n_alpha, n_beta, seed=int(rng.integers(2**62))
            )
        batch_list = _draw_batches(pool, counts, batches, batch_size, rng)
        energies, vectors = [], []
        for dets in batch_list:
            with timer.phase("projection"):
                problem = project(hamiltonian, dets)
            with timer.phase("davidson"):
                energy, vector = davidson_ground(problem, tol=davidson_tol, max_iter=davidson_max_iter)
            energies.append(float(energy))
            vectors.append(vector)
        occupancies = compute_occupancies(vectors, batch_list, n_orbitals)
        record = RoundDiagnostics(
            round_index=round_index,
            batch_energies=energies,
            dimensions=[int(d.shape[0]) for d in batch_list],
            occupancies=occupancies.as_list(),
            pool_size=int(pool.shape[0]),
        )
        diagnostics.append(record)
        best = int(np.argmin(energies))
        result = SqdResult(
            energy=record.energy,
            occupancies=occupancies,
            diagnostics=diagnostics,
            dets=batch_list[best],
            vector=vectors[best],
        )
        logger.debug(
            f"SQD round {round_index}: energy {record.energy:.10f}, "
            f"pool {record.pool_size}, batch dims {record.dimensions}"
        )
        if not recover:
            break
        if previous is not None and abs(record.energy - previous) < energy_tol:
            break
        previous = record.energy
    return result

