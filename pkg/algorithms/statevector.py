"""
Exact statevector engine for the LUCJ ansatz.

Basis index bit q is the occupation of qubit q = 2p + sigma. The ansatz is

    |Psi> = prod_mu exp(K_mu) exp(i J_mu) exp(-K_mu) |RHF>

with each K_mu a real antisymmetric orbital generator shared by both spins
(applied as Givens rotations) and each J_mu a symmetric density-density
coupling restricted to an interaction pattern of qubit pairs.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.linalg import expm

from algorithms.bitops import parity_array
from algorithms.pauli import MeasurementBasis, PauliSum
from utils.errors import BasisMismatchError, CapacityError

logger = logging.getLogger(__name__)

MAX_QUBITS = 24
NORM_TOL = 1e-10
ANTISYMMETRY_TOL = 1e-12

Pair = Tuple[int, int]

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
_MEASUREMENT_GATES = {
    "X": _HADAMARD.astype(complex),
    "Y": _HADAMARD @ np.diag([1.0, -1.0j]),
}


class Statevector:
    """
    Read-only amplitude vector over ``n_qubits`` qubits.

    Attributes:
        n_qubits: Number of qubits
        amplitudes: Complex array of length 2^n_qubits (not writeable)
    """

    def __init__(self, amplitudes: np.ndarray, n_qubits: Optional[int] = None):
        amplitudes = np.array(amplitudes, dtype=complex, copy=True)
        if n_qubits is None:
            n_qubits = int(round(math.log2(amplitudes.shape[0])))
        if amplitudes.shape != (1 << n_qubits,):
            raise ValueError(f"amplitude shape {amplitudes.shape} does not match {n_qubits} qubits")
        amplitudes.setflags(write=False)
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self) -> str:
        return f"Statevector(n_qubits={self.n_qubits}, norm={self.norm():.12f})"


def check_capacity(n_qubits: int) -> None:
    if n_qubits > MAX_QUBITS:
        raise CapacityError(f"statevector of {n_qubits} qubits exceeds the {MAX_QUBITS}-qubit cap")


def rhf_index(n_orbitals: int, n_alpha: int, n_beta: int) -> int:
    """Basis index of the determinant filling the lowest orbitals of each spin."""
    if not (0 <= n_alpha <= n_orbitals and 0 <= n_beta <= n_orbitals):
        raise ValueError(
            f"electron counts ({n_alpha}, {n_beta}) out of range for {n_orbitals} orbitals"
        )
    index = 0
    for p in range(n_alpha):
        index |= 1 << (2 * p)
    for p in range(n_beta):
        index |= 1 << (2 * p + 1)
    return index


def rhf_state(n_orbitals: int, n_alpha: int, n_beta: int) -> Statevector:
    """
    Restricted Hartree-Fock determinant as a statevector.

    Args:
        n_orbitals: Active spatial orbitals
        n_alpha: Active alpha electrons
        n_beta: Active beta electrons

    Returns:
        Basis state with the lowest orbitals of each spin occupied
    """
    n_qubits = 2 * n_orbitals
    check_capacity(n_qubits)
    amplitudes = np.zeros(1 << n_qubits, dtype=complex)
    amplitudes[rhf_index(n_orbitals, n_alpha, n_beta)] = 1.0
    return Statevector(amplitudes, n_qubits)


def default_interaction_pairs(n_orbitals: int) -> List[Pair]:
    """Same-qubit pairs (q, q) plus nearest-neighbour qubit pairs (q, q + 1)."""
    n_qubits = 2 * n_orbitals
    pairs = [(q, q) for q in range(n_qubits)] + [(q, q + 1) for q in range(n_qubits - 1)]
    return sorted(pairs)


def _normalize_pairs(pairs: Sequence[Sequence[int]], n_qubits: int) -> Tuple[Pair, ...]:
    normalized = set()
    for a, b in pairs:
        a, b = sorted((int(a), int(b)))
        if not (0 <= a < n_qubits and 0 <= b < n_qubits):
            raise ValueError(f"interaction pair ({a}, {b}) outside {n_qubits} qubits")
        normalized.add((a, b))
    return tuple(sorted(normalized))


def n_parameters(n_orbitals: int, layers: int, pairs: Optional[Sequence[Pair]] = None) -> int:
    """Length of the packed parameter vector."""
    if pairs is None:
        pairs = default_interaction_pairs(n_orbitals)
    n_pairs = len(_normalize_pairs(pairs, 2 * n_orbitals))
    return layers * (n_orbitals * (n_orbitals - 1) // 2 + n_pairs)


@dataclass(frozen=True)
class LucjParameters:
    """
    Layered LUCJ parameters.

    Packed layout per layer: K as its strictly-lower triangle in row-major
    order (K[i, j] = t, K[j, i] = -t for i > j), then J over ``pairs`` in
    sorted order (J[a, b] = J[b, a] = t).

    Attributes:
        n_orbitals: Active spatial orbitals
        k_matrices: Per-layer real antisymmetric (n, n) generators
        j_matrices: Per-layer real symmetric (2n, 2n) couplings
        pairs: Allowed (a, b) qubit pairs, a <= b
    """

    n_orbitals: int
    k_matrices: Tuple[np.ndarray, ...] = field(repr=False)
    j_matrices: Tuple[np.ndarray, ...] = field(repr=False)
    pairs: Tuple[Pair, ...] = field(repr=False)

    def __post_init__(self):
        n = self.n_orbitals
        m = 2 * n
        pairs = _normalize_pairs(self.pairs, m)
        allowed = np.zeros((m, m), dtype=bool)
        for a, b in pairs:
            allowed[a, b] = allowed[b, a] = True
        if len(self.k_matrices) != len(self.j_matrices):
            raise ValueError("k_matrices and j_matrices must have the same number of layers")
        for k in self.k_matrices:
            if k.shape != (n, n) or not np.allclose(k, -k.T, atol=ANTISYMMETRY_TOL, rtol=0.0):
                raise ValueError("each K must be a real antisymmetric (n, n) matrix")
        for j in self.j_matrices:
            if j.shape != (m, m) or not np.allclose(j, j.T, atol=ANTISYMMETRY_TOL, rtol=0.0):
                raise ValueError("each J must be a real symmetric (2n, 2n) matrix")
            if np.any(j[~allowed] != 0.0):
                raise ValueError("J has entries outside the interaction pattern")
        object.__setattr__(self, "pairs", pairs)

    @property
    def layers(self) -> int:
        return len(self.k_matrices)

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_orbitals

    @classmethod
    def from_vector(
        cls,
        vector: Sequence[float],
        n_orbitals: int,
        layers: int = 1,
        pairs: Optional[Sequence[Pair]] = None,
    ) -> "LucjParameters":
        """Unpack a flat parameter vector."""
        n = n_orbitals
        m = 2 * n
        pairs = _normalize_pairs(pairs if pairs is not None else default_interaction_pairs(n), m)
        vector = np.asarray(vector, dtype=float)
        expected = n_parameters(n, layers, pairs)
        if vector.shape != (expected,):
            raise ValueError(f"expected {expected} parameters, got shape {vector.shape}")
        lower = [(i, j) for i in range(n) for j in range(i)]
        k_matrices, j_matrices = [], []
        offset = 0
        for _ in range(layers):
            k = np.zeros((n, n))
            for (i, j), value in zip(lower, vector[offset:offset + len(lower)]):
                k[i, j] = value
                k[j, i] = -value
            offset += len(lower)
            jastrow = np.zeros((m, m))
            for (a, b), value in zip(pairs, vector[offset:offset + len(pairs)]):
                jastrow[a, b] = jastrow[b, a] = value
            offset += len(pairs)
            k_matrices.append(k)
            j_matrices.append(jastrow)
        return cls(n, tuple(k_matrices), tuple(j_matrices), pairs)

    def to_vector(self) -> np.ndarray:
        n = self.n_orbitals
        values = []
        for k, jastrow in zip(self.k_matrices, self.j_matrices):
            values.extend(k[i, j] for i in range(n) for j in range(i))
            values.extend(jastrow[a, b] for a, b in self.pairs)
        return np.array(values, dtype=float)

    @classmethod
    def zeros(cls, n_orbitals: int, layers: int = 1, pairs: Optional[Sequence[Pair]] = None) -> "LucjParameters":
        return cls.from_vector(np.zeros(n_parameters(n_orbitals, layers, pairs)), n_orbitals, layers, pairs)

    @classmethod
    def random(
        cls,
        n_orbitals: int,
        layers: int = 1,
        pairs: Optional[Sequence[Pair]] = None,
        seed: Optional[int] = None,
        scale: float = 0.1,
    ) -> "LucjParameters":
        """Parameters drawn uniformly from [-scale, scale]."""
        rng = np.random.default_rng(seed)
        size = n_parameters(n_orbitals, layers, pairs)
        return cls.from_vector(rng.uniform(-scale, scale, size=size), n_orbitals, layers, pairs)


def givens_decomposition(unitary: np.ndarray) -> Tuple[List[Tuple[int, int, float]], np.ndarray]:
    """
    Reduce a real orthogonal matrix to a diagonal sign matrix with adjacent rotations.

    Rotation G(i, j, t) acts on rows i < j with G_ii = G_jj = cos t,
    G_ij = sin t, G_ji = -sin t. The returned list satisfies
    G_m ... G_1 U = diag(signs).

    Args:
        unitary: Real orthogonal (n, n) matrix

    Returns:
        ([(i, j, t), ...] in application order, signs)
    """
    work = np.array(unitary, dtype=float, copy=True)
    n = work.shape[0]
    rotations = []
    for column in range(n - 1):
        for row in range(n - 1, column, -1):
            if work[row, column] == 0.0:
                continue
            theta = math.atan2(work[row, column], work[row - 1, column])
            c, s = math.cos(theta), math.sin(theta)
            upper = work[row - 1].copy()
            lower = work[row].copy()
            work[row - 1] = c * upper + s * lower
            work[row] = -s * upper + c * lower
            rotations.append((row - 1, row, theta))
    signs = np.sign(np.diag(work))
    signs[signs == 0] = 1.0
    return rotations, signs


def _apply_two_level(
    amplitudes: np.ndarray,
    indices: np.ndarray,
    qubit_i: int,
    qubit_j: int,
    phi: float,
) -> None:
    """In place: exp(phi (a+_i a_j - a+_j a_i)) for qubits i < j."""
    bit_i = 1 << qubit_i
    bit_j = 1 << qubit_j
    between = (bit_j - 1) & ~((bit_i << 1) - 1)
    only_j = indices[((indices & bit_i) == 0) & ((indices & bit_j) != 0)]
    only_i = only_j ^ (bit_i | bit_j)
    sign = 1 - 2 * parity_array(only_j & between)
    c, s = math.cos(phi), math.sin(phi)
    psi_j = amplitudes[only_j].copy()
    psi_i = amplitudes[only_i].copy()
    amplitudes[only_j] = c * psi_j - sign * s * psi_i
    amplitudes[only_i] = c * psi_i + sign * s * psi_j


def apply_orbital_rotation(amplitudes: np.ndarray, rotation: np.ndarray, n_orbitals: int) -> np.ndarray:
    """
    Apply the number-conserving orbital rotation a+_p -> sum_q R_qp a+_q to both spins.

    Args:
        amplitudes: Statevector amplitudes over 2 * n_orbitals qubits
        rotation: Real orthogonal (n, n) single-particle matrix
        n_orbitals: Spatial orbitals

    Returns:
        New amplitude array
    """
    result = np.array(amplitudes, dtype=complex, copy=True)
    indices = np.arange(result.shape[0], dtype=np.int64)
    rotations, signs = givens_decomposition(rotation)
    for p in np.nonzero(signs < 0)[0]:
        for sigma in (0, 1):
            occupied = (indices >> (2 * int(p) + sigma)) & 1
            result *= 1 - 2 * occupied
    for i, j, theta in reversed(rotations):
        for sigma in (0, 1):
            _apply_two_level(result, indices, 2 * i + sigma, 2 * j + sigma, -theta)
    return result


def apply_jastrow(amplitudes: np.ndarray, jastrow: np.ndarray) -> np.ndarray:
    """Multiply each basis state by exp(i sum_ab J_ab n_a n_b)."""
    indices = np.arange(amplitudes.shape[0], dtype=np.int64)
    phase = np.zeros(amplitudes.shape[0])
    m = jastrow.shape[0]
    for a in range(m):
        occ_a = (indices >> a) & 1
        if jastrow[a, a] != 0.0:
            phase += jastrow[a, a] * occ_a
        for b in range(a + 1, m):
            if jastrow[a, b] != 0.0:
                phase += 2.0 * jastrow[a, b] * occ_a * ((indices >> b) & 1)
    return amplitudes * np.exp(1j * phase)


def prepare_lucj(params: LucjParameters, n_alpha: int, n_beta: int) -> Statevector:
    """
    Prepare the LUCJ state from the RHF determinant.

    Layers act right to left: the last layer is applied first, each as
    exp(-K), then exp(iJ), then exp(K).

    Args:
        params: Ansatz parameters
        n_alpha: Active alpha electrons
        n_beta: Active beta electrons

    Returns:
        Normalized statevector in the (n_alpha, n_beta) sector

    Raises:
        CapacityError: more than MAX_QUBITS qubits
    """
    n = params.n_orbitals
    state = np.array(rhf_state(n, n_alpha, n_beta).amplitudes)
    for k, jastrow in reversed(list(zip(params.k_matrices, params.j_matrices))):
        if np.any(k != 0.0):
            state = apply_orbital_rotation(state, expm(-k), n)
        state = apply_jastrow(state, jastrow)
        if np.any(k != 0.0):
            state = apply_orbital_rotation(state, expm(k), n)
    result = Statevector(state, 2 * n)
    if abs(result.norm() - 1.0) > NORM_TOL:
        logger.warning(f"LUCJ state norm drifted to {result.norm():.12f}")
    return result


def rotate_for_measurement(state: Statevector, basis: MeasurementBasis) -> Statevector:
    """
    Rotate a state so computational-basis sampling measures ``basis``.

    X-qubits get H, Y-qubits get H S^dagger, Z-qubits nothing.

    Raises:
        BasisMismatchError: basis length differs from the qubit count
    """
    n = state.n_qubits
    if basis.n_qubits != n:
        raise BasisMismatchError(f"basis {basis} has {basis.n_qubits} qubits, state has {n}")
    if basis.is_all_z:
        return state
    tensor = np.array(state.amplitudes).reshape([2] * n)
    for qubit, letter in enumerate(basis.letters):
        if letter == "Z":
            continue
        axis = n - 1 - qubit
        tensor = np.tensordot(_MEASUREMENT_GATES[letter], tensor, axes=([1], [axis]))
        tensor = np.moveaxis(tensor, 0, axis)
    return Statevector(tensor.reshape(-1), n)


def sample(state: Statevector, n_shots: int, seed: Optional[int] = None) -> np.ndarray:
    """
    Draw computational-basis outcomes.

    Args:
        state: Normalized statevector
        n_shots: Number of shots
        seed: Seed for numpy's default generator

    Returns:
        int64 array of basis indices (one bitstring per shot)
    """
    rng = np.random.default_rng(seed)
    probabilities = state.probabilities()
    probabilities = probabilities / probabilities.sum()
    return rng.choice(state.dim, size=n_shots, p=probabilities).astype(np.int64)


def expectation(state: Statevector, operator: PauliSum) -> float:
    """
    Real expectation <s|P|s>.

    Raises:
        ValueError: qubit counts differ, or the imaginary part is material
    """
    if operator.n_qubits != state.n_qubits:
        raise ValueError(f"operator has {operator.n_qubits} qubits, state has {state.n_qubits}")
    value = operator.expectation(state.amplitudes)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise ValueError(f"expectation has imaginary part {value.imag:.3e}; operator is not Hermitian")
    return float(value.real)


def bitstring(index: int, n_qubits: int) -> str:
    """Occupation string with qubit 0 first."""
    return "".join(str((index >> q) & 1) for q in range(n_qubits))
