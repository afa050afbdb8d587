"""
Pauli strings, weighted Pauli sums and single-qubit measurement bases.

A PauliString is stored in symplectic form: two integer masks ``x`` and ``z``
over ``n_qubits`` qubits with the per-qubit letter

    x=0 z=0 -> I,  x=1 z=0 -> X,  x=1 z=1 -> Y,  x=0 z=1 -> Z

and operator value i^{|x & z|} X^x Z^z, so every string is a Hermitian
tensor product of the usual Pauli matrices. Labels list qubit 0 first.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union
from collections import defaultdict
import logging

import numpy as np
from scipy import sparse

from algorithms.bitops import parity, parity_array, popcount
from utils.errors import BasisMismatchError

logger = logging.getLogger(__name__)

PRUNE_TOL = 1e-12

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}
_I_POWERS = (1, 1j, -1, -1j)


@dataclass(frozen=True, order=True)
class PauliString:
    """Phase-free Pauli string over ``n_qubits`` qubits."""

    n_qubits: int
    x: int
    z: int

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """
        Build a string from a label such as ``"XIZY"`` (qubit 0 first).

        Args:
            label: Letters from {I, X, Y, Z}

        Returns:
            PauliString
        """
        x = z = 0
        for qubit, letter in enumerate(label.upper()):
            if letter not in _LETTER_BITS:
                raise ValueError(f"invalid Pauli letter {letter!r} in {label!r}")
            bx, bz = _LETTER_BITS[letter]
            x |= bx << qubit
            z |= bz << qubit
        return cls(len(label), x, z)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> "PauliString":
        bx, bz = _LETTER_BITS[letter.upper()]
        return cls(n_qubits, bx << qubit, bz << qubit)

    def letter(self, qubit: int) -> str:
        return _BITS_LETTER[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    @property
    def label(self) -> str:
        return "".join(self.letter(q) for q in range(self.n_qubits))

    @property
    def support(self) -> int:
        """Mask of qubits carrying a non-identity letter."""
        return self.x | self.z

    @property
    def weight(self) -> int:
        return popcount(self.support)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_diagonal(self) -> bool:
        """True when the string holds only I and Z letters."""
        return self.x == 0

    def multiply(self, other: "PauliString") -> Tuple[complex, "PauliString"]:
        """
        Product ``self * other`` as (phase, string).

        Returns:
            Phase in {1, i, -1, -i} and the phase-free product string
        """
        if self.n_qubits != other.n_qubits:
            raise ValueError(f"qubit counts differ: {self.n_qubits} vs {other.n_qubits}")
        x = self.x ^ other.x
        z = self.z ^ other.z
        exponent = (
            popcount(self.x & self.z)
            + popcount(other.x & other.z)
            + 2 * popcount(self.z & other.x)
            - popcount(x & z)
        )
        return _I_POWERS[exponent % 4], PauliString(self.n_qubits, x, z)

    def qubitwise_compatible(self, other: "PauliString") -> bool:
        """True when every qubit carries equal letters or at least one identity."""
        differ = (self.x ^ other.x) | (self.z ^ other.z)
        return differ & self.support & other.support == 0

    def __str__(self) -> str:
        return self.label


def _apply_strings(
    strings: List[PauliString],
    coefficients: np.ndarray,
    vector: np.ndarray,
) -> np.ndarray:
    indices = np.arange(vector.shape[0], dtype=np.int64)
    result = np.zeros_like(vector, dtype=complex)
    for pauli, coefficient in zip(strings, coefficients):
        phase = _I_POWERS[popcount(pauli.x & pauli.z) % 4]
        signs = 1 - 2 * parity_array(indices & pauli.z)
        # P|i> = phase (-1)^{z.i} |i ^ x>
        result[indices ^ pauli.x] += coefficient * phase * signs * vector
    return result


class PauliSum:
    """
    Weighted sum of Pauli strings.

    Coefficients below ``tol`` in magnitude are pruned on construction and
    after every algebraic operation. Iteration order is lexicographic by label.
    """

    def __init__(
        self,
        n_qubits: int,
        terms: Optional[Dict[PauliString, complex]] = None,
        tol: float = PRUNE_TOL,
    ):
        self.n_qubits = n_qubits
        self.tol = tol
        self._terms: Dict[PauliString, complex] = {}
        for pauli, coefficient in (terms or {}).items():
            if pauli.n_qubits != n_qubits:
                raise ValueError(f"string {pauli} has {pauli.n_qubits} qubits, expected {n_qubits}")
            coefficient = complex(coefficient)
            if abs(coefficient) < tol:
                continue
            if abs(coefficient.imag) < tol:
                coefficient = complex(coefficient.real, 0.0)
            self._terms[pauli] = coefficient

    @classmethod
    def from_labels(cls, pairs: Iterable[Tuple[str, complex]], tol: float = PRUNE_TOL) -> "PauliSum":
        """
        Build a sum from (label, coefficient) pairs; repeated labels accumulate.

        Raises:
            ValueError: empty input or labels of different length
        """
        accumulated: Dict[PauliString, complex] = defaultdict(complex)
        n_qubits = None
        for label, coefficient in pairs:
            pauli = PauliString.from_label(label)
            if n_qubits is None:
                n_qubits = pauli.n_qubits
            elif pauli.n_qubits != n_qubits:
                raise ValueError(f"label {label!r} does not have {n_qubits} letters")
            accumulated[pauli] += coefficient
        if n_qubits is None:
            raise ValueError("from_labels needs at least one term")
        return cls(n_qubits, accumulated, tol=tol)

    @classmethod
    def identity(cls, n_qubits: int, coefficient: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, {PauliString.identity(n_qubits): coefficient})

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, pauli: PauliString) -> bool:
        return pauli in self._terms

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self.strings())

    def __getitem__(self, pauli: PauliString) -> complex:
        return self._terms.get(pauli, 0.0)

    def strings(self) -> List[PauliString]:
        return sorted(self._terms, key=lambda p: p.label)

    def items(self) -> List[Tuple[PauliString, complex]]:
        return [(pauli, self._terms[pauli]) for pauli in self.strings()]

    def as_dict(self) -> Dict[PauliString, complex]:
        return dict(self._terms)

    @property
    def identity_coefficient(self) -> complex:
        return self._terms.get(PauliString.identity(self.n_qubits), 0.0)

    def non_identity(self) -> "PauliSum":
        identity = PauliString.identity(self.n_qubits)
        return PauliSum(
            self.n_qubits,
            {p: c for p, c in self._terms.items() if p != identity},
            tol=self.tol,
        )

    def restricted_to(self, strings: Iterable[PauliString]) -> "PauliSum":
        """Sub-sum over the given strings (missing strings are skipped)."""
        return PauliSum(
            self.n_qubits,
            {p: self._terms[p] for p in strings if p in self._terms},
            tol=self.tol,
        )

    def one_norm(self, include_identity: bool = False) -> float:
        return float(
            sum(abs(c) for p, c in self._terms.items() if include_identity or not p.is_identity)
        )

    def max_imaginary(self) -> float:
        return max((abs(c.imag) for c in self._terms.values()), default=0.0)

    def is_hermitian(self, tol: float = PRUNE_TOL) -> bool:
        return self.max_imaginary() < tol

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check_compatible(other)
        accumulated = defaultdict(complex, self._terms)
        for pauli, coefficient in other._terms.items():
            accumulated[pauli] += coefficient
        return PauliSum(self.n_qubits, accumulated, tol=self.tol)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other * -1.0

    def __mul__(self, scalar: Union[int, float, complex]) -> "PauliSum":
        return PauliSum(self.n_qubits, {p: c * scalar for p, c in self._terms.items()}, tol=self.tol)

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, with phases folded into coefficients."""
        self._check_compatible(other)
        accumulated: Dict[PauliString, complex] = defaultdict(complex)
        for left in self.strings():
            for right in other.strings():
                phase, product = left.multiply(right)
                accumulated[product] += phase * self._terms[left] * other._terms[right]
        return PauliSum(self.n_qubits, accumulated, tol=self.tol)

    def _check_compatible(self, other: "PauliSum") -> None:
        if self.n_qubits != other.n_qubits:
            raise ValueError(f"qubit counts differ: {self.n_qubits} vs {other.n_qubits}")

    def approx_equal(self, other: "PauliSum", tol: float = 1e-10) -> bool:
        difference = self - other
        return all(abs(c) <= tol for c in difference._terms.values())

    def to_sparse_matrix(self) -> sparse.csr_matrix:
        """Sparse 2^n x 2^n matrix in the little-endian computational basis."""
        dim = 1 << self.n_qubits
        indices = np.arange(dim, dtype=np.int64)
        rows, cols, values = [], [], []
        for pauli, coefficient in self.items():
            phase = _I_POWERS[popcount(pauli.x & pauli.z) % 4]
            signs = 1 - 2 * parity_array(indices & pauli.z)
            rows.append(indices ^ pauli.x)
            cols.append(indices)
            values.append(coefficient * phase * signs)
        if not rows:
            return sparse.csr_matrix((dim, dim), dtype=complex)
        matrix = sparse.coo_matrix(
            (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
            dtype=complex,
        )
        return matrix.tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_sparse_matrix().toarray()

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Apply the sum to a statevector without building a matrix."""
        vector = np.asarray(vector)
        if vector.shape != (1 << self.n_qubits,):
            raise ValueError(f"vector shape {vector.shape} does not match {self.n_qubits} qubits")
        pairs = self.items()
        return _apply_strings(
            [p for p, _ in pairs],
            np.array([c for _, c in pairs], dtype=complex),
            vector,
        )

    def expectation(self, vector: np.ndarray) -> complex:
        """<v|P|v> for a (normalized) statevector."""
        return complex(np.vdot(vector, self.apply(vector)))

    def dump(self) -> str:
        """Debug text: one ``<coeff> <label>`` line per term in lexicographic order."""
        lines = []
        for pauli, coefficient in self.items():
            if coefficient.imag == 0.0:
                lines.append(f"{coefficient.real: .12e} {pauli.label}")
            else:
                lines.append(f"({coefficient.real:.12e}{coefficient.imag:+.12e}j) {pauli.label}")
        return "\n".join(lines) + ("\n" if lines else "")

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self.n_qubits}, terms={len(self)})"


@dataclass(frozen=True)
class MeasurementBasis:
    """
    Per-qubit measurement assignment over {X, Y, Z} (qubit 0 first).

    Measuring in this basis means rotating with H on X-qubits and H S^dagger
    on Y-qubits, then reading out in the computational basis.
    """

    letters: str

    def __post_init__(self):
        letters = self.letters.upper()
        if any(letter not in "XYZ" for letter in letters):
            raise ValueError(f"measurement basis {self.letters!r} must use only X, Y, Z")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def all_z(cls, n_qubits: int) -> "MeasurementBasis":
        return cls("Z" * n_qubits)

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def is_all_z(self) -> bool:
        return set(self.letters) <= {"Z"}

    def mask(self, letter: str) -> int:
        result = 0
        for qubit, assigned in enumerate(self.letters):
            if assigned == letter:
                result |= 1 << qubit
        return result

    def diagonalizes(self, pauli: PauliString) -> bool:
        """True when every non-identity letter of ``pauli`` matches the assignment."""
        return all(
            pauli.letter(q) in ("I", self.letters[q]) for q in range(self.n_qubits)
        )

    def __str__(self) -> str:
        return self.letters


def conjugate_by_basis(pauli_sum: PauliSum, basis: MeasurementBasis) -> PauliSum:
    """
    Conjugate a Pauli sum by the measurement rotation U of ``basis``: U P U^dagger.

    X-qubits use U = H (X -> Z, Z -> X, Y -> -Y); Y-qubits use U = H S^dagger
    (X -> Y, Y -> Z, Z -> X); Z-qubits are untouched. Each string maps to one
    string with a sign of +-1, so coefficient magnitudes are preserved.

    Args:
        pauli_sum: Operator to rotate
        basis: Measurement basis over the same qubits

    Returns:
        Rotated PauliSum

    Raises:
        BasisMismatchError: basis length differs from the qubit count
    """
    if basis.n_qubits != pauli_sum.n_qubits:
        raise BasisMismatchError(
            f"basis {basis} has {basis.n_qubits} qubits, operator has {pauli_sum.n_qubits}"
        )
    mx = basis.mask("X")
    my = basis.mask("Y")
    rotated: Dict[PauliString, complex] = {}
    for pauli, coefficient in pauli_sum.items():
        x, z = pauli.x, pauli.z
        sign = -1 if parity(x & z & mx) else 1
        # Hadamard: swap x and z bits
        hx = (x & ~mx) | (z & mx)
        hz = (z & ~mx) | (x & mx)
        # H S^dagger: x' = x ^ z, z' = x
        new_x = (hx & ~my) | ((x ^ z) & my)
        new_z = (hz & ~my) | (x & my)
        rotated[PauliString(pauli.n_qubits, new_x, new_z)] = sign * coefficient
    return PauliSum(pauli_sum.n_qubits, rotated, tol=pauli_sum.tol)
