"""
Tests for Pauli strings, Pauli sums and measurement-basis conjugation.
"""

from functools import reduce
from itertools import product

import numpy as np
import pytest

from algorithms.pauli import MeasurementBasis, PauliString, PauliSum, conjugate_by_basis
from utils.errors import BasisMismatchError

SINGLE = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}
GATES = {
    "Z": np.eye(2, dtype=complex),
    "X": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
    "Y": np.array([[1, 1], [1, -1]]) / np.sqrt(2) @ np.diag([1, -1j]),
}


def dense_label(label: str) -> np.ndarray:
    """Kronecker product with qubit 0 as the least significant factor."""
    return reduce(np.kron, [SINGLE[letter] for letter in reversed(label)])


def dense_rotation(basis: MeasurementBasis) -> np.ndarray:
    return reduce(np.kron, [GATES[letter] for letter in reversed(basis.letters)])


def random_sum(n_qubits: int, n_terms: int, seed: int) -> PauliSum:
    rng = np.random.default_rng(seed)
    labels = ["".join(rng.choice(list("IXYZ"), size=n_qubits)) for _ in range(n_terms)]
    return PauliSum.from_labels((label, rng.normal()) for label in labels)


class TestPauliString:
    """Symplectic Pauli strings."""

    def test_label_round_trip(self):
        assert PauliString.from_label("XIZY").label == "XIZY"

    def test_letter_positions(self):
        pauli = PauliString.from_label("XIZY")
        assert [pauli.letter(q) for q in range(4)] == ["X", "I", "Z", "Y"]
        assert pauli.weight == 3
        assert pauli.support == 0b1101

    def test_invalid_letter(self):
        with pytest.raises(ValueError):
            PauliString.from_label("XA")

    def test_identity_and_diagonal(self):
        assert PauliString.identity(3).is_identity
        assert PauliString.from_label("ZIZ").is_diagonal
        assert not PauliString.from_label("ZXZ").is_diagonal

    def test_single(self):
        assert PauliString.single(3, 1, "y").label == "IYI"

    @pytest.mark.parametrize(
        "left, right, phase, result",
        [
            ("X", "Y", 1j, "Z"),
            ("Y", "X", -1j, "Z"),
            ("Z", "X", 1j, "Y"),
            ("Y", "Z", 1j, "X"),
            ("X", "X", 1, "I"),
        ],
    )
    def test_single_qubit_products(self, left, right, phase, result):
        got_phase, got = PauliString.from_label(left).multiply(PauliString.from_label(right))
        assert got.label == result
        assert got_phase == phase

    def test_products_match_matrices(self):
        """Every pair of two-qubit strings multiplies like its matrices."""
        labels = ["".join(p) for p in product("IXYZ", repeat=2)]
        for a, b in product(labels, labels):
            phase, pauli = PauliString.from_label(a).multiply(PauliString.from_label(b))
            np.testing.assert_allclose(
                phase * dense_label(pauli.label), dense_label(a) @ dense_label(b), atol=1e-12
            )

    def test_qubitwise_compatible(self):
        assert PauliString.from_label("XZI").qubitwise_compatible(PauliString.from_label("XIY"))
        assert not PauliString.from_label("XZ").qubitwise_compatible(PauliString.from_label("YZ"))


class TestPauliSum:
    """Coefficient maps with pruning and matrix images."""

    def test_pruning(self):
        pauli_sum = PauliSum.from_labels([("XX", 1e-13), ("ZZ", 0.5)])
        assert len(pauli_sum) == 1
        assert PauliString.from_label("XX") not in pauli_sum

    def test_accumulation_cancels(self):
        pauli_sum = PauliSum.from_labels([("XY", 0.3), ("ZZ", 1.0), ("XY", -0.3)])
        assert [p.label for p in pauli_sum] == ["ZZ"]

    def test_lexicographic_order(self):
        pauli_sum = PauliSum.from_labels([("ZI", 1.0), ("IX", 1.0), ("XI", 1.0)])
        assert [p.label for p in pauli_sum] == ["IX", "XI", "ZI"]

    def test_identity_coefficient_and_norm(self):
        pauli_sum = PauliSum.from_labels([("II", -2.0), ("ZI", 0.5), ("XX", -0.25)])
        assert pauli_sum.identity_coefficient == -2.0
        assert pauli_sum.one_norm() == pytest.approx(0.75)
        assert pauli_sum.one_norm(include_identity=True) == pytest.approx(2.75)
        assert len(pauli_sum.non_identity()) == 2

    def test_small_imaginary_parts_dropped(self):
        pauli_sum = PauliSum.from_labels([("Z", 1.0 + 1e-14j)])
        assert pauli_sum.is_hermitian()
        assert pauli_sum.max_imaginary() == 0.0

    def test_mismatched_labels(self):
        with pytest.raises(ValueError):
            PauliSum.from_labels([("XX", 1.0), ("Z", 1.0)])

    @pytest.mark.parametrize("label", ["X", "Y", "Z", "XZ", "YI", "ZYX"])
    def test_dense_matches_kronecker(self, label):
        np.testing.assert_allclose(PauliSum.from_labels([(label, 1.0)]).to_dense(), dense_label(label))

    def test_matmul_matches_dense(self):
        a = random_sum(3, 6, seed=1)
        b = random_sum(3, 5, seed=2)
        np.testing.assert_allclose((a @ b).to_dense(), a.to_dense() @ b.to_dense(), atol=1e-12)

    def test_add_sub_scale(self):
        a = random_sum(2, 4, seed=3)
        b = random_sum(2, 4, seed=4)
        np.testing.assert_allclose((a + b * 2.0 - a).to_dense(), 2.0 * b.to_dense(), atol=1e-12)
        assert (a - a).approx_equal(PauliSum(2))

    def test_apply_and_expectation(self):
        pauli_sum = random_sum(3, 8, seed=5)
        rng = np.random.default_rng(6)
        vector = rng.normal(size=8) + 1j * rng.normal(size=8)
        vector /= np.linalg.norm(vector)
        np.testing.assert_allclose(pauli_sum.apply(vector), pauli_sum.to_dense() @ vector, atol=1e-12)
        assert pauli_sum.expectation(vector) == pytest.approx(
            np.vdot(vector, pauli_sum.to_dense() @ vector), abs=1e-12
        )

    def test_restricted_to(self):
        pauli_sum = PauliSum.from_labels([("XX", 1.0), ("ZZ", 2.0), ("YY", 3.0)])
        sub = pauli_sum.restricted_to([PauliString.from_label("ZZ"), PauliString.from_label("XZ")])
        assert sub.as_dict() == {PauliString.from_label("ZZ"): 2.0}

    def test_dump(self):
        text = PauliSum.from_labels([("ZI", 0.5)]).dump()
        assert text.strip().endswith("ZI")
        assert text.startswith(" 5.000000000000e-01")


class TestMeasurementBasis:
    """Basis validation and diagonalization checks."""

    def test_invalid_letters(self):
        with pytest.raises(ValueError):
            MeasurementBasis("XIZ")

    def test_all_z(self):
        assert MeasurementBasis.all_z(3).is_all_z
        assert not MeasurementBasis("ZXZ").is_all_z

    def test_masks(self):
        basis = MeasurementBasis("XYZX")
        assert basis.mask("X") == 0b1001
        assert basis.mask("Y") == 0b0010

    def test_diagonalizes(self):
        basis = MeasurementBasis("XYZ")
        assert basis.diagonalizes(PauliString.from_label("XIZ"))
        assert not basis.diagonalizes(PauliString.from_label("YIZ"))


class TestConjugateByBasis:
    """U P U^dagger for the measurement rotation U."""

    @pytest.mark.parametrize("letters", ["XYZ", "YYX", "ZZZ", "XXX"])
    def test_matches_dense_conjugation(self, letters):
        pauli_sum = random_sum(3, 10, seed=7)
        basis = MeasurementBasis(letters)
        u = dense_rotation(basis)
        expected = u @ pauli_sum.to_dense() @ u.conj().T
        np.testing.assert_allclose(conjugate_by_basis(pauli_sum, basis).to_dense(), expected, atol=1e-12)

    def test_magnitudes_preserved(self):
        pauli_sum = random_sum(4, 20, seed=8)
        rotated = conjugate_by_basis(pauli_sum, MeasurementBasis("XYZY"))
        assert sorted(abs(c) for _, c in rotated.items()) == sorted(abs(c) for _, c in pauli_sum.items())

    def test_diagonalized_terms_become_diagonal(self):
        basis = MeasurementBasis("XYZ")
        pauli_sum = PauliSum.from_labels([("XYZ", 1.0), ("XII", 0.5), ("IYZ", -0.2)])
        rotated = conjugate_by_basis(pauli_sum, basis)
        assert all(p.is_diagonal for p in rotated)

    def test_length_mismatch(self):
        with pytest.raises(BasisMismatchError):
            conjugate_by_basis(PauliSum.from_labels([("XX", 1.0)]), MeasurementBasis("XXX"))
