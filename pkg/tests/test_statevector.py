"""
Tests for the LUCJ statevector engine: state preparation, measurement
rotations and sampling.
"""

from functools import reduce

import numpy as np
import pytest
from scipy.linalg import expm

from algorithms.fermion import FermionTermSum
from algorithms.pauli import MeasurementBasis, PauliSum, conjugate_by_basis
from algorithms.slater_condon import sector_counts_array
from algorithms.statevector import (
    MAX_QUBITS,
    LucjParameters,
    Statevector,
    apply_orbital_rotation,
    bitstring,
    check_capacity,
    default_interaction_pairs,
    expectation,
    givens_decomposition,
    n_parameters,
    prepare_lucj,
    rhf_index,
    rhf_state,
    rotate_for_measurement,
    sample,
)
from algorithms.jordan_wigner import jw_map
from utils.errors import BasisMismatchError, CapacityError

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
_GATES = {"X": _H, "Y": _H @ np.diag([1.0, -1.0j]), "Z": np.eye(2)}


def one_body_operator(generator: np.ndarray) -> np.ndarray:
    """Dense sum_{pq,sigma} G[p,q] a+_{p sigma} a_{q sigma} over the full Fock space."""
    n = generator.shape[0]
    terms = {}
    for p in range(n):
        for q in range(n):
            for sigma in (0, 1):
                if generator[p, q] != 0.0:
                    terms[((2 * p + sigma,), (2 * q + sigma,))] = generator[p, q]
    return FermionTermSum(2 * n, terms).to_sparse_matrix().toarray()


def jastrow_diagonal(jastrow: np.ndarray) -> np.ndarray:
    m = jastrow.shape[0]
    indices = np.arange(1 << m)
    occupations = (indices[:, None] >> np.arange(m)[None, :]) & 1
    return np.einsum("ia,ab,ib->i", occupations, jastrow, occupations)


def lucj_oracle(params: LucjParameters, n_alpha: int, n_beta: int) -> np.ndarray:
    n = params.n_orbitals
    state = np.array(rhf_state(n, n_alpha, n_beta).amplitudes)
    for k, jastrow in reversed(list(zip(params.k_matrices, params.j_matrices))):
        generator = one_body_operator(k)
        state = expm(-generator) @ state
        state = np.exp(1j * jastrow_diagonal(jastrow)) * state
        state = expm(generator) @ state
    return state


class TestReferenceState:
    """RHF determinant"""

    def test_rhf_index(self):
        assert rhf_index(3, 2, 1) == 0b000111
        assert rhf_index(2, 1, 1) == 0b0011
        assert rhf_index(3, 1, 2) == 0b001011

    def test_rhf_index_out_of_range(self):
        with pytest.raises(ValueError):
            rhf_index(2, 3, 0)

    def test_rhf_state(self):
        state = rhf_state(2, 1, 1)
        assert state.n_qubits == 4
        assert state.amplitudes[0b0011] == 1.0
        assert state.norm() == pytest.approx(1.0)

    def test_amplitudes_read_only(self):
        state = rhf_state(2, 1, 1)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 1.0

    def test_bitstring_lists_qubit_zero_first(self):
        assert bitstring(0b0011, 4) == "1100"


class TestCapacity:
    def test_cap(self):
        check_capacity(MAX_QUBITS)
        with pytest.raises(CapacityError):
            check_capacity(MAX_QUBITS + 1)

    def test_rhf_state_refuses_large_register(self):
        with pytest.raises(CapacityError):
            rhf_state(MAX_QUBITS // 2 + 1, 2, 2)


class TestLucjParameters:
    """Packing and validation of ansatz parameters"""

    def test_parameter_count(self):
        # one rotation angle plus 4 same-qubit and 3 neighbour couplings
        assert n_parameters(2, 1) == 8
        assert n_parameters(3, 2) == 2 * (3 + 6 + 5)
        assert len(default_interaction_pairs(2)) == 7

    def test_vector_layout(self):
        vector = np.arange(1, n_parameters(2, 2) + 1, dtype=float)
        params = LucjParameters.from_vector(vector, 2, layers=2)
        assert params.layers == 2
        np.testing.assert_array_equal(params.to_vector(), vector)
        k = params.k_matrices[0]
        assert k[1, 0] == 1.0 and k[0, 1] == -1.0
        np.testing.assert_array_equal(params.j_matrices[0], params.j_matrices[0].T)

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            LucjParameters.from_vector(np.zeros(3), 2)

    def test_rejects_jastrow_outside_pattern(self):
        jastrow = np.zeros((4, 4))
        jastrow[0, 3] = jastrow[3, 0] = 0.2
        with pytest.raises(ValueError):
            LucjParameters(2, (np.zeros((2, 2)),), (jastrow,), ((0, 0),))

    def test_rejects_non_antisymmetric_k(self):
        with pytest.raises(ValueError):
            LucjParameters(2, (np.ones((2, 2)),), (np.zeros((4, 4)),), ((0, 0),))

    def test_random_is_seeded(self):
        a = LucjParameters.random(3, seed=11).to_vector()
        b = LucjParameters.random(3, seed=11).to_vector()
        np.testing.assert_array_equal(a, b)
        assert np.all(np.abs(a) <= 0.1)


class TestOrbitalRotation:
    def test_givens_reduces_to_signs(self):
        rng = np.random.default_rng(2)
        q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
        rotations, signs = givens_decomposition(q)
        work = q.copy()
        for i, j, theta in rotations:
            g = np.eye(4)
            g[i, i] = g[j, j] = np.cos(theta)
            g[i, j] = np.sin(theta)
            g[j, i] = -np.sin(theta)
            work = g @ work
        np.testing.assert_allclose(work, np.diag(signs), atol=1e-12)

    def test_matches_exponentiated_generator(self):
        rng = np.random.default_rng(5)
        a = rng.normal(scale=0.4, size=(3, 3))
        generator = a - a.T
        state = np.zeros(64, dtype=complex)
        state[rhf_index(3, 2, 1)] = 1.0
        rotated = apply_orbital_rotation(state, expm(generator), 3)
        np.testing.assert_allclose(rotated, expm(one_body_operator(generator)) @ state, atol=1e-10)


class TestPrepareLucj:
    """Ansatz state against a dense exponential reference"""

    def test_zero_parameters_give_rhf(self):
        state = prepare_lucj(LucjParameters.zeros(3, layers=2), 2, 1)
        np.testing.assert_allclose(state.amplitudes, rhf_state(3, 2, 1).amplitudes, atol=1e-14)

    @pytest.mark.parametrize("n_orbitals,n_alpha,n_beta,layers", [(2, 1, 1, 1), (3, 2, 1, 2), (4, 2, 2, 1)])
    def test_matches_dense_oracle(self, n_orbitals, n_alpha, n_beta, layers):
        params = LucjParameters.random(n_orbitals, layers=layers, seed=3, scale=0.5)
        state = prepare_lucj(params, n_alpha, n_beta)
        np.testing.assert_allclose(state.amplitudes, lucj_oracle(params, n_alpha, n_beta), atol=1e-10)

    def test_norm_and_sector_preserved(self):
        params = LucjParameters.random(3, layers=2, seed=9, scale=1.0)
        state = prepare_lucj(params, 1, 2)
        assert state.norm() == pytest.approx(1.0, abs=1e-10)
        alpha, beta = sector_counts_array(np.arange(state.dim))
        outside = (alpha != 1) | (beta != 2)
        assert np.max(np.abs(state.amplitudes[outside])) < 1e-12

    def test_rhf_energy_at_zero_parameters(self, random_molecule):
        hamiltonian = random_molecule(3, 1, 1, seed=1)
        pauli = jw_map(hamiltonian)
        state = prepare_lucj(LucjParameters.zeros(3), 1, 1)
        dense = pauli.to_dense()
        index = rhf_index(3, 1, 1)
        assert expectation(state, pauli) == pytest.approx(dense[index, index].real, abs=1e-12)


class TestMeasurement:
    """Basis rotations and sampling"""

    def _random_state(self, n_qubits, seed):
        rng = np.random.default_rng(seed)
        amplitudes = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
        return Statevector(amplitudes / np.linalg.norm(amplitudes))

    def test_rotation_matches_kron(self):
        state = self._random_state(3, 0)
        basis = MeasurementBasis("XYZ")
        unitary = reduce(np.kron, [_GATES[letter] for letter in reversed(basis.letters)])
        rotated = rotate_for_measurement(state, basis)
        np.testing.assert_allclose(rotated.amplitudes, unitary @ state.amplitudes, atol=1e-12)

    def test_all_z_is_identity(self):
        state = self._random_state(2, 1)
        assert rotate_for_measurement(state, MeasurementBasis("ZZ")) is state

    def test_rotated_diagonal_expectation(self):
        state = self._random_state(3, 4)
        basis = MeasurementBasis("YXZ")
        pauli = PauliSum.from_labels([("YXZ", 0.8), ("YII", -0.3), ("IXZ", 0.5)])
        rotated = rotate_for_measurement(state, basis)
        diagonal = conjugate_by_basis(pauli, basis)
        assert all(p.is_diagonal for p in diagonal.strings())
        assert expectation(rotated, diagonal) == pytest.approx(expectation(state, pauli), abs=1e-12)

    def test_basis_mismatch(self):
        with pytest.raises(BasisMismatchError):
            rotate_for_measurement(self._random_state(2, 0), MeasurementBasis("ZZZ"))

    def test_sampling_is_seeded(self):
        state = self._random_state(3, 2)
        np.testing.assert_array_equal(sample(state, 100, seed=5), sample(state, 100, seed=5))

    def test_sampling_follows_distribution(self):
        amplitudes = np.zeros(4, dtype=complex)
        amplitudes[1] = np.sqrt(0.75)
        amplitudes[2] = np.sqrt(0.25)
        shots = sample(Statevector(amplitudes), 20_000, seed=0)
        assert set(np.unique(shots)) <= {1, 2}
        assert np.mean(shots == 1) == pytest.approx(0.75, abs=0.02)
        assert shots.dtype == np.int64

    def test_expectation_qubit_mismatch(self):
        with pytest.raises(ValueError):
            expectation(rhf_state(2, 1, 1), PauliSum.identity(2))
