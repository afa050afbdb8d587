"""
Tests for the Davidson eigensolver.
"""

import numpy as np
import pytest
from scipy import sparse

from algorithms.davidson import DavidsonSolver, davidson_ground
from algorithms.slater_condon import fci_space, project
from utils.errors import DavidsonConvergenceError


def random_dominant_matrix(d: int, seed: int = 0, per_row: int = 5, complex_valued: bool = False):
    """Sparse Hermitian matrix with a spread diagonal and a few small couplings per row."""
    rng = np.random.default_rng(seed)
    density = min(1.0, per_row / d)
    couplings = sparse.random(d, d, density=density, random_state=seed, format="csr") * 0.05
    if complex_valued:
        phases = sparse.random(d, d, density=density, random_state=seed + 1, format="csr") * 0.05j
        couplings = couplings + phases
    hermitian = couplings + couplings.conj().T
    diagonal = sparse.diags(rng.permutation(d) * 0.05 - 1.0)
    return (hermitian + diagonal).tocsr()


class TestDavidson:
    """Lowest eigenpair against dense diagonalization"""

    @pytest.mark.parametrize("d,seed", [(50, 0), (300, 1), (800, 2)])
    def test_matches_eigh(self, d, seed):
        matrix = random_dominant_matrix(d, seed)
        energy, vector = davidson_ground(matrix, tol=1e-9)
        exact = np.linalg.eigvalsh(matrix.toarray())[0]
        assert energy == pytest.approx(exact, abs=1e-8)
        assert np.linalg.norm(vector) == pytest.approx(1.0)
        residual = matrix @ vector - energy * vector
        assert np.linalg.norm(residual) < 1e-8

    def test_complex_hermitian(self):
        matrix = random_dominant_matrix(200, 4, complex_valued=True)
        energy, vector = davidson_ground(matrix, tol=1e-9)
        assert energy == pytest.approx(np.linalg.eigvalsh(matrix.toarray())[0], abs=1e-8)
        assert np.iscomplexobj(vector)

    def test_dimension_one(self):
        energy, vector = davidson_ground(np.array([[-0.75]]))
        assert energy == -0.75
        np.testing.assert_array_equal(vector, [1.0])

    def test_small_problem_is_exact(self):
        matrix = np.array([[1.0, 0.3, 0.0], [0.3, -0.5, 0.2], [0.0, 0.2, 0.7]])
        energy, _ = davidson_ground(matrix, tol=1e-14)
        assert energy == pytest.approx(np.linalg.eigvalsh(matrix)[0], abs=1e-12)

    def test_thick_restart(self):
        matrix = random_dominant_matrix(400, 7, per_row=10)
        solver = DavidsonSolver(tol=1e-9, max_iter=500, max_subspace=8, restart_size=3)
        energy, _ = solver.solve(matrix)
        assert energy == pytest.approx(np.linalg.eigvalsh(matrix.toarray())[0], abs=1e-8)

    def test_accepts_subspace_problem(self, random_molecule):
        hamiltonian = random_molecule(4, 2, 2, seed=2)
        problem = project(hamiltonian, fci_space(4, 2, 2))
        energy, _ = davidson_ground(problem)
        assert energy == pytest.approx(np.linalg.eigvalsh(problem.matrix.toarray())[0], abs=1e-8)

    def test_initial_vector(self):
        matrix = random_dominant_matrix(100, 3)
        start = np.ones(100)
        energy, _ = davidson_ground(matrix, initial=start)
        assert energy == pytest.approx(np.linalg.eigvalsh(matrix.toarray())[0], abs=1e-7)

    def test_non_convergence(self):
        matrix = random_dominant_matrix(300, 5)
        with pytest.raises(DavidsonConvergenceError) as excinfo:
            davidson_ground(matrix, tol=1e-14, max_iter=1)
        assert excinfo.value.iterations == 1
        assert np.isfinite(excinfo.value.best_energy)

    def test_bad_restart_size(self):
        with pytest.raises(ValueError):
            DavidsonSolver(max_subspace=5, restart_size=5)

    def test_empty_matrix(self):
        with pytest.raises(ValueError):
            davidson_ground(np.zeros((0, 0)))
