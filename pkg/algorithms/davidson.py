"""
Davidson eigensolver for the lowest eigenpair of a Hermitian matrix.
"""

from typing import Optional, Tuple, Union
import logging

import numpy as np
from scipy import sparse

from algorithms.slater_condon import SubspaceProblem
from utils.errors import DavidsonConvergenceError

logger = logging.getLogger(__name__)

MatrixLike = Union[SubspaceProblem, sparse.spmatrix, np.ndarray]


class DavidsonSolver:
    """
    Block-free Davidson iteration with a diagonal preconditioner and thick restart.

    When the search space reaches the full dimension the Rayleigh-Ritz
    solution is exact, so small problems always converge.
    """

    TOL = 1e-8
    MAX_ITER = 200
    MAX_SUBSPACE = 30
    RESTART_SIZE = 5
    DENOMINATOR_FLOOR = 1e-8
    ORTHO_TOL = 1e-12

    def __init__(
        self,
        tol: float = TOL,
        max_iter: int = MAX_ITER,
        max_subspace: int = MAX_SUBSPACE,
        restart_size: int = RESTART_SIZE,
        seed: int = 0,
    ):
        if restart_size < 1 or restart_size >= max_subspace:
            raise ValueError("restart_size must be in [1, max_subspace)")
        self.tol = tol
        self.max_iter = max_iter
        self.max_subspace = max_subspace
        self.restart_size = restart_size
        self.seed = seed

    def _orthogonalize(self, basis: np.ndarray, vector: np.ndarray) -> Tuple[np.ndarray, float]:
        for _ in range(2):
            if basis.shape[1]:
                vector = vector - basis @ (basis.conj().T @ vector)
        norm = float(np.linalg.norm(vector))
        return vector, norm

    def solve(
        self,
        matrix: MatrixLike,
        initial: Optional[np.ndarray] = None,
    ) -> Tuple[float, np.ndarray]:
        """
        Lowest eigenpair.

        Args:
            matrix: SubspaceProblem, sparse or dense Hermitian matrix
            initial: Optional starting vector

        Returns:
            (eigenvalue, normalized eigenvector)

        Raises:
            DavidsonConvergenceError: residual above tol after max_iter iterations
        """
        if isinstance(matrix, SubspaceProblem):
            matrix = matrix.matrix
        operator = sparse.csr_matrix(matrix) if not sparse.issparse(matrix) else matrix.tocsr()
        d = operator.shape[0]
        if d == 0:
            raise ValueError("Davidson needs a non-empty matrix")
        dtype = np.result_type(operator.dtype, np.float64)
        diagonal = np.real(operator.diagonal())
        if d == 1:
            return float(diagonal[0]), np.ones(1, dtype=dtype)

        rng = np.random.default_rng(self.seed)
        if initial is None:
            start = np.zeros(d, dtype=dtype)
            start[int(np.argmin(diagonal))] = 1.0
        else:
            start = np.asarray(initial, dtype=dtype)
        start = start / np.linalg.norm(start)

        basis = start.reshape(d, 1)
        image = (operator @ basis).reshape(d, 1)
        best_residual = np.inf
        best_energy = float(diagonal.min())

        for iteration in range(1, self.max_iter + 1):
            projected = basis.conj().T @ image
            projected = 0.5 * (projected + projected.conj().T)
            values, vectors = np.linalg.eigh(projected)
            theta = float(values[0])
            ritz = basis @ vectors[:, 0]
            residual = image @ vectors[:, 0] - theta * ritz
            residual_norm = float(np.linalg.norm(residual))
            if residual_norm < best_residual:
                best_residual = residual_norm
                best_energy = theta

            if residual_norm <= self.tol or basis.shape[1] >= d:
                logger.debug(
                    f"Davidson converged in {iteration} iterations (d={d}, residual {residual_norm:.2e})"
                )
                return theta, ritz / np.linalg.norm(ritz)

            denominator = theta - diagonal
            small = np.abs(denominator) < self.DENOMINATOR_FLOOR
            denominator[small] = np.where(denominator[small] < 0, -1.0, 1.0) * self.DENOMINATOR_FLOOR
            correction = residual / denominator

            if basis.shape[1] >= self.max_subspace:
                keep = vectors[:, : self.restart_size]
                basis = basis @ keep
                image = image @ keep

            correction, norm = self._orthogonalize(basis, correction)
            if norm < self.ORTHO_TOL:
                correction, norm = self._orthogonalize(basis, rng.standard_normal(d).astype(dtype))
                if norm < self.ORTHO_TOL:
                    break
            correction = correction / norm
            basis = np.hstack([basis, correction.reshape(d, 1)])
            image = np.hstack([image, (operator @ correction).reshape(d, 1)])

        raise DavidsonConvergenceError(best_residual, best_energy, self.max_iter)


def davidson_ground(
    problem: MatrixLike,
    tol: float = DavidsonSolver.TOL,
    max_iter: int = DavidsonSolver.MAX_ITER,
    initial: Optional[np.ndarray] = None,
) -> Tuple[float, np.ndarray]:
    """
    Lowest eigenvalue and eigenvector of a projected Hamiltonian.

    Args:
        problem: SubspaceProblem or Hermitian matrix
        tol: Residual-norm tolerance ||(H - E) psi||
        max_iter: Maximum Davidson iterations
        initial: Optional starting vector

    Returns:
        (energy, normalized coefficient vector)
    """
    return DavidsonSolver(tol=tol, max_iter=max_iter).solve(problem, initial=initial)
