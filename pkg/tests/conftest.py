"""
Shared fixtures: the shipped H2 Hamiltonian, the PySCF-generated molecules and
a seeded random-molecule factory.
"""

import importlib.util
import logging
from pathlib import Path

import numpy as np
import pytest

from data.fcidump import read_fcidump
from data.hamiltonian import MolecularHamiltonian, symmetrize_two_body
from validation.generate_fixtures import generate_missing

logger = logging.getLogger(__name__)

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "data" / "fixtures"
H2_FIXTURE = FIXTURE_DIR / "h2_sto3g_0.7414.fcidump"


def make_random_hamiltonian(
    n_orbitals: int,
    n_alpha: int,
    n_beta: int,
    seed: int = 0,
    coupling: float = 0.1,
) -> MolecularHamiltonian:
    """
    Random molecule-like Hamiltonian: increasing orbital energies, positive
    Coulomb-like diagonal and small random couplings with full 8-fold symmetry.
    """
    rng = np.random.default_rng(seed)
    n = n_orbitals
    noise = rng.normal(scale=coupling, size=(n, n))
    one_body = np.diag(np.linspace(-2.0, 0.5, n)) + 0.5 * (noise + noise.T)
    raw = rng.normal(scale=coupling, size=(n, n, n, n))
    two_body = symmetrize_two_body(raw)
    for p in range(n):
        for q in range(n):
            two_body[p, p, q, q] += 0.5
    two_body = symmetrize_two_body(two_body)
    return MolecularHamiltonian(
        n_orbitals=n,
        n_alpha=n_alpha,
        n_beta=n_beta,
        core_energy=float(rng.uniform(0.5, 1.5)),
        one_body=one_body,
        two_body=two_body,
    )


def h2_reference_energies(hamiltonian: MolecularHamiltonian):
    """(HF, FCI) of a two-orbital, two-electron singlet from the 2x2 CI problem."""
    h = hamiltonian.one_body
    g = hamiltonian.two_body
    c = hamiltonian.core_energy
    ground = c + 2.0 * h[0, 0] + g[0, 0, 0, 0]
    doubly_excited = c + 2.0 * h[1, 1] + g[1, 1, 1, 1]
    coupling = g[0, 1, 0, 1]
    # Singly excited singlet does not couple to the closed shells when h01 = 0
    matrix = np.array([[ground, coupling], [coupling, doubly_excited]])
    return float(ground), float(np.linalg.eigvalsh(matrix)[0])


@pytest.fixture(scope="session", autouse=True)
def generated_fixtures():
    """Write the missing STO-3G fixtures once, when PySCF is installed."""
    if importlib.util.find_spec("pyscf") is None:
        logger.warning("PySCF not installed: tests on generated fixtures will skip")
        return []
    return generate_missing(FIXTURE_DIR)


@pytest.fixture
def h2_path() -> Path:
    return H2_FIXTURE


@pytest.fixture
def h2() -> MolecularHamiltonian:
    return read_fcidump(H2_FIXTURE)


@pytest.fixture
def random_molecule():
    """Factory: random_molecule(n_orbitals, n_alpha, n_beta, seed=0)."""
    return make_random_hamiltonian
