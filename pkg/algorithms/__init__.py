"""
Algorithms package for the SQDOpt simulation engine.
"""

from .pauli import MeasurementBasis, PauliString, PauliSum, conjugate_by_basis
from .fermion import EffectiveHamiltonian, FermionTermSum, filter_physical
from .jordan_wigner import jw_map, reverse_jw
from .grouping import MeasurementGroup, greedy_group, offdiagonal_ratio, select_bases
from .statevector import LucjParameters, Statevector, prepare_lucj, rotate_for_measurement, sample
from .slater_condon import Determinant, project, slater_condon_element
from .davidson import DavidsonSolver, davidson_ground
from .sqd import configuration_recovery, sqd_energy
from .cobyla import OptimizationTrace, minimize

__all__ = [
    'MeasurementBasis',
    'PauliString',
    'PauliSum',
    'conjugate_by_basis',
    'EffectiveHamiltonian',
    'FermionTermSum',
    'filter_physical',
    'jw_map',
    'reverse_jw',
    'MeasurementGroup',
    'greedy_group',
    'offdiagonal_ratio',
    'select_bases',
    'LucjParameters',
    'Statevector',
    'prepare_lucj',
    'rotate_for_measurement',
    'sample',
    'Determinant',
    'project',
    'slater_condon_element',
    'DavidsonSolver',
    'davidson_ground',
    'configuration_recovery',
    'sqd_energy',
    'OptimizationTrace',
    'minimize',
]
