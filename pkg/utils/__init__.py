"""
Utility functions package.
"""

from .helpers import (
    percent_error,
    format_energy,
    format_percentage,
    format_duration,
    split_seed,
    parse_bond_length,
    molecule_label,
    PhaseTimer
)

__all__ = [
    'percent_error',
    'format_energy',
    'format_percentage',
    'format_duration',
    'split_seed',
    'parse_bond_length',
    'molecule_label',
    'PhaseTimer'
]
