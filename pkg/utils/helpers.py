"""
Utility functions shared by the drivers, the result store and the terminal app.
"""

from typing import Dict, Iterator, Optional
from contextlib import contextmanager
from collections import defaultdict
from pathlib import Path
import re
import time

import numpy as np


def percent_error(energy: float, reference: float) -> float:
    """
    Signed percent error of an energy against a reference.

    Args:
        energy: Measured or optimized energy (Hartree)
        reference: Reference energy, normally FCI (Hartree)

    Returns:
        100 * (energy - reference) / |reference|
    """
    if reference == 0:
        raise ValueError("reference energy must be nonzero")
    return 100.0 * (energy - reference) / abs(reference)


def format_energy(value: float, decimals: int = 8) -> str:
    """
    Format an energy in Hartree for display.

    Args:
        value: Energy in Hartree
        decimals: Number of decimal places

    Returns:
        Formatted energy string, e.g. "-1.13728383 Ha"
    """
    return f"{value:.{decimals}f} Ha"


def format_percentage(value: float, decimals: int = 4) -> str:
    """
    Format a value that is already a percentage.

    Args:
        value: Percentage (0.546 means 0.546%)
        decimals: Number of decimal places

    Returns:
        Formatted percentage string
    """
    return f"{value:.{decimals}f}%"


def format_duration(seconds: float) -> str:
    """
    Format a wall-clock duration compactly.

    Args:
        seconds: Duration in seconds

    Returns:
        Human-readable duration (ms below one second)
    """
    if seconds < 1.0:
        return f"{seconds * 1000:.1f} ms"
    if seconds < 120.0:
        return f"{seconds:.2f} s"
    return f"{seconds / 60:.1f} min"


def split_seed(master_seed: int, *keys: int) -> int:
    """
    Derive an independent child seed from a master seed and integer keys.

    The same (master_seed, keys) always yields the same child, whatever the
    order in which children are requested.

    Args:
        master_seed: Run-level seed
        *keys: Integer path, e.g. (iteration, basis_index)

    Returns:
        Child seed as a Python int
    """
    sequence = np.random.SeedSequence([int(master_seed), *[int(k) for k in keys]])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


_BOND_LENGTH_PATTERN = re.compile(r"_(\d+(?:\.\d+)?)(?:\.fcidump)?$", re.IGNORECASE)


def parse_bond_length(path: Path) -> Optional[float]:
    """
    Extract the bond length from a fixture name such as ``h6_0.9.fcidump``.

    Args:
        path: Fixture path

    Returns:
        Bond length in Angstrom, or None when the name carries none
    """
    match = _BOND_LENGTH_PATTERN.search(Path(path).name)
    if match is None:
        return None
    return float(match.group(1))


def molecule_label(path: Path) -> str:
    """
    Molecule label of a fixture, e.g. ``h6_0.9.fcidump`` -> ``H6``.

    Args:
        path: Fixture path

    Returns:
        Upper-cased stem up to the first underscore
    """
    return Path(path).name.split("_")[0].split(".")[0].upper()


class PhaseTimer:
    """Accumulate wall-clock time per named phase."""

    def __init__(self):
        self._totals: Dict[str, float] = defaultdict(float)
        self._counts: Dict[str, int] = defaultdict(int)

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        """Time the enclosed block under ``name``."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self._totals[name] += time.perf_counter() - start
            self._counts[name] += 1

    def total(self, name: str) -> float:
        return self._totals.get(name, 0.0)

    def count(self, name: str) -> int:
        return self._counts.get(name, 0)

    def merge(self, other: "PhaseTimer") -> None:
        for name, seconds in other._totals.items():
            self._totals[name] += seconds
            self._counts[name] += other._counts[name]

    def as_dict(self) -> Dict[str, float]:
        return dict(sorted(self._totals.items()))
