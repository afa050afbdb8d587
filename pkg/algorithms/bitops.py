"""
Bit-level helpers on integer occupation masks.

Scalar versions work on Python ints of any width; the ``*_array`` versions
work on non-negative int64 numpy arrays (states of at most 62 qubits).
"""

import numpy as np


def popcount(value: int) -> int:
    return bin(value).count("1")


def parity(value: int) -> int:
    return popcount(value) & 1


def popcount_array(values: np.ndarray) -> np.ndarray:
    """Vectorized popcount (SWAR) for non-negative int64 arrays."""
    v = np.asarray(values, dtype=np.int64)
    v = v - ((v >> 1) & 0x5555555555555555)
    v = (v & 0x3333333333333333) + ((v >> 2) & 0x3333333333333333)
    v = (v + (v >> 4)) & 0x0F0F0F0F0F0F0F0F
    v = v + (v >> 8)
    v = v + (v >> 16)
    v = v + (v >> 32)
    return v & 0x7F


def parity_array(values: np.ndarray) -> np.ndarray:
    """Vectorized parity (0 or 1) for non-negative int64 arrays."""
    v = np.asarray(values, dtype=np.int64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


def bits_below(qubit: int) -> int:
    """Mask of all qubits with index strictly below ``qubit``."""
    return (1 << qubit) - 1


def occupied(mask: int):
    """Indices of set bits in ascending order."""
    index = 0
    while mask:
        if mask & 1:
            yield index
        mask >>= 1
        index += 1


def mask_from_indices(indices) -> int:
    mask = 0
    for index in indices:
        mask |= 1 << int(index)
    return mask
