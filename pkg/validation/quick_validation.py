"""
Quick validation runner - checks the generated fixtures against published numbers.

Usage:
    python validation/quick_validation.py
"""

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pathlib import Path

from algorithms.drivers import ProblemContext
from utils.errors import CapacityError
from utils.helpers import percent_error

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "data" / "fixtures"
FROZEN = (0, 1)

# fixture -> (expected Pauli terms, expected groups, group tolerance, published HF error %)
EXPECTED = {
    "h2o_sto3g_1.0.fcidump": (156, 36, 4, None),
    "h6_sto3g_0.9.fcidump": (None, 68, 5, 0.6718),
    "h8_sto3g_0.9.fcidump": (None, None, None, 1.2352),
    "h10_sto3g_0.9.fcidump": (None, None, None, 1.5597),
}


def check_fixture(name, expected):
    terms, groups, tolerance, hf_error = expected
    context = ProblemContext.from_fixture(FIXTURE_DIR / name, FROZEN)
    failures = []
    print(f"\n{name}: {context.n_qubits} qubits, {len(context.pauli)} terms, {len(context.groups)} groups, "
          f"off-diagonal ratio {context.offdiagonal_ratio():.4f}")
    if terms is not None and len(context.pauli) != terms:
        failures.append(f"expected {terms} Pauli terms")
    if groups is not None and abs(len(context.groups) - groups) > tolerance:
        failures.append(f"expected {groups} +- {tolerance} groups")
    if hf_error is not None:
        try:
            error = percent_error(context.hf_energy(), context.fci_energy())
        except CapacityError as exc:
            print(f"  HF error skipped: {exc}")
        else:
            print(f"  HF error {error:.4f}% (published {hf_error}%)")
            if abs(error - hf_error) > 0.02:
                failures.append(f"HF error {error:.4f}% differs from {hf_error}%")
    for failure in failures:
        print(f"  FAIL: {failure}")
    return failures


def main():
    print("\n" + "="*80)
    print(" "*20 + "QUICK FIXTURE VALIDATION")
    print("="*80)

    checked, failed = 0, 0
    for name, expected in EXPECTED.items():
        if not (FIXTURE_DIR / name).exists():
            print(f"\n{name}: missing (run validation/generate_fixtures.py)")
            continue
        checked += 1
        if check_fixture(name, expected):
            failed += 1

    print("\n" + "="*80)
    print(f"TOTAL: {checked - failed}/{checked} fixtures passed")
    if checked and failed == 0:
        print("\nFixtures validated - all checks passed!")
        return 0
    if not checked:
        print("\nNo fixtures found")
        return 1
    print(f"\n{failed} fixtures failed")
    return 1


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
