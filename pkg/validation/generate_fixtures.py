"""
Generate the STO-3G FCIDUMP fixtures with PySCF.

PySCF is only needed here; the engine itself reads the written files.

Usage:
    python validation/generate_fixtures.py                 # chains at 0.9 A and H2O
    python validation/generate_fixtures.py --sweep h6      # H6 bond-length sweep
    python validation/generate_fixtures.py --output-dir /tmp/fixtures
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Dict, List

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = Path(__file__).resolve().parent.parent / "data" / "fixtures"
BASIS = "sto-3g"
CHAIN_LENGTHS = (4, 6, 8, 10)
CHAIN_BOND = 0.9
SWEEP_BONDS = tuple(np.round(np.arange(0.5, 2.01, 0.1), 2))
H2O_BOND = 1.0
H2O_ANGLE = 104.5


def chain_geometry(n_atoms: int, bond: float) -> str:
    """Linear, evenly spaced hydrogen chain along z (Angstrom)."""
    return "; ".join(f"H 0 0 {i * bond:.6f}" for i in range(n_atoms))


def water_geometry(bond: float = H2O_BOND, angle: float = H2O_ANGLE) -> str:
    half = math.radians(angle) / 2.0
    x, z = bond * math.sin(half), bond * math.cos(half)
    return f"O 0 0 0; H {x:.6f} 0 {z:.6f}; H {-x:.6f} 0 {z:.6f}"


def write_fixture(name: str, geometry: str, output_dir: Path) -> Path:
    """
    Run RHF for ``geometry`` and write its integrals in the RHF orbital basis.

    Returns:
        Path of the written FCIDUMP file
    """
    from pyscf import gto, scf
    from pyscf.tools import fcidump

    mol = gto.M(atom=geometry, basis=BASIS, unit="Angstrom", spin=0, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    energy = mf.kernel()
    if not mf.converged:
        logger.warning(f"{name}: RHF did not converge")
    target = output_dir / f"{name}.fcidump"
    fcidump.from_scf(mf, str(target), tol=1e-14)
    logger.info(f"Wrote {target} ({mol.nao} orbitals, {mol.nelectron} electrons, E_RHF={energy:.10f})")
    return target


def default_fixtures() -> Dict[str, str]:
    """Fixture name -> geometry for the chains at CHAIN_BOND, H2O and the H6 sweep."""
    fixtures = {f"h{n}_sto3g_{CHAIN_BOND}": chain_geometry(n, CHAIN_BOND) for n in CHAIN_LENGTHS}
    fixtures[f"h2o_sto3g_{H2O_BOND}"] = water_geometry()
    for bond in SWEEP_BONDS:
        fixtures.setdefault(f"h6_sto3g_{bond}", chain_geometry(6, bond))
    return fixtures


def generate_missing(output_dir: Path = DEFAULT_OUTPUT_DIR) -> List[Path]:
    """
    Write every default fixture that is not in ``output_dir`` yet.

    Returns:
        Paths written by this call (empty when all fixtures exist)
    """
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, geometry in default_fixtures().items():
        if not (output_dir / f"{name}.fcidump").exists():
            written.append(write_fixture(name, geometry, output_dir))
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Generate STO-3G FCIDUMP fixtures with PySCF")
    parser.add_argument("--output-dir", type=Path, default=DEFAULT_OUTPUT_DIR)
    parser.add_argument("--sweep", choices=[f"h{n}" for n in CHAIN_LENGTHS], help="Bond-length sweep for one chain")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")
    try:
        import pyscf  # noqa: F401
    except ImportError:
        logger.error("PySCF is required: pip install pyscf")
        return 1

    args.output_dir.mkdir(parents=True, exist_ok=True)
    if args.sweep:
        n_atoms = int(args.sweep[1:])
        for bond in SWEEP_BONDS:
            write_fixture(f"{args.sweep}_sto3g_{bond}", chain_geometry(n_atoms, bond), args.output_dir)
        return 0

    for n_atoms in CHAIN_LENGTHS:
        write_fixture(f"h{n_atoms}_sto3g_{CHAIN_BOND}", chain_geometry(n_atoms, CHAIN_BOND), args.output_dir)
    write_fixture(f"h2o_sto3g_{H2O_BOND}", water_geometry(), args.output_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
