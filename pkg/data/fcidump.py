"""
FCIDUMP reader and writer.

Header: ``&FCI NORB=n, NELEC=m, MS2=s, ORBSYM=..., ISYM=1 &END`` (or ``/``),
case-insensitive, comma- or whitespace-separated; unknown keys are ignored.
Records: ``value i j k l`` with 1-based indices where

- ``i j k l`` all zero      -> core energy
- ``k = l = 0``, ``i, j > 0`` -> one-body integral h_ij
- ``j = k = l = 0``, ``i > 0`` -> orbital energy (ignored)
- all indices positive      -> two-electron integral (ij|kl)
"""

from typing import Dict, List, TextIO, Tuple, Union
from pathlib import Path
import io
import logging
import re

import numpy as np

from data.hamiltonian import EIGHTFOLD_PERMUTATIONS, MolecularHamiltonian
from utils.errors import FcidumpFormatError

logger = logging.getLogger(__name__)

DUPLICATE_TOL = 1e-12
KNOWN_HEADER_KEYS = {"NORB", "NELEC", "MS2", "ORBSYM", "ISYM", "UHF", "IUHF", "TREL", "ST", "SYML", "PNTGRP"}

_HEADER_END = re.compile(r"(&END|/)\s*$", re.IGNORECASE)


def _read_header(lines: List[str]) -> Tuple[Dict[str, List[str]], int]:
    """
    Collect header key/value lists.

    Returns:
        (values by upper-cased key, index of the first record line)
    """
    if not lines or not lines[0].lstrip().upper().startswith("&FCI"):
        raise FcidumpFormatError("missing &FCI header", 1)

    header_parts = []
    end_index = None
    for index, line in enumerate(lines):
        header_parts.append(line)
        if _HEADER_END.search(line.strip()) or line.strip().upper().endswith("&END"):
            end_index = index
            break
    if end_index is None:
        raise FcidumpFormatError("header is not terminated by &END or /", len(lines))

    body = " ".join(header_parts)
    body = re.sub(r"^\s*&FCI", "", body, flags=re.IGNORECASE)
    body = re.sub(r"(&END|/)\s*$", "", body.strip(), flags=re.IGNORECASE)

    values: Dict[str, List[str]] = {}
    current = None
    for token in re.split(r"[,\s]+", body):
        if not token:
            continue
        if "=" in token:
            key, _, value = token.partition("=")
            current = key.strip().upper()
            values[current] = [value] if value else []
        elif current is not None:
            values[current].append(token)
        else:
            raise FcidumpFormatError(f"unexpected header token {token!r}", 1)
    return values, end_index + 1


def _header_int(values: Dict[str, List[str]], key: str, default: Union[int, None] = None) -> int:
    if key not in values or not values[key]:
        if default is None:
            raise FcidumpFormatError(f"header is missing {key}", 1)
        return default
    try:
        return int(values[key][0])
    except ValueError:
        raise FcidumpFormatError(f"header value {key}={values[key][0]!r} is not an integer", 1)


def _parse_value(text: str, line_number: int) -> float:
    try:
        return float(text.replace("D", "E").replace("d", "e"))
    except ValueError:
        raise FcidumpFormatError(f"non-numeric value {text!r}", line_number)


def parse_fcidump(source: Union[str, TextIO]) -> MolecularHamiltonian:
    """
    Parse FCIDUMP text into a validated Hamiltonian.

    Every symmetry image of each stored two-electron record is materialized, so
    storing (rs|pq) alone makes (pq|rs) available. Small values are kept.

    Args:
        source: FCIDUMP text or a readable text stream

    Returns:
        MolecularHamiltonian with n_alpha = (NELEC + MS2) / 2, n_beta = (NELEC - MS2) / 2

    Raises:
        FcidumpFormatError: malformed header or record, index out of range,
            NELEC/MS2 parity mismatch, conflicting duplicate records
    """
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()
    values, first_record = _read_header(lines)

    for key in values:
        if key not in KNOWN_HEADER_KEYS:
            logger.debug(f"Ignoring unknown FCIDUMP header key {key}")
    if values.get("UHF", ["0"])[0].upper().strip(".") in ("TRUE", "T", "1"):
        raise FcidumpFormatError("unrestricted (UHF) FCIDUMP files are not supported", 1)

    norb = _header_int(values, "NORB")
    nelec = _header_int(values, "NELEC")
    ms2 = _header_int(values, "MS2", default=0)
    if norb < 1:
        raise FcidumpFormatError(f"NORB must be positive, got {norb}", 1)
    if (nelec + ms2) % 2 != 0 or abs(ms2) > nelec:
        raise FcidumpFormatError(f"NELEC={nelec} and MS2={ms2} have inconsistent parity", 1)
    n_alpha = (nelec + ms2) // 2
    n_beta = (nelec - ms2) // 2
    if n_alpha > norb or n_beta > norb:
        raise FcidumpFormatError(
            f"{n_alpha} alpha / {n_beta} beta electrons do not fit in {norb} orbitals", 1
        )

    core = None
    one_body = np.zeros((norb, norb))
    two_body = np.zeros((norb, norb, norb, norb))
    seen: Dict[Tuple[int, ...], float] = {}

    def _store(key: Tuple[int, ...], value: float, line_number: int) -> bool:
        previous = seen.get(key)
        if previous is not None:
            if abs(previous - value) > DUPLICATE_TOL:
                raise FcidumpFormatError(
                    f"conflicting duplicate record for {key}: {previous!r} vs {value!r}",
                    line_number,
                )
            return False
        seen[key] = value
        return True

    for offset, raw in enumerate(lines[first_record:]):
        line_number = first_record + offset + 1
        fields = raw.split()
        if not fields:
            continue
        if len(fields) != 5:
            raise FcidumpFormatError(f"expected 5 fields, found {len(fields)}", line_number)
        value = _parse_value(fields[0], line_number)
        try:
            i, j, k, l = (int(f) for f in fields[1:])
        except ValueError:
            raise FcidumpFormatError(f"non-integer index in {raw.strip()!r}", line_number)
        for index in (i, j, k, l):
            if not 0 <= index <= norb:
                raise FcidumpFormatError(f"index {index} outside [0, {norb}]", line_number)

        if i == j == k == l == 0:
            if _store((0,), value, line_number):
                core = value
        elif k == 0 and l == 0 and i > 0 and j > 0:
            p, r = sorted((i - 1, j - 1))
            if _store((1, p, r), value, line_number):
                one_body[p, r] = one_body[r, p] = value
        elif j == k == l == 0 and i > 0:
            logger.debug(f"Ignoring orbital energy record for orbital {i}")
        elif min(i, j, k, l) > 0:
            indices = (i - 1, j - 1, k - 1, l - 1)
            images = {tuple(indices[a] for a in perm) for perm in EIGHTFOLD_PERMUTATIONS}
            if _store((2,) + min(images), value, line_number):
                for image in images:
                    two_body[image] = value
        else:
            raise FcidumpFormatError(f"invalid index pattern {i} {j} {k} {l}", line_number)

    hamiltonian = MolecularHamiltonian(
        n_orbitals=norb,
        n_alpha=n_alpha,
        n_beta=n_beta,
        core_energy=0.0 if core is None else core,
        one_body=one_body,
        two_body=two_body,
    )
    logger.debug(f"Parsed FCIDUMP: {len(seen)} unique records, {norb} orbitals, {nelec} electrons")
    return hamiltonian


def read_fcidump(path: Union[str, Path]) -> MolecularHamiltonian:
    """
    Read an FCIDUMP file.

    Args:
        path: File path

    Returns:
        Parsed Hamiltonian
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as handle:
        hamiltonian = parse_fcidump(handle)
    logger.info(
        f"Loaded {path.name}: {hamiltonian.n_orbitals} orbitals, "
        f"{hamiltonian.n_alpha}+{hamiltonian.n_beta} electrons"
    )
    return hamiltonian


def write_fcidump(hamiltonian: MolecularHamiltonian, target: Union[str, Path, TextIO, None] = None) -> str:
    """
    Serialize a Hamiltonian as FCIDUMP text.

    One record per 8-fold-symmetry class (i >= j, k >= l, ij >= kl), then the
    one-body records (i >= j), then the core energy. Exact zeros are skipped.

    Args:
        hamiltonian: Hamiltonian to write
        target: Optional path or text stream to write to

    Returns:
        The FCIDUMP text
    """
    n = hamiltonian.n_orbitals
    nelec = hamiltonian.n_electrons
    ms2 = hamiltonian.n_alpha - hamiltonian.n_beta
    out = io.StringIO()
    out.write(f"&FCI NORB={n},NELEC={nelec},MS2={ms2},\n")
    out.write(" ORBSYM=" + ",".join(["1"] * n) + ",\n")
    out.write(" ISYM=1,\n&END\n")

    g = hamiltonian.two_body
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if kl > ij:
                        continue
                    value = g[i, j, k, l]
                    if value != 0.0:
                        out.write(f"{value: .16e} {i + 1} {j + 1} {k + 1} {l + 1}\n")
    h = hamiltonian.one_body
    for i in range(n):
        for j in range(i + 1):
            if h[i, j] != 0.0:
                out.write(f"{h[i, j]: .16e} {i + 1} {j + 1} 0 0\n")
    out.write(f"{hamiltonian.core_energy: .16e} 0 0 0 0\n")

    text = out.getvalue()
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    elif target is not None:
        target.write(text)
    return text
