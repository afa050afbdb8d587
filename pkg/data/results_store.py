"""
Result persistence for experiment runs.

Each run is stored as ``<output_dir>/<molecule>_<method>_seed<seed>_<hash8>.json``
with its optimizer trace next to it as CSV. Tables (sweeps, benchmarks,
comparisons) are written as tidy CSV. Only one experiment process may write to
an output directory at a time; a lock file enforces this.
"""

from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union
import json
import logging
import math
import os

import pandas as pd

from algorithms.drivers import RunResult
from utils.errors import FixtureMismatchError, OutputLockedError

logger = logging.getLogger(__name__)

LOCK_NAME = ".sqdopt.lock"


def _clean(value):
    """JSON-safe copy: NaN and infinity become null."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


class ResultsStore:
    """
    Directory of run results.

    Args:
        output_dir: Target directory (created on demand)
    """

    def __init__(self, output_dir: Union[str, Path]):
        self.output_dir = Path(output_dir)

    @property
    def lock_path(self) -> Path:
        return self.output_dir / LOCK_NAME

    @contextmanager
    def locked(self) -> Iterator["ResultsStore"]:
        """
        Hold the directory lock for the duration of the block.

        Raises:
            OutputLockedError: the lock file already exists
        """
        self.output_dir.mkdir(parents=True, exist_ok=True)
        try:
            descriptor = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as exc:
            raise OutputLockedError(
                f"{self.output_dir} is locked by another run (remove {self.lock_path} if stale)"
            ) from exc
        try:
            os.write(descriptor, str(os.getpid()).encode("ascii"))
            os.close(descriptor)
            yield self
        finally:
            self.lock_path.unlink(missing_ok=True)

    def run_stem(self, result: RunResult) -> str:
        short_hash = (result.config_hash or "nohash")[:8]
        return f"{result.molecule.lower()}_{result.method}_seed{result.seed}_{short_hash}"

    def save_run(self, result: RunResult) -> Path:
        """Write the run record (JSON) and its trace (CSV); returns the JSON path."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        stem = self.run_stem(result)
        record = result.as_record()
        if result.trace is not None and len(result.trace):
            trace_path = self.output_dir / f"{stem}_trace.csv"
            frame = result.trace.to_frame().assign(
                best_so_far=result.trace.best_so_far(), config_hash=result.config_hash
            )
            frame.to_csv(trace_path, index=False)
            record["trace_file"] = trace_path.name
        path = self.output_dir / f"{stem}.json"
        path.write_text(json.dumps(_clean(record), indent=2, sort_keys=True))
        logger.info(f"Saved {result.method} result to {path}")
        return path

    def save_table(self, frame: pd.DataFrame, name: str, config_hash: Optional[str] = None) -> Path:
        """Write a tidy CSV; the config hash, when given, becomes a column."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        if config_hash is not None:
            frame = frame.assign(config_hash=config_hash)
        path = self.output_dir / f"{name}.csv"
        frame.to_csv(path, index=False)
        logger.info(f"Saved {len(frame)} rows to {path}")
        return path

    def load_runs(self) -> List[Dict]:
        if not self.output_dir.is_dir():
            return []
        return load_run_files(sorted(self.output_dir.glob("*.json")))


def load_run(path: Union[str, Path]) -> Dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def load_run_files(paths: Sequence[Union[str, Path]]) -> List[Dict]:
    records = []
    for path in paths:
        record = load_run(path)
        if "method" not in record or "fixture" not in record:
            logger.debug(f"Skipping {path}: not a run record")
            continue
        record["source"] = str(path)
        records.append(record)
    return records


def check_fixture_hashes(records: Sequence[Dict]) -> None:
    """
    Raises:
        FixtureMismatchError: two records name the same fixture file but carry
            different content hashes
    """
    seen: Dict[str, str] = {}
    for record in records:
        name = Path(record["fixture"]).name
        digest = record.get("fixture_hash")
        if digest is None:
            continue
        if seen.setdefault(name, digest) != digest:
            raise FixtureMismatchError(
                f"fixture {name} has hash {digest[:12]} in {record.get('source', '?')} "
                f"but {seen[name][:12]} elsewhere"
            )


def compare_records(
    records: Sequence[Dict],
    offdiagonal: Optional[Dict[Tuple[str, Optional[float]], float]] = None,
) -> pd.DataFrame:
    """
    Merge stored runs into one row per (molecule, bond length).

    Columns: molecule, bond_length, fci_energy, <method>_error (median over
    seeds), <method>_best (best seed), sqdopt_minus_vqe and sqdopt_minus_hf in
    percentage points, and the off-diagonal ratio when provided per
    (molecule, bond length).

    Raises:
        FixtureMismatchError: see :func:`check_fixture_hashes`
    """
    check_fixture_hashes(records)
    ok = [r for r in records if r.get("status", "ok") == "ok" and r.get("percent_error") is not None]
    if not ok:
        return pd.DataFrame(columns=["molecule", "bond_length", "fci_energy"])
    frame = pd.DataFrame(
        {
            "molecule": [r["molecule"] for r in ok],
            "bond_length": [r.get("bond_length") for r in ok],
            "method": [r["method"] for r in ok],
            "percent_error": [r["percent_error"] for r in ok],
            "fci_energy": [r.get("fci_energy") for r in ok],
        }
    )
    keys = ["molecule", "bond_length"]
    stats = frame.groupby(keys + ["method"], dropna=False).agg(
        error=("percent_error", "median"),
        best=("percent_error", "min"),
        fci_energy=("fci_energy", "first"),
    )
    wide = stats.unstack("method")
    table = pd.DataFrame(index=wide.index)
    table["fci_energy"] = wide["fci_energy"].bfill(axis=1).iloc[:, 0]
    for column in ("error", "best"):
        for method in wide[column].columns:
            table[f"{method}_{column}"] = wide[column][method]
    table = table.reset_index()
    if "sqdopt_error" in table and "vqe_error" in table:
        table["sqdopt_minus_vqe"] = table["sqdopt_error"] - table["vqe_error"]
    if "sqdopt_error" in table and "hf_error" in table:
        table["sqdopt_minus_hf"] = table["sqdopt_error"] - table["hf_error"]
    if offdiagonal:
        table["offdiagonal_ratio"] = [
            offdiagonal.get((m, None if pd.isna(b) else float(b)))
            for m, b in zip(table["molecule"], table["bond_length"])
        ]
    return table.sort_values(keys).reset_index(drop=True)
