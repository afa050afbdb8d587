"""
Experiment configuration schema.

Configs are TOML documents validated by pydantic models that reject unknown
keys. ``RunSpec`` describes one run; ``ExperimentConfig`` adds the method and
seed lists, fixtures and the output directory, and expands into run specs.
"""

from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union
import hashlib
import json
import logging
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from utils.errors import ConfigError

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "SQDOPT_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "results"

Method = Literal["hf", "fci", "vqe", "partial-vqe", "sqdz", "sqdopt"]
METHODS: Tuple[str, ...] = ("hf", "fci", "vqe", "partial-vqe", "sqdz", "sqdopt")
OPTIMIZING_METHODS = ("vqe", "partial-vqe", "sqdz", "sqdopt")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AnsatzConfig(_Strict):
    """LUCJ ansatz settings."""

    layers: int = Field(1, ge=1)
    interaction_pairs: Optional[List[Tuple[int, int]]] = None
    init_seed: Optional[int] = None
    init_scale: float = Field(0.1, ge=0.0)


class OptimizerConfig(_Strict):
    """Derivative-free optimizer settings (max_iter counts cost evaluations)."""

    max_iter: int = Field(500, ge=1)
    rho_beg: float = Field(0.1, gt=0.0)
    rho_end: float = Field(1e-4, gt=0.0)

    @model_validator(mode="after")
    def _check_radii(self):
        if self.rho_end > self.rho_beg:
            raise ValueError("rho_end must not exceed rho_beg")
        return self


class SqdConfig(_Strict):
    """Sample-based diagonalization settings."""

    batches: int = Field(3, ge=1)
    batch_size: int = Field(200, ge=1)
    max_rounds: int = Field(10, ge=1)
    energy_tol: float = Field(1e-6, gt=0.0)
    davidson_tol: float = Field(1e-8, gt=0.0)
    davidson_max_iter: int = Field(200, ge=1)


class RunSpec(_Strict):
    """One method on one fixture with one master seed."""

    fcidump: Path
    frozen_orbitals: List[int] = Field(default_factory=list)
    method: Method = "sqdopt"
    k: int = 5
    shots: int = Field(10_000, ge=1)
    seed: int = 0
    full_sector: bool = False
    ansatz: AnsatzConfig = Field(default_factory=AnsatzConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    sqd: SqdConfig = Field(default_factory=SqdConfig)

    @field_validator("k")
    @classmethod
    def _k_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("k must be >= 1")
        return value

    @field_validator("frozen_orbitals")
    @classmethod
    def _distinct_frozen(cls, value: List[int]) -> List[int]:
        if len(set(value)) != len(value):
            raise ValueError("frozen_orbitals must be distinct")
        return value

    def canonical(self) -> dict:
        return json.loads(self.model_dump_json())

    def config_hash(self) -> str:
        return config_hash(self.canonical())


class ExperimentConfig(_Strict):
    """
    A batch of runs: every method x fixture x seed combination.

    Per-run settings not listed here take the RunSpec defaults.
    """

    fixtures: List[Path] = Field(min_length=1)
    methods: List[Method] = Field(default_factory=lambda: ["hf", "fci", "sqdopt"])
    seeds: List[int] = Field(default_factory=lambda: [0])
    frozen_orbitals: List[int] = Field(default_factory=list)
    k: int = Field(5, ge=1)
    shots: int = Field(10_000, ge=1)
    full_sector: bool = False
    output_dir: Optional[Path] = None
    benchmark_iterations: int = Field(10, ge=1)
    ansatz: AnsatzConfig = Field(default_factory=AnsatzConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    sqd: SqdConfig = Field(default_factory=SqdConfig)

    def run_specs(self) -> List[RunSpec]:
        specs = []
        for fixture in self.fixtures:
            for method in self.methods:
                seeds = self.seeds if method in OPTIMIZING_METHODS else self.seeds[:1]
                for seed in seeds:
                    specs.append(
                        RunSpec(
                            fcidump=fixture,
                            frozen_orbitals=list(self.frozen_orbitals),
                            method=method,
                            k=self.k,
                            shots=self.shots,
                            seed=seed,
                            full_sector=self.full_sector,
                            ansatz=self.ansatz,
                            optimizer=self.optimizer,
                            sqd=self.sqd,
                        )
                    )
        return specs

    def resolved_output_dir(self) -> Path:
        return self.output_dir if self.output_dir is not None else default_output_dir()

    def config_hash(self) -> str:
        return config_hash(json.loads(self.model_dump_json()))


def default_output_dir() -> Path:
    """Output directory from SQDOPT_OUTPUT_DIR (a .env file is honoured), else ``results/``."""
    load_dotenv()
    return Path(os.getenv(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR))


def config_hash(document: dict) -> str:
    """SHA-256 of the canonical JSON form (sorted keys, no whitespace)."""
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def file_hash(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _validate(model, document: dict, source: str):
    try:
        return model.model_validate(document)
    except ValidationError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read and validate a TOML experiment config.

    Relative fixture paths resolve against the config file's directory.

    Raises:
        FileNotFoundError: missing file
        ConfigError: TOML syntax error or schema violation
    """
    path = Path(path)
    with open(path, "rb") as handle:
        try:
            document = tomllib.load(handle)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    config = _validate(ExperimentConfig, document, str(path))
    config.fixtures = [f if f.is_absolute() else (path.parent / f) for f in config.fixtures]
    logger.info(f"Loaded config {path.name}: {len(config.run_specs())} runs")
    return config


def build_run_spec(**values) -> RunSpec:
    """Validate keyword settings (e.g. from CLI flags) into a RunSpec."""
    return _validate(RunSpec, {k: v for k, v in values.items() if v is not None}, "run settings")
