"""
Method drivers: HF and FCI references, full and partial VQE, SQD-Z and SQDOpt.

Every optimizing method ends with one full-Hamiltonian expectation of the
optimized LUCJ state, so errors are comparable across methods. The SQD-based
cost samples the ansatz in a few fixed measurement bases, projects the
basis-rotated Hamiltonian onto the sampled determinants and averages the
per-basis ground energies.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging
import time

import numpy as np
import pandas as pd

from algorithms.cobyla import LinearTrustRegionMinimizer, OptimizationTrace
from algorithms.davidson import davidson_ground
from algorithms.fermion import EffectiveHamiltonian, filter_physical
from algorithms.grouping import MeasurementGroup, greedy_group, offdiagonal_ratio, select_groups
from algorithms.jordan_wigner import jw_map, reverse_jw
from algorithms.pauli import MeasurementBasis, PauliSum, conjugate_by_basis
from algorithms.slater_condon import fci_space, project, slater_condon_element
from algorithms.sqd import filter_sector, sqd_energy
from algorithms.statevector import (
    LucjParameters,
    Statevector,
    expectation,
    prepare_lucj,
    rhf_index,
    rhf_state,
    rotate_for_measurement,
    sample,
)
from data.fcidump import read_fcidump
from data.hamiltonian import ActiveSpaceSpec, MolecularHamiltonian, apply_frozen_orbitals
from utils.config import RunSpec, file_hash
from utils.errors import CapacityError, RecoveryError, SqdOptError
from utils.helpers import PhaseTimer, molecule_label, parse_bond_length, percent_error, split_seed

logger = logging.getLogger(__name__)

# Ladder-operator length kept when mapping rotated Pauli sums back to fermions;
# filter_physical keeps nothing longer.
REVERSE_JW_MAX_LENGTH = 4

SAMPLING_PHASES = ("state_prep", "rotation", "sampling")
DIAGONALIZATION_PHASES = ("projection", "davidson")


class ProblemContext:
    """
    Everything about one (fixture, frozen orbitals) pair that does not depend
    on the ansatz parameters: the active Hamiltonian, its qubit image, the
    measurement groups, the FCI reference and the per-basis effective
    Hamiltonians (built on first use and cached).
    """

    def __init__(self, hamiltonian: MolecularHamiltonian, fixture: Optional[Path] = None):
        self.hamiltonian = hamiltonian
        self.fixture = Path(fixture) if fixture is not None else None
        self.fixture_hash = file_hash(self.fixture) if self.fixture is not None else None
        self.pauli = jw_map(hamiltonian)
        self.groups: List[MeasurementGroup] = greedy_group(self.pauli)
        self._effective: Dict[str, EffectiveHamiltonian] = {}
        self._full_sector_energies: Dict[str, float] = {}
        self._fci: Optional[Tuple[float, np.ndarray]] = None
        logger.info(
            f"Problem: {hamiltonian.n_orbitals} orbitals, ({hamiltonian.n_alpha}, {hamiltonian.n_beta}) "
            f"electrons, {len(self.pauli)} Pauli terms, {len(self.groups)} groups"
        )

    @classmethod
    def from_fixture(cls, path, frozen_orbitals: Sequence[int] = ()) -> "ProblemContext":
        """
        Read an FCIDUMP file and freeze the given orbitals.

        Raises:
            FileNotFoundError: missing fixture
            FcidumpFormatError: malformed file
            ActiveSpaceError: invalid frozen-orbital list
        """
        full = read_fcidump(path)
        active = apply_frozen_orbitals(full, ActiveSpaceSpec(tuple(frozen_orbitals)))
        return cls(active, fixture=path)

    @property
    def n_orbitals(self) -> int:
        return self.hamiltonian.n_orbitals

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits

    @property
    def all_z(self) -> MeasurementBasis:
        return MeasurementBasis.all_z(self.n_qubits)

    def offdiagonal_ratio(self) -> float:
        return offdiagonal_ratio(self.pauli)

    def hf_energy(self) -> float:
        """Diagonal element of H at the RHF determinant."""
        h = self.hamiltonian
        index = rhf_index(h.n_orbitals, h.n_alpha, h.n_beta)
        return float(np.real(slater_condon_element(h, index, index)))

    def fci(self) -> Tuple[float, np.ndarray]:
        """
        Sector-restricted ground state (energy, coefficients over ``fci_space`` order).

        Raises:
            CapacityError: sector above the determinant cap
        """
        if self._fci is None:
            h = self.hamiltonian
            dets = fci_space(h.n_orbitals, h.n_alpha, h.n_beta)
            energy, vector = davidson_ground(project(h, dets))
            self._fci = (float(energy), vector)
            logger.info(f"FCI energy over {dets.shape[0]} determinants: {energy:.10f}")
        return self._fci

    def fci_energy(self) -> float:
        return self.fci()[0]

    def effective_for(self, basis: MeasurementBasis) -> EffectiveHamiltonian:
        """
        Particle-conserving Hamiltonian measured in ``basis``.

        The all-Z basis gives the molecular Hamiltonian itself; other bases
        give filter_physical(reverse_jw(conjugate_by_basis(P, basis))).
        """
        key = basis.letters
        if key not in self._effective:
            h = self.hamiltonian
            if basis.is_all_z:
                effective = EffectiveHamiltonian.from_molecular(h)
            else:
                rotated = conjugate_by_basis(self.pauli, basis)
                terms = reverse_jw(rotated, max_length=REVERSE_JW_MAX_LENGTH)
                effective, discarded = filter_physical(terms)
                effective = replace(effective, n_alpha=h.n_alpha, n_beta=h.n_beta)
                logger.debug(f"Basis {basis}: filtered Hamiltonian discards weight {discarded:.4e}")
            self._effective[key] = effective
        return self._effective[key]

    def hf_fallback(self, basis: MeasurementBasis) -> float:
        """RHF diagonal of the basis-rotated Hamiltonian."""
        h = self.hamiltonian
        index = rhf_index(h.n_orbitals, h.n_alpha, h.n_beta)
        return float(np.real(slater_condon_element(self.effective_for(basis), index, index)))

    def full_sector_energy(self, basis: MeasurementBasis) -> float:
        """Exact sector ground energy of the basis-rotated Hamiltonian."""
        key = basis.letters
        if key not in self._full_sector_energies:
            h = self.hamiltonian
            dets = fci_space(h.n_orbitals, h.n_alpha, h.n_beta)
            energy, _ = davidson_ground(project(self.effective_for(basis), dets))
            self._full_sector_energies[key] = float(energy)
        return self._full_sector_energies[key]


def _parameters(context: ProblemContext, spec: RunSpec, vector: np.ndarray) -> LucjParameters:
    return LucjParameters.from_vector(
        vector, context.n_orbitals, spec.ansatz.layers, spec.ansatz.interaction_pairs
    )


def initial_parameters(context: ProblemContext, spec: RunSpec) -> np.ndarray:
    """Uniform draw in [-init_scale, init_scale]; seeded by init_seed, else the run seed."""
    seed = spec.ansatz.init_seed if spec.ansatz.init_seed is not None else spec.seed
    params = LucjParameters.random(
        context.n_orbitals,
        layers=spec.ansatz.layers,
        pairs=spec.ansatz.interaction_pairs,
        seed=seed,
        scale=spec.ansatz.init_scale,
    )
    return params.to_vector()


def prepare_state(context: ProblemContext, spec: RunSpec, vector: np.ndarray) -> Statevector:
    h = context.hamiltonian
    return prepare_lucj(_parameters(context, spec, vector), h.n_alpha, h.n_beta)


def basis_energy(
    state: Statevector,
    basis: MeasurementBasis,
    context: ProblemContext,
    spec: RunSpec,
    seed: int,
    timer: Optional[PhaseTimer] = None,
) -> float:
    """
    Ground energy of the basis-rotated Hamiltonian in the span of the
    determinants sampled from ``state`` measured in ``basis``.

    Only the all-Z basis repairs out-of-sector samples. A rotated basis with no
    in-sector sample contributes the RHF diagonal with a warning.
    """
    timer = timer or PhaseTimer()
    if spec.full_sector:
        return context.full_sector_energy(basis)
    with timer.phase("rotation"):
        rotated = rotate_for_measurement(state, basis)
    with timer.phase("sampling"):
        samples = sample(rotated, spec.shots, seed=split_seed(seed, 0))
    h = context.hamiltonian
    if not basis.is_all_z:
        dets, _ = filter_sector(samples, h.n_alpha, h.n_beta)
        if dets.size == 0:
            logger.warning(f"No in-sector sample in basis {basis}; using the RHF diagonal")
            return context.hf_fallback(basis)
    try:
        result = sqd_energy(
            context.effective_for(basis),
            samples,
            batches=spec.sqd.batches,
            batch_size=spec.sqd.batch_size,
            max_rounds=1,
            energy_tol=spec.sqd.energy_tol,
            recover=basis.is_all_z,
            seed=split_seed(seed, 1),
            davidson_tol=spec.sqd.davidson_tol,
            davidson_max_iter=spec.sqd.davidson_max_iter,
            timer=timer,
        )
    except RecoveryError as exc:
        logger.warning(f"Basis {basis}: {exc}; using the RHF diagonal")
        return context.hf_fallback(basis)
    return result.energy


def sqdopt_cost(
    vector: np.ndarray,
    bases: Sequence[MeasurementBasis],
    context: ProblemContext,
    spec: RunSpec,
    iteration: int = 0,
    timer: Optional[PhaseTimer] = None,
) -> Tuple[float, List[float]]:
    """
    SQDOpt cost of one parameter vector.

    Args:
        vector: Packed LUCJ parameters
        bases: Measurement bases (the all-Z basis among them)
        context: Problem context holding the cached rotated Hamiltonians
        spec: Run settings (shots, SQD settings, master seed, full_sector)
        iteration: Evaluation index, keys the per-basis seeds
        timer: Optional phase timer

    Returns:
        (mean of the per-basis energies, per-basis energies in ``bases`` order)
    """
    if not bases:
        raise ValueError("sqdopt_cost needs at least one basis")
    timer = timer or PhaseTimer()
    state = None
    if not spec.full_sector:
        with timer.phase("state_prep"):
            state = prepare_state(context, spec, vector)
    energies = [
        basis_energy(state, basis, context, spec, split_seed(spec.seed, iteration, index), timer)
        for index, basis in enumerate(bases)
    ]
    return float(np.mean(energies)), energies


@dataclass
class RunResult:
    """
    One method run on one fixture.

    ``energy`` is the full-Hamiltonian expectation of the final state (the
    FCI or HF energy for the reference methods).
    """

    method: str
    fixture: str
    molecule: str
    bond_length: Optional[float]
    seed: int
    energy: Optional[float] = None
    fci_energy: Optional[float] = None
    hf_energy: Optional[float] = None
    percent_error: Optional[float] = None
    sqd_final_energy: Optional[float] = None
    bases: List[str] = field(default_factory=list)
    bases_per_step: int = 0
    total_shots: int = 0
    evaluations: int = 0
    parameters: List[float] = field(default_factory=list)
    final_sub_energies: List[float] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    wall_time: float = 0.0
    status: str = "ok"
    error: Optional[str] = None
    config_hash: Optional[str] = None
    fixture_hash: Optional[str] = None
    spec: Dict = field(default_factory=dict)
    trace: Optional[OptimizationTrace] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def as_record(self) -> dict:
        record = {k: v for k, v in self.__dict__.items() if k != "trace"}
        record["trace_length"] = len(self.trace) if self.trace is not None else 0
        return record


def _sqd_final_energy(context: ProblemContext, spec: RunSpec, state: Statevector, evaluations: int) -> float:
    """Standalone SQD of the final state with full configuration-recovery rounds."""
    h = context.hamiltonian
    if spec.full_sector:
        samples = fci_space(h.n_orbitals, h.n_alpha, h.n_beta)
    else:
        samples = sample(state, spec.shots, seed=split_seed(spec.seed, evaluations, 0))
    result = sqd_energy(
        h,
        samples,
        batches=spec.sqd.batches,
        batch_size=spec.sqd.batch_size,
        max_rounds=spec.sqd.max_rounds,
        energy_tol=spec.sqd.energy_tol,
        recover=True,
        seed=split_seed(spec.seed, evaluations, 1),
        davidson_tol=spec.sqd.davidson_tol,
        davidson_max_iter=spec.sqd.davidson_max_iter,
    )
    logger.info(f"Standalone SQD of the final state: {result.energy:.10f} after {result.rounds} rounds")
    return result.energy


def make_cost(
    method: str,
    context: ProblemContext,
    spec: RunSpec,
    timer: Optional[PhaseTimer] = None,
) -> Tuple[Callable[[np.ndarray], Tuple[float, List[float]]], List[MeasurementBasis]]:
    """
    Cost function of an optimizing method and the bases it measures per step.

    vqe measures every group; partial-vqe the k selected groups; sqdz only the
    all-Z basis; sqdopt the k selected bases.
    """
    timer = timer or PhaseTimer()
    counter = {"iteration": 0}

    if method in ("vqe", "partial-vqe"):
        if method == "vqe":
            groups = list(context.groups)
            operator = context.pauli
        else:
            groups = select_groups(context.groups, spec.k, context.pauli)
            strings = {p for g in groups for p in g.terms.strings()}
            operator = context.pauli.restricted_to(strings) + PauliSum.identity(
                context.n_qubits, context.pauli.identity_coefficient
            )
        bases = [g.basis for g in groups]

        def expectation_cost(vector: np.ndarray) -> Tuple[float, List[float]]:
            with timer.phase("state_prep"):
                state = prepare_state(context, spec, vector)
            with timer.phase("expectation"):
                value = expectation(state, operator)
            return value, [value]

        return expectation_cost, bases

    if method == "sqdz":
        bases = [context.all_z]
    elif method == "sqdopt":
        bases = [g.basis for g in select_groups(context.groups, spec.k, context.pauli)]
    else:
        raise ValueError(f"{method} is not an optimizing method")

    def sampled_cost(vector: np.ndarray) -> Tuple[float, List[float]]:
        value, energies = sqdopt_cost(vector, bases, context, spec, counter["iteration"], timer)
        counter["iteration"] += 1
        return value, energies

    return sampled_cost, bases


def _finish(result: RunResult, context: ProblemContext) -> RunResult:
    try:
        result.fci_energy = context.fci_energy()
    except CapacityError as exc:
        logger.warning(f"No FCI reference: {exc}")
    if result.energy is not None and result.fci_energy is not None:
        result.percent_error = percent_error(result.energy, result.fci_energy)
    return result


def run_method(spec: RunSpec, context: Optional[ProblemContext] = None) -> RunResult:
    """
    Run one method as described by ``spec``.

    Args:
        spec: Validated run settings
        context: Pre-built problem context for ``spec.fcidump`` (built when None)

    Returns:
        RunResult

    Raises:
        CapacityError: statevector above the qubit cap, or FCI sector above
            the determinant cap for method fci
        OptimizationAbortedError: non-finite cost during optimization
        DavidsonConvergenceError: a diagonalization failed to converge
    """
    context = context or ProblemContext.from_fixture(spec.fcidump, spec.frozen_orbitals)
    fixture = Path(spec.fcidump)
    result = RunResult(
        method=spec.method,
        fixture=str(fixture),
        molecule=molecule_label(fixture),
        bond_length=parse_bond_length(fixture),
        seed=spec.seed,
        hf_energy=context.hf_energy(),
        config_hash=spec.config_hash(),
        fixture_hash=context.fixture_hash,
        spec=spec.canonical(),
    )
    timer = PhaseTimer()
    start = time.perf_counter()
    method = spec.method
    logger.info(f"Running {method} on {fixture.name} (seed {spec.seed})")

    if method == "hf":
        h = context.hamiltonian
        with timer.phase("expectation"):
            result.energy = expectation(rhf_state(h.n_orbitals, h.n_alpha, h.n_beta), context.pauli)
    elif method == "fci":
        with timer.phase("fci"):
            result.energy = context.fci_energy()
    else:
        cost, bases = make_cost(method, context, spec, timer)
        x0 = initial_parameters(context, spec)
        minimizer = LinearTrustRegionMinimizer(
            max_iter=spec.optimizer.max_iter,
            rho_beg=spec.optimizer.rho_beg,
            rho_end=spec.optimizer.rho_end,
        )
        with timer.phase("optimizer"):
            best, trace = minimizer.minimize(cost, x0)
        result.trace = trace
        result.parameters = [float(v) for v in best]
        result.evaluations = len(trace)
        result.bases = [b.letters for b in bases]
        result.bases_per_step = len(bases)
        best_record = trace.best()
        result.final_sub_energies = list(best_record.sub_energies) if best_record else []
        if method in ("sqdz", "sqdopt") and not spec.full_sector:
            result.total_shots = spec.shots * len(bases) * len(trace)

        with timer.phase("final_evaluation"):
            state = prepare_state(context, spec, best)
            result.energy = expectation(state, context.pauli)
        if method in ("sqdz", "sqdopt"):
            result.sqd_final_energy = _sqd_final_energy(context, spec, state, len(trace))

    result.wall_time = time.perf_counter() - start
    result.timings = timer.as_dict()
    _finish(result, context)
    error_text = f"{result.percent_error:.4f}%" if result.percent_error is not None else "n/a"
    logger.info(f"{method} on {fixture.name}: energy {result.energy:.10f}, error {error_text}")
    return result


def failed_result(spec: RunSpec, exc: Exception) -> RunResult:
    fixture = Path(spec.fcidump)
    status = "capacity" if isinstance(exc, CapacityError) else "failed"
    return RunResult(
        method=spec.method,
        fixture=str(fixture),
        molecule=molecule_label(fixture),
        bond_length=parse_bond_length(fixture),
        seed=spec.seed,
        status=status,
        error=f"{type(exc).__name__}: {exc}",
        config_hash=spec.config_hash(),
        spec=spec.canonical(),
    )


def run_batch(specs: Sequence[RunSpec]) -> List[RunResult]:
    """
    Run several specs, sharing one context per (fixture, frozen orbitals).

    Package errors are recorded as failed results instead of aborting the batch.
    """
    contexts: Dict[Tuple[str, Tuple[int, ...]], ProblemContext] = {}
    results = []
    for spec in specs:
        key = (str(spec.fcidump), tuple(spec.frozen_orbitals))
        try:
            if key not in contexts:
                contexts[key] = ProblemContext.from_fixture(spec.fcidump, spec.frozen_orbitals)
            results.append(run_method(spec, contexts[key]))
        except (SqdOptError, FileNotFoundError) as exc:
            logger.error(f"{spec.method} on {spec.fcidump} failed: {exc}")
            results.append(failed_result(spec, exc))
    return results


def results_frame(results: Sequence[RunResult]) -> pd.DataFrame:
    columns = [
        "molecule", "bond_length", "method", "seed", "energy", "fci_energy", "percent_error",
        "sqd_final_energy", "bases_per_step", "evaluations", "wall_time", "status", "error",
    ]
    rows = [{c: getattr(r, c) for c in columns} for r in results]
    return pd.DataFrame(rows, columns=columns)


def seed_statistics(results: Sequence[RunResult]) -> pd.DataFrame:
    """
    Median and best percent error over seeds per (molecule, bond length, method).
    """
    frame = results_frame([r for r in results if r.ok and r.percent_error is not None])
    columns = ["molecule", "bond_length", "method", "n_seeds", "median_error", "best_error"]
    if frame.empty:
        return pd.DataFrame(columns=columns)
    grouped = frame.groupby(["molecule", "bond_length", "method"], dropna=False)["percent_error"]
    stats = grouped.agg(n_seeds="count", median_error="median", best_error="min").reset_index()
    return stats[columns]


def sweep_table(results: Sequence[RunResult]) -> pd.DataFrame:
    """
    One row per (molecule, bond length): median percent error per method,
    the SQDOpt minus VQE gap in percentage points and failure markers.
    """
    base_columns = ["molecule", "bond_length"]
    if not results:
        return pd.DataFrame(columns=base_columns + ["failures"])
    stats = seed_statistics(results)
    if stats.empty:
        table = pd.DataFrame({
            "molecule": [r.molecule for r in results],
            "bond_length": [r.bond_length for r in results],
        }).drop_duplicates()
    else:
        table = stats.set_index(base_columns + ["method"])["median_error"].unstack("method")
        table.columns = [f"{m}_error" for m in table.columns]
        table = table.reset_index()
    if "sqdopt_error" in table and "vqe_error" in table:
        table["sqdopt_minus_vqe"] = table["sqdopt_error"] - table["vqe_error"]

    failures: Dict[Tuple[str, Optional[float]], List[str]] = {}
    for r in results:
        if not r.ok:
            failures.setdefault((r.molecule, r.bond_length), []).append(f"{r.method}:{r.status}")
    table["failures"] = [
        ";".join(failures.get((m, b), [])) for m, b in zip(table["molecule"], table["bond_length"])
    ]
    return table.sort_values(base_columns, na_position="last").reset_index(drop=True)


def bond_sweep(
    template: RunSpec,
    fixtures: Sequence[Path],
    methods: Sequence[str],
    seeds: Optional[Sequence[int]] = None,
) -> Tuple[pd.DataFrame, List[RunResult]]:
    """
    Run every method on every fixture.

    Args:
        template: Settings shared by all runs (fcidump and method are replaced)
        fixtures: FCIDUMP paths, one per bond length
        methods: Method names
        seeds: Master seeds for the optimizing methods (template seed when None)

    Returns:
        (sweep table, per-run results); an empty fixture list gives an empty table
    """
    seeds = list(seeds) if seeds else [template.seed]
    specs = []
    for fixture in fixtures:
        for method in methods:
            method_seeds = seeds if method not in ("hf", "fci") else seeds[:1]
            for seed in method_seeds:
                specs.append(template.model_copy(update={"fcidump": Path(fixture), "method": method, "seed": seed}))
    results = run_batch(specs)
    return sweep_table(results), results


def _phase_split(timer: PhaseTimer) -> Tuple[float, float]:
    sampling = sum(timer.total(p) for p in SAMPLING_PHASES)
    diagonalization = sum(timer.total(p) for p in DIAGONALIZATION_PHASES)
    return sampling, diagonalization


def benchmark(
    template: RunSpec,
    fixtures: Sequence[Path],
    methods: Sequence[str],
    iterations: int = 10,
) -> pd.DataFrame:
    """
    Wall-clock time per optimization step per (molecule, method).

    Optimizing methods time ``iterations`` cost evaluations at the initial
    parameters plus small seeded perturbations; fci and hf time the whole
    procedure once. Capacity errors become table entries.

    Returns:
        DataFrame with columns molecule, n_qubits, method, bases_per_step,
        median_step_time, median_sampling_time, median_diagonalization_time,
        steps, total_procedure, status, error
    """
    rows = []
    for fixture in fixtures:
        fixture = Path(fixture)
        try:
            context = ProblemContext.from_fixture(fixture, template.frozen_orbitals)
        except (SqdOptError, FileNotFoundError) as exc:
            logger.error(f"Cannot load {fixture}: {exc}")
            for method in methods:
                rows.append(
                    {"molecule": molecule_label(fixture), "method": method, "status": "failed", "error": str(exc)}
                )
            continue
        for method in methods:
            spec = template.model_copy(update={"fcidump": fixture, "method": method})
            row = {
                "molecule": molecule_label(fixture),
                "n_qubits": context.n_qubits,
                "method": method,
                "bases_per_step": 0,
                "steps": 0,
                "total_procedure": method in ("hf", "fci"),
                "status": "ok",
                "error": None,
            }
            try:
                if method in ("hf", "fci"):
                    start = time.perf_counter()
                    run_method(spec, context)
                    row["median_step_time"] = time.perf_counter() - start
                    row["steps"] = 1
                else:
                    row.update(_time_steps(context, spec, iterations))
            except SqdOptError as exc:
                logger.error(f"Benchmark {method} on {fixture.name}: {exc}")
                row["status"] = "capacity" if isinstance(exc, CapacityError) else "failed"
                row["error"] = str(exc)
            rows.append(row)
    columns = [
        "molecule", "n_qubits", "method", "bases_per_step", "median_step_time",
        "median_sampling_time", "median_diagonalization_time", "steps",
        "total_procedure", "status", "error",
    ]
    return pd.DataFrame(rows, columns=columns)


def _time_steps(context: ProblemContext, spec: RunSpec, iterations: int) -> dict:
    step_timer = PhaseTimer()
    cost, bases = make_cost(spec.method, context, spec, step_timer)
    x0 = initial_parameters(context, spec)
    rng = np.random.default_rng(split_seed(spec.seed, iterations))
    steps, sampling, diagonalization = [], [], []
    for _ in range(iterations):
        before = _phase_split(step_timer)
        start = time.perf_counter()
        cost(x0 + rng.uniform(-spec.optimizer.rho_beg, spec.optimizer.rho_beg, size=x0.shape))
        steps.append(time.perf_counter() - start)
        after = _phase_split(step_timer)
        sampling.append(after[0] - before[0])
        diagonalization.append(after[1] - before[1])
    return {
        "bases_per_step": len(bases),
        "median_step_time": float(np.median(steps)),
        "median_sampling_time": float(np.median(sampling)),
        "median_diagonalization_time": float(np.median(diagonalization)),
        "steps": iterations,
    }


def evaluate_parameters(context: ProblemContext, spec: RunSpec, vector: Sequence[float]) -> Dict[str, float]:
    """
    Full-Hamiltonian energy of a stored parameter vector.

    Returns:
        dict with energy, fci_energy (when available) and percent_error
    """
    state = prepare_state(context, spec, np.asarray(vector, dtype=float))
    energy = expectation(state, context.pauli)
    record = {"energy": energy, "fci_energy": None, "percent_error": None}
    try:
        record["fci_energy"] = context.fci_energy()
        record["percent_error"] = percent_error(energy, record["fci_energy"])
    except CapacityError as exc:
        logger.warning(f"No FCI reference: {exc}")
    return record
