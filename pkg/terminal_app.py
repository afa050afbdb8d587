"""
SQDOpt terminal entry point.

Subcommands:
    parse      Hamiltonian summary (orbitals, electrons, Pauli terms)
    plan       Measurement-group table
    optimize   Run a method (trace and result persisted)
    evaluate   Full-Hamiltonian energy of a stored parameter vector
    sweep      Bond-length table across fixtures
    benchmark  Per-step timing table
    compare    Merged error report across stored results

Exit codes: 0 ok, 1 unexpected failure, 2 bad flags, 3 missing file,
4 config or FCIDUMP error, 5 capacity error, 6 output directory locked,
7 numerical failure.
"""

from pathlib import Path
from typing import List, Optional, Sequence
import argparse
import logging
import sys

import numpy as np
import pandas as pd
from colorama import Fore, Style, init

from algorithms.drivers import (
    ProblemContext,
    RunResult,
    benchmark,
    bond_sweep,
    evaluate_parameters,
    run_batch,
    run_method,
    seed_statistics,
    sweep_table,
)
from algorithms.grouping import planning_table, select_groups
from data.results_store import ResultsStore, compare_records, load_run, load_run_files
from utils.config import METHODS, ExperimentConfig, RunSpec, build_run_spec, default_output_dir, load_experiment_config
from utils.errors import (
    ActiveSpaceError,
    BasisMismatchError,
    CapacityError,
    ConfigError,
    DavidsonConvergenceError,
    DegenerateHamiltonianError,
    FcidumpFormatError,
    FixtureMismatchError,
    OptimizationAbortedError,
    OutputLockedError,
    RecoveryError,
)
from utils.helpers import format_duration, format_energy, format_percentage, molecule_label, parse_bond_length

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_BAD_FLAGS = 2
EXIT_MISSING_FILE = 3
EXIT_INVALID_INPUT = 4
EXIT_CAPACITY = 5
EXIT_LOCKED = 6
EXIT_NUMERICAL = 7

EXIT_CODES = (
    (FileNotFoundError, EXIT_MISSING_FILE),
    ((ConfigError, FcidumpFormatError, ActiveSpaceError, BasisMismatchError, FixtureMismatchError), EXIT_INVALID_INPUT),
    (CapacityError, EXIT_CAPACITY),
    (OutputLockedError, EXIT_LOCKED),
    ((DavidsonConvergenceError, OptimizationAbortedError, RecoveryError, DegenerateHamiltonianError), EXIT_NUMERICAL),
)

# Initialize colorama for Windows support
init(autoreset=True)


def headline(text: str) -> None:
    print(f"\n{'=' * 72}")
    print(f"{Style.BRIGHT}{text}{Style.RESET_ALL}")
    print(f"{'=' * 72}")


def colorize_error(value: Optional[float]) -> str:
    """Green below 0.1%, yellow below 1%, red otherwise."""
    if value is None or pd.isna(value):
        return f"{Style.DIM}n/a{Style.RESET_ALL}"
    if abs(value) < 0.1:
        color = Fore.GREEN
    elif abs(value) < 1.0:
        color = Fore.YELLOW
    else:
        color = Fore.RED
    return f"{color}{format_percentage(value)}{Style.RESET_ALL}"


def print_table(frame: pd.DataFrame) -> None:
    if frame.empty:
        print(f"{Style.DIM}(empty table){Style.RESET_ALL}")
        return
    with pd.option_context("display.max_rows", 200, "display.width", 160, "display.float_format", "{:.6f}".format):
        print(frame.to_string(index=False))


def parse_orbitals(text: Optional[str]) -> List[int]:
    """``"0,1"`` -> [0, 1]."""
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def parse_int_list(text: str) -> List[int]:
    return parse_orbitals(text)


def parse_methods(text: str) -> List[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown methods {unknown}; choose from {list(METHODS)}")
    return methods


def _add_problem_flags(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--fcidump", type=Path, required=required, help="FCIDUMP file")
    parser.add_argument("--freeze", type=parse_orbitals, default=[], help="Frozen orbitals, e.g. 0,1")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="TOML experiment config")
    parser.add_argument("--k", type=int, help="Measurement bases per step (default 5)")
    parser.add_argument("--shots", type=int, help="Shots per basis (default 10000)")
    parser.add_argument("--layers", type=int, help="LUCJ layers (default 1)")
    parser.add_argument("--max-iter", type=int, help="Cost evaluations (default 500)")
    parser.add_argument("--full-sector", action="store_true", help="Use the whole particle sector instead of samples")
    parser.add_argument("--output-dir", type=Path, help="Result directory (default $SQDOPT_OUTPUT_DIR or results/)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="terminal_app.py", description="SQDOpt simulation engine")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    parse_cmd = commands.add_parser("parse", help="Summarize a Hamiltonian")
    _add_problem_flags(parse_cmd)

    plan_cmd = commands.add_parser("plan", help="Measurement-group table")
    _add_problem_flags(plan_cmd)
    plan_cmd.add_argument("--k", type=int, default=5, help="Bases to mark as selected")
    plan_cmd.add_argument("--csv", type=Path, help="Write the table to CSV")

    optimize_cmd = commands.add_parser("optimize", help="Run a method")
    _add_problem_flags(optimize_cmd, required=False)
    _add_run_flags(optimize_cmd)
    optimize_cmd.add_argument("--method", choices=METHODS, default="sqdopt")
    optimize_cmd.add_argument("--seed", type=int, default=None, help="Master seed")
    optimize_cmd.add_argument("--seeds", type=parse_int_list, help="Several master seeds, e.g. 0,1,2")

    evaluate_cmd = commands.add_parser("evaluate", help="Energy of a stored parameter vector")
    evaluate_cmd.add_argument("--result", type=Path, required=True, help="Stored run JSON")
    evaluate_cmd.add_argument("--fcidump", type=Path, help="Override the fixture path")

    sweep_cmd = commands.add_parser("sweep", help="Bond-length sweep")
    sweep_cmd.add_argument("--fixtures", type=Path, nargs="*", default=[], help="FCIDUMP files")
    sweep_cmd.add_argument("--freeze", type=parse_orbitals, default=[])
    sweep_cmd.add_argument("--methods", type=parse_methods, default=["hf", "fci"])
    sweep_cmd.add_argument("--seeds", type=parse_int_list, default=[0])
    _add_run_flags(sweep_cmd)

    bench_cmd = commands.add_parser("benchmark", help="Runtime per optimization step")
    bench_cmd.add_argument("--fixtures", type=Path, nargs="*", default=[], help="FCIDUMP files")
    bench_cmd.add_argument("--freeze", type=parse_orbitals, default=[])
    bench_cmd.add_argument("--methods", type=parse_methods, default=["sqdopt", "vqe", "fci"])
    bench_cmd.add_argument("--iterations", type=int, default=10, help="Timed steps per method (at least 10)")
    bench_cmd.add_argument("--seed", type=int, default=0)
    _add_run_flags(bench_cmd)

    compare_cmd = commands.add_parser("compare", help="Merge stored results")
    compare_cmd.add_argument("paths", type=Path, nargs="+", help="Result JSON files or directories")
    compare_cmd.add_argument("--csv", type=Path, help="Write the merged table to CSV")
    return parser


def _run_template(args, fcidump: Optional[Path], method: str, seed: int) -> RunSpec:
    """RunSpec from a config file (when given) overridden by explicit flags."""
    values = {}
    if getattr(args, "config", None):
        config = load_experiment_config(args.config)
        values.update(
            frozen_orbitals=config.frozen_orbitals,
            k=config.k,
            shots=config.shots,
            full_sector=config.full_sector,
            ansatz=config.ansatz.model_dump(),
            optimizer=config.optimizer.model_dump(),
            sqd=config.sqd.model_dump(),
        )
        if fcidump is None:
            fcidump = config.fixtures[0]
    if fcidump is None:
        raise ConfigError("no FCIDUMP given: pass --fcidump or a config with fixtures")
    values.update(fcidump=fcidump, method=method, seed=seed)
    return _apply_flags(args, values)


def _apply_flags(args, values: dict) -> RunSpec:
    """Overlay explicit command-line flags on RunSpec settings."""
    if getattr(args, "freeze", None):
        values["frozen_orbitals"] = args.freeze
    for flag, key in (("k", "k"), ("shots", "shots")):
        if getattr(args, flag, None) is not None:
            values[key] = getattr(args, flag)
    if getattr(args, "full_sector", False):
        values["full_sector"] = True
    if getattr(args, "layers", None) is not None:
        values["ansatz"] = {**(values.get("ansatz") or {}), "layers": args.layers}
    if getattr(args, "max_iter", None) is not None:
        values["optimizer"] = {**(values.get("optimizer") or {}), "max_iter": args.max_iter}
    return build_run_spec(**values)


def _output_dir(args, config: Optional[ExperimentConfig] = None) -> Path:
    if getattr(args, "output_dir", None):
        return args.output_dir
    if config is not None:
        return config.resolved_output_dir()
    return default_output_dir()


def _require_file(path: Path) -> Path:
    if not Path(path).is_file():
        raise FileNotFoundError(f"file not found: {path}")
    return Path(path)


def cmd_parse(args) -> int:
    context = ProblemContext.from_fixture(_require_file(args.fcidump), args.freeze)
    h = context.hamiltonian
    headline(f"Hamiltonian {args.fcidump.name}")
    print(f"  Orbitals (active):  {Fore.CYAN}{h.n_orbitals}{Style.RESET_ALL}")
    print(f"  Electrons:          {h.n_electrons} ({h.n_alpha} alpha, {h.n_beta} beta)")
    print(f"  Qubits:             {Fore.CYAN}{h.n_qubits}{Style.RESET_ALL}")
    print(f"  Pauli terms:        {Fore.CYAN}{len(context.pauli)}{Style.RESET_ALL}")
    print(f"  Core energy:        {format_energy(h.core_energy)}")
    print(f"  Off-diagonal ratio: {context.offdiagonal_ratio():.4f}")
    return EXIT_OK


def cmd_plan(args) -> int:
    context = ProblemContext.from_fixture(_require_file(args.fcidump), args.freeze)
    table = planning_table(context.groups)
    selected = {g.basis.letters for g in select_groups(context.groups, args.k, context.pauli)}
    table["selected"] = table["basis"].isin(selected)
    headline(
        f"{len(context.groups)} measurement groups for {len(context.pauli)} Pauli terms "
        f"(off-diagonal ratio {context.offdiagonal_ratio():.4f})"
    )
    print_table(table)
    if args.csv:
        table.to_csv(args.csv, index=False)
        print(f"\n{Fore.GREEN}Wrote {args.csv}{Style.RESET_ALL}")
    return EXIT_OK


def print_result(result: RunResult) -> None:
    energy = format_energy(result.energy) if result.energy is not None else "n/a"
    print(
        f"  {Fore.YELLOW}{result.method:>12}{Style.RESET_ALL} seed {result.seed:<4} "
        f"E = {energy}  error {colorize_error(result.percent_error)}  "
        f"({result.evaluations} evaluations, {format_duration(result.wall_time)})"
    )
    if result.sqd_final_energy is not None:
        print(f"  {'':>12} standalone SQD {format_energy(result.sqd_final_energy)}")


def cmd_optimize(args) -> int:
    config = load_experiment_config(args.config) if args.config else None
    fcidump = args.fcidump
    if fcidump is not None:
        _require_file(fcidump)
    seeds = args.seeds or ([args.seed] if args.seed is not None else (config.seeds if config else [0]))
    specs = [_run_template(args, fcidump, args.method, seed) for seed in seeds]
    _require_file(specs[0].fcidump)
    store = ResultsStore(_output_dir(args, config))
    context = ProblemContext.from_fixture(specs[0].fcidump, specs[0].frozen_orbitals)
    headline(f"{args.method} on {specs[0].fcidump.name}, seeds {seeds}")
    results = []
    with store.locked():
        for spec in specs:
            result = run_method(spec, context)
            store.save_run(result)
            print_result(result)
            results.append(result)
        if len(results) > 1:
            stats = seed_statistics(results)
            store.save_table(stats, f"{molecule_label(specs[0].fcidump).lower()}_{args.method}_seeds",
                             config_hash=specs[0].config_hash())
            print()
            print_table(stats)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    record = load_run(_require_file(args.result))
    if not record.get("parameters"):
        raise ConfigError(f"{args.result} holds no parameter vector")
    spec_values = dict(record["spec"])
    if args.fcidump is not None:
        spec_values["fcidump"] = str(args.fcidump)
    spec = build_run_spec(**spec_values)
    _require_file(spec.fcidump)
    context = ProblemContext.from_fixture(spec.fcidump, spec.frozen_orbitals)
    values = evaluate_parameters(context, spec, np.asarray(record["parameters"], dtype=float))
    headline(f"Stored {record['method']} parameters on {Path(spec.fcidump).name}")
    print(f"  Energy:        {format_energy(values['energy'])}")
    if values["fci_energy"] is not None:
        print(f"  FCI energy:    {format_energy(values['fci_energy'])}")
    print(f"  Percent error: {colorize_error(values['percent_error'])}")
    return EXIT_OK


def _fixtures_and_config(args):
    config = load_experiment_config(args.config) if args.config else None
    fixtures = list(args.fixtures) or (list(config.fixtures) if config else [])
    for fixture in fixtures:
        _require_file(fixture)
    return fixtures, config


def cmd_sweep(args) -> int:
    fixtures, config = _fixtures_and_config(args)
    methods = args.methods if not config else config.methods
    seeds = args.seeds if not config else config.seeds
    store = ResultsStore(_output_dir(args, config))
    if not fixtures:
        headline("Bond sweep: no fixtures")
        print_table(pd.DataFrame())
        return EXIT_OK
    with store.locked():
        if config is not None and not args.fixtures:
            specs = [_apply_flags(args, spec.model_dump()) for spec in config.run_specs()]
            results = run_batch(specs)
            table, table_hash = sweep_table(results), config.config_hash()
        else:
            template = _run_template(args, fixtures[0], methods[0], seeds[0])
            table, results = bond_sweep(template, fixtures, methods, seeds)
            table_hash = template.config_hash()
        for result in results:
            store.save_run(result)
        store.save_table(table, "sweep", config_hash=table_hash)
    headline(f"Bond sweep over {len(fixtures)} fixtures")
    print_table(table)
    failed = [r for r in results if not r.ok]
    if failed:
        print(f"\n{Fore.RED}{len(failed)} runs failed (marked in the table){Style.RESET_ALL}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    fixtures, config = _fixtures_and_config(args)
    if args.iterations < 10:
        logger.warning(f"benchmark uses at least 10 steps; raising {args.iterations} to 10")
    iterations = max(args.iterations, 10, config.benchmark_iterations if config else 10)
    methods = args.methods if not config else config.methods
    store = ResultsStore(_output_dir(args, config))
    if not fixtures:
        headline("Benchmark: no fixtures")
        return EXIT_OK
    template = _run_template(args, fixtures[0], methods[0], args.seed)
    with store.locked():
        table = benchmark(template, fixtures, methods, iterations)
        store.save_table(table, "benchmark", config_hash=template.config_hash())
    headline(f"Median wall-clock per optimization step ({iterations} steps)")
    print_table(table)
    if table["total_procedure"].any():
        print(f"\n{Style.DIM}hf/fci rows time the entire procedure, not one step{Style.RESET_ALL}")
    return EXIT_OK


def cmd_compare(args) -> int:
    files: List[Path] = []
    for path in args.paths:
        if Path(path).is_dir():
            files.extend(sorted(Path(path).glob("*.json")))
        else:
            files.append(_require_file(path))
    records = load_run_files(files)
    ratios = {}
    for fixture in sorted({r["fixture"] for r in records}):
        if not Path(fixture).is_file():
            continue
        frozen = next(r.get("spec", {}).get("frozen_orbitals", []) for r in records if r["fixture"] == fixture)
        try:
            context = ProblemContext.from_fixture(fixture, frozen)
            ratios[(molecule_label(fixture), parse_bond_length(fixture))] = context.offdiagonal_ratio()
        except DegenerateHamiltonianError as exc:
            logger.warning(f"{fixture}: {exc}")
    table = compare_records(records, ratios)
    headline(f"Comparison of {len(records)} stored runs")
    print_table(table)
    if args.csv:
        table.to_csv(args.csv, index=False)
        print(f"\n{Fore.GREEN}Wrote {args.csv}{Style.RESET_ALL}")
    return EXIT_OK


COMMANDS = {
    "parse": cmd_parse,
    "plan": cmd_plan,
    "optimize": cmd_optimize,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "benchmark": cmd_benchmark,
    "compare": cmd_compare,
}


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        force=True,
    )


def exit_code_for(exc: BaseException) -> int:
    for types, code in EXIT_CODES:
        if isinstance(exc, types):
            return code
    return EXIT_UNEXPECTED


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name (sys.argv[1:] when None)

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_BAD_FLAGS
    configure_logging(args.verbose, args.quiet)
    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        print(f"\n\n{Fore.YELLOW}Interrupted by user{Style.RESET_ALL}")
        return EXIT_UNEXPECTED
    except Exception as exc:
        code = exit_code_for(exc)
        if code == EXIT_UNEXPECTED:
            logger.exception("Unexpected failure")
        print(f"{Fore.RED}Error: {exc}{Style.RESET_ALL}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(cli_main())
