"""
Exception hierarchy for the SQDOpt simulation engine.

Library modules raise these; only the terminal entry point maps them to exit codes.
"""

from typing import Optional


class SqdOptError(Exception):
    """Base class for every error raised by this package."""


class FcidumpFormatError(SqdOptError):
    """Malformed FCIDUMP header or record."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ActiveSpaceError(SqdOptError):
    """Frozen-orbital list incompatible with the Hamiltonian."""


class BasisMismatchError(SqdOptError):
    """Measurement basis length differs from the qubit count."""


class CapacityError(SqdOptError):
    """Problem exceeds a hard size cap (statevector qubits, FCI determinants)."""


class DavidsonConvergenceError(SqdOptError):
    """Davidson iterations exhausted before the residual tolerance was met."""

    def __init__(self, best_residual: float, best_energy: float, iterations: int):
        self.best_residual = best_residual
        self.best_energy = best_energy
        self.iterations = iterations
        super().__init__(
            f"Davidson did not converge in {iterations} iterations "
            f"(best residual {best_residual:.3e}, energy {best_energy:.10f})"
        )


class RecoveryError(SqdOptError):
    """Configuration recovery cannot reach the requested particle sector."""


class OptimizationAbortedError(SqdOptError):
    """Cost function returned a non-finite value; carries the partial trace."""

    def __init__(self, message: str, trace=None):
        self.trace = trace
        super().__init__(message)


class ConfigError(SqdOptError):
    """Experiment configuration failed schema validation."""


class DegenerateHamiltonianError(SqdOptError):
    """Hamiltonian has no non-identity terms."""


class OutputLockedError(SqdOptError):
    """Another experiment process holds the output directory lock."""


class FixtureMismatchError(SqdOptError):
    """Stored results name the same fixture but were produced from different files."""
