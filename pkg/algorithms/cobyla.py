"""
Unconstrained linear-approximation trust-region minimizer (COBYLA core).

The steps come from scipy.optimize COBYLA: a simplex of n + 1 evaluated
points, the linear interpolant of the cost through them and a trust radius
rho that starts at rho_beg and ends at rho_end. Every cost evaluation is
traced and counts against max_iter.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union
import json
import logging
import math
import time

import numpy as np
import pandas as pd
from scipy.optimize import minimize as scipy_minimize

from utils.errors import OptimizationAbortedError

logger = logging.getLogger(__name__)

CostResult = Union[float, Tuple[float, Sequence[float]]]
CostFunction = Callable[[np.ndarray], CostResult]


@dataclass
class TraceRecord:
    """One cost evaluation."""

    iteration: int
    parameters: List[float]
    cost: float
    sub_energies: List[float] = field(default_factory=list)
    duration: float = 0.0


@dataclass
class OptimizationTrace:
    """Per-evaluation optimizer history, iteration indices contiguous from 0."""

    records: List[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def append(
        self, parameters: np.ndarray, cost: float, sub_energies: Sequence[float], duration: float
    ) -> TraceRecord:
        record = TraceRecord(
            iteration=len(self.records),
            parameters=[float(v) for v in parameters],
            cost=float(cost),
            sub_energies=[float(v) for v in sub_energies],
            duration=float(duration),
        )
        self.records.append(record)
        return record

    @property
    def costs(self) -> List[float]:
        return [r.cost for r in self.records]

    def best(self) -> Optional[TraceRecord]:
        finite = [r for r in self.records if math.isfinite(r.cost)]
        if not finite:
            return None
        return min(finite, key=lambda r: (r.cost, r.iteration))

    def best_so_far(self) -> List[float]:
        """Running minimum of the cost."""
        return list(np.minimum.accumulate(self.costs)) if self.records else []

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for r in self.records:
            row = {"iteration": r.iteration, "cost": r.cost, "duration": r.duration}
            row.update({f"sub_energy_{i}": v for i, v in enumerate(r.sub_energies)})
            row.update({f"x_{i}": v for i, v in enumerate(r.parameters)})
            rows.append(row)
        return pd.DataFrame(rows)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False)

    def to_json(self) -> str:
        return json.dumps([r.__dict__ for r in self.records])

    @classmethod
    def from_json(cls, text: str) -> "OptimizationTrace":
        return cls([TraceRecord(**item) for item in json.loads(text)])


class _BudgetExhausted(Exception):
    """Raised inside the cost wrapper once max_iter evaluations are spent."""


class LinearTrustRegionMinimizer:
    """
    Derivative-free minimizer using linear models on a simplex (scipy COBYLA).

    scipy keeps the n + 1 point simplex, accepts steps by their reduction
    ratio and moves the trust radius between rho_beg and rho_end. This class
    wraps the cost so every evaluation lands in an OptimizationTrace and the
    evaluation budget is exact.

    Args:
        max_iter: Maximum number of cost evaluations (simplex included)
        rho_beg: Initial trust radius
        rho_end: Final trust radius
        log_every: Log progress every this many evaluations
    """

    MAX_ITER = 500
    RHO_BEG = 0.1
    RHO_END = 1e-4

    def __init__(
        self,
        max_iter: int = MAX_ITER,
        rho_beg: float = RHO_BEG,
        rho_end: float = RHO_END,
        log_every: int = 50,
    ):
        if not 0 < rho_end <= rho_beg:
            raise ValueError(f"need 0 < rho_end <= rho_beg, got {rho_end}, {rho_beg}")
        if max_iter < 1:
            raise ValueError(f"max_iter must be positive, got {max_iter}")
        self.max_iter = max_iter
        self.rho_beg = rho_beg
        self.rho_end = rho_end
        self.log_every = log_every

    def minimize(self, cost: CostFunction, x0: Sequence[float]) -> Tuple[np.ndarray, OptimizationTrace]:
        """
        Minimize ``cost`` from ``x0``.

        Args:
            cost: Function returning a float or (float, sub_energies)
            x0: Starting point

        Returns:
            (best evaluated point, trace of every evaluation)

        Raises:
            OptimizationAbortedError: cost returned NaN or infinity
        """
        x0 = np.asarray(x0, dtype=float).copy()
        n = x0.shape[0]
        trace = OptimizationTrace()
        best = {"x": x0.copy(), "f": math.inf}

        def evaluate(x: np.ndarray) -> float:
            if len(trace) >= self.max_iter:
                raise _BudgetExhausted
            x = np.asarray(x, dtype=float).reshape(n).copy()
            start = time.perf_counter()
            result = cost(x.copy())
            if isinstance(result, tuple):
                value, sub_energies = result
            else:
                value, sub_energies = result, ()
            value = float(value)
            trace.append(x, value, sub_energies, time.perf_counter() - start)
            if not math.isfinite(value):
                raise OptimizationAbortedError(
                    f"cost returned {value} at evaluation {len(trace) - 1}", trace=trace
                )
            if value < best["f"]:
                best["x"], best["f"] = x.copy(), value
            if self.log_every and len(trace) % self.log_every == 0:
                logger.info(f"Evaluation {len(trace)}: cost {value:.10f}, best {best['f']:.10f}")
            return value

        if n == 0:
            evaluate(x0)
            return best["x"], trace

        # scipy wants room for the initial simplex; the wrapper enforces the real budget
        options = {"rhobeg": self.rho_beg, "tol": self.rho_end, "maxiter": max(self.max_iter, n + 2)}
        try:
            result = scipy_minimize(evaluate, x0, method="COBYLA", options=options)
            logger.debug(f"COBYLA stopped: {result.message}")
        except _BudgetExhausted:
            logger.debug(f"Evaluation budget of {self.max_iter} spent")

        logger.info(f"Minimizer finished: {len(trace)} evaluations, best cost {best['f']:.10f}")
        return best["x"], trace


def minimize(
    cost: CostFunction,
    x0: Sequence[float],
    max_iter: int = LinearTrustRegionMinimizer.MAX_ITER,
    rho_beg: float = LinearTrustRegionMinimizer.RHO_BEG,
    rho_end: float = LinearTrustRegionMinimizer.RHO_END,
) -> Tuple[np.ndarray, OptimizationTrace]:
    """
    Minimize a scalar (possibly noisy) cost without derivatives.

    Args:
        cost: Function of the parameter vector returning a float or (float, sub_energies)
        x0: Starting point
        max_iter: Maximum cost evaluations
        rho_beg: Initial trust radius
        rho_end: Final trust radius

    Returns:
        (best evaluated point, OptimizationTrace)
    """
    return LinearTrustRegionMinimizer(max_iter=max_iter, rho_beg=rho_beg, rho_end=rho_end).minimize(cost, x0)
