"""Algorithmic design of step weights.

The parametric family has five heights ``v_1..v_5`` on the bands split at
``(w1, 1/w1, w2, w3)`` with the tail height ``v_5`` running from ``w3`` to
a fixed support cap of 10.  A candidate's figure of merit is the
worst-case convergence rate of the filter obtained by minimizing the
weighted least-squares loss under the realized weight from the
Gauss-Legendre start; the eight parameters are searched derivative-free
in a reparametrized space where every simplex point is feasible.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from .filters import FilterDomainError, gauss_legendre_filter
from .optimize import OptimizerConfig, OptimizerReport, Termination, nelder_mead
from .pipeline import optimize_filter
from .rates import worst_case_rate
from .weights import StepWeightFunction

logger = logging.getLogger(__name__)

__all__ = [
    "GAMMA_SLISE_PARAMETERS",
    "SUPPORT_CAP",
    "ParametricWeight",
    "design_weight",
    "realize",
    "weight_objective",
]

# Final breakpoint of the realized weight's tail segment, copied from the
# widest builtin weight.
SUPPORT_CAP = 10.0

_ZERO_HEIGHT_FLOOR = 1e-8


@dataclass(frozen=True, eq=False)
class ParametricWeight:
    """Eight-parameter step weight: heights ``v`` (five, non-negative) and
    band edges ``0 < w1 < 1 < 1/w1 < w2 < w3``."""

    heights: np.ndarray
    w1: float
    w2: float
    w3: float

    def __post_init__(self):
        v = np.asarray(self.heights, dtype=float)
        if v.shape != (5,):
            raise FilterDomainError(f"need exactly five heights, got shape {v.shape}")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise FilterDomainError("heights must be finite and non-negative")
        if not (0.0 < self.w1 < 1.0):
            raise FilterDomainError(f"w1 must lie in (0, 1), got {self.w1}")
        if not (1.0 / self.w1 < self.w2 < self.w3):
            raise FilterDomainError(
                f"need 1/w1 < w2 < w3, got 1/w1={1.0 / self.w1:.6g}, w2={self.w2}, w3={self.w3}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "heights", v)


GAMMA_SLISE_PARAMETERS = ParametricWeight(
    np.array([1.0, 0.01, 10.0, 20.0, 0.0]), 0.95, 1.4, 5.0
)


def realize(pw: ParametricWeight) -> StepWeightFunction:
    """Step weight with breakpoints ``(w1, 1/w1, w2, w3)`` and heights
    ``v1..v4``, plus the ``v5`` tail on ``(w3, 10)`` when ``w3 < 10``."""
    breakpoints = [pw.w1, 1.0 / pw.w1, pw.w2, pw.w3]
    values = list(pw.heights[:4])
    if pw.w3 < SUPPORT_CAP:
        breakpoints.append(SUPPORT_CAP)
        values.append(float(pw.heights[4]))
    return StepWeightFunction(np.array(breakpoints), np.array(values))


def weight_objective(
    pw: ParametricWeight,
    gap: float,
    m: int,
    inner_config: OptimizerConfig | None = None,
) -> float:
    """Worst-case rate of the filter the realized weight produces.

    Runs the full least-squares minimization from the degree-``4m``
    Gauss-Legendre start; any inner failure rejects the candidate with a
    +inf objective.
    """
    cfg = inner_config or OptimizerConfig(max_iterations=300, max_evaluations=2000)
    try:
        filt, _ = optimize_filter(realize(pw), gauss_legendre_filter(m), config=cfg)
        return worst_case_rate(filt, gap)
    except (FilterDomainError, ArithmeticError, np.linalg.LinAlgError) as exc:
        logger.warning("weight candidate rejected: %s", exc)
        return math.inf


def _to_vector(pw: ParametricWeight) -> np.ndarray:
    v = np.maximum(pw.heights, _ZERO_HEIGHT_FLOOR)
    if np.any(pw.heights < _ZERO_HEIGHT_FLOOR):
        logger.info("design start: zero heights floored at %g for the log reparametrization",
                    _ZERO_HEIGHT_FLOOR)
    return np.concatenate([
        np.log(v),
        [math.log(pw.w1 / (1.0 - pw.w1)),
         math.log(pw.w2 - 1.0 / pw.w1),
         math.log(pw.w3 - pw.w2)],
    ])


def _from_vector(u: np.ndarray) -> ParametricWeight:
    v = np.exp(u[:5])
    w1 = 1.0 / (1.0 + math.exp(-u[5]))
    w2 = 1.0 / w1 + math.exp(u[6])
    w3 = w2 + math.exp(u[7])
    return ParametricWeight(v, w1, w2, w3)


def design_weight(
    start: ParametricWeight,
    gap: float,
    m: int,
    budget: int,
    *,
    inner_config: OptimizerConfig | None = None,
    log_path=None,
) -> tuple[ParametricWeight, OptimizerReport]:
    """Minimize the weight objective over the eight parameters.

    The search runs Nelder-Mead in the reparametrized space
    ``(log v, logit w1, log(w2 - 1/w1), log(w3 - w2))`` so ordering
    feasibility is structural.  ``budget`` caps objective evaluations; a
    budget too small to evaluate the initial simplex returns the start
    unchanged.  Fully deterministic.
    """
    u0 = _to_vector(start)
    n = u0.size
    if budget < n + 2:
        if budget > 0:
            logger.info("design budget %d below the %d needed for the initial simplex", budget, n + 2)
        report = OptimizerReport(u0, math.inf, 0, 0, 0, Termination.MAX_EVAL)
        return start, report

    log_rows: list[list] = []

    def objective(u: np.ndarray) -> float:
        pw = _from_vector(u)
        value = weight_objective(pw, gap, m, inner_config)
        log_rows.append([len(log_rows) + 1, value, *pw.heights, pw.w1, pw.w2, pw.w3])
        return value

    simplex = np.tile(u0, (n + 1, 1))
    for i in range(n):
        simplex[i + 1, i] += 0.1 * abs(u0[i]) if u0[i] != 0.0 else 0.1

    cfg = OptimizerConfig(
        max_iterations=10 * budget,
        max_evaluations=budget,
        gradient_tolerance=1e-10,
    )
    report = nelder_mead(objective, u0, cfg, initial_simplex=simplex)
    if log_path is not None:
        with open(log_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["evaluation", "objective", "v1", "v2", "v3", "v4", "v5",
                             "w1", "w2", "w3"])
            for row in log_rows:
                writer.writerow([row[0]] + [repr(float(c)) for c in row[1:]])
    return _from_vector(report.solution), report
