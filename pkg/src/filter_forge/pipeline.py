"""End-to-end workflows shared by the CLI, the weight-design search and the
rate tables: embed a weight and a starting filter into the real-variable
objective, dispatch to the right minimizer, and unpack the result."""

from __future__ import annotations

import logging

import numpy as np

from .filters import FilterDomainError, RationalFilter, gauss_legendre_filter
from .loss import MIN_POLE_IMAG, SliseObjective, from_real, to_real
from .optimize import (
    BoxBounds,
    OptimizerConfig,
    OptimizerReport,
    bfgs_minimize,
    box_bfgs_minimize,
)
from .parallel import parallel_map
from .rates import worst_case_rate
from .weights import StepWeightFunction, builtin_weight

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_GAPS",
    "DEFAULT_POLE_PAIRS",
    "RATE_TABLE_FAMILIES",
    "optimize_filter",
    "rate_table",
]

# Gaps at or below the design gap of the enhanced weight (its low-weight
# band reaches ~1.04, so rates at gaps beyond ~0.96 measure the filter
# before its suppression band starts).
DEFAULT_GAPS = (0.85, 0.90, 0.95)
DEFAULT_POLE_PAIRS = (2, 3, 4, 5)
RATE_TABLE_FAMILIES = ("gauss-legendre", "gamma-slise", "enhanced-gamma-slise")


def optimize_filter(
    weight: StepWeightFunction,
    start: RationalFilter,
    lb: float | None = None,
    config: OptimizerConfig | None = None,
) -> tuple[RationalFilter, OptimizerReport]:
    """Minimize the weighted least-squares loss from ``start``.

    Without ``lb`` this is unconstrained BFGS; with ``lb`` the pole
    imaginary parts are box-constrained to ``Im(w) >= lb`` (the canonical
    quadrant makes that equivalent to ``|Im(w)| >= lb``).  A start whose
    poles sit below the bound by more than 0.1% relative is rejected with
    the offending pole named; smaller violations are clamped onto the
    bound, matching common bound-constrained solver behaviour.
    """
    obj = SliseObjective(weight, start.m)
    v0 = to_real(start.coeffs, start.poles)
    if lb is None:
        report = bfgs_minimize(obj.real_loss, obj.real_gradient, v0, config)
    else:
        if lb < MIN_POLE_IMAG:
            raise FilterDomainError(f"lower bound {lb} is below the pole-imag floor {MIN_POLE_IMAG}")
        gross = start.poles.imag < lb * (1.0 - 1e-3) - 1e-12
        if np.any(gross):
            k = int(np.flatnonzero(gross)[0])
            raise FilterDomainError(
                f"starting pole {k} has |Im| = {start.poles.imag[k]:.9g} below the bound lb = {lb:.9g}"
            )
        m = start.m
        lower = np.full(4 * m, -np.inf)
        lower[3 * m :] = lb
        report = box_bfgs_minimize(obj.real_loss, obj.real_gradient, v0,
                                   BoxBounds(lower, np.full(4 * m, np.inf)), config)
    beta, w = from_real(report.solution)
    return RationalFilter(w, beta), report


def _table_config(config: OptimizerConfig | None) -> OptimizerConfig:
    return config or OptimizerConfig(max_iterations=300, max_evaluations=2000)


def rate_table(
    gaps=DEFAULT_GAPS,
    pole_pairs=DEFAULT_POLE_PAIRS,
    families=RATE_TABLE_FAMILIES,
    config: OptimizerConfig | None = None,
) -> list[dict]:
    """Worst-case rates on a (gap x pole-count) grid for the three filter
    families: raw Gauss-Legendre plus the filters obtained by minimizing
    under the gamma and enhanced-gamma step weights from that start.

    Returns rows ``{"G", "poles", "filter", "worst_case_rate"}`` ordered
    gap-major, matching the published table layout.
    """
    cfg = _table_config(config)
    unknown = set(families) - set(RATE_TABLE_FAMILIES)
    if unknown:
        raise FilterDomainError(f"unknown rate-table families: {sorted(unknown)}")

    def build_family_filters(m: int) -> dict[str, RationalFilter]:
        gl = gauss_legendre_filter(m)
        out = {}
        if "gauss-legendre" in families:
            out["gauss-legendre"] = gl
        for name in ("gamma-slise", "enhanced-gamma-slise"):
            if name in families:
                filt, report = optimize_filter(builtin_weight(name), gl, config=cfg)
                logger.info("rate table: %s at m=%d -> loss %.3e (%s)",
                            name, m, report.final_loss, report.termination.value)
                out[name] = filt
        return out

    per_m = dict(zip(pole_pairs, parallel_map(build_family_filters, pole_pairs)))
    rows = []
    for G in gaps:
        for m in pole_pairs:
            for name in families:
                rows.append({
                    "G": float(G),
                    "poles": 4 * int(m),
                    "filter": name,
                    "worst_case_rate": worst_case_rate(per_m[m][name], G),
                })
    return rows
