"""Convergence-rate functionals for rational filters.

The worst-case rate of a filter with gap parameter ``G`` in (0, 1) is

    max |r(x)| over [1/G, inf)  /  min |r(x)| over [0, G],

the per-iteration error-reduction factor of filtered subspace iteration
when no eigenvalue falls in the excluded bands ``[-1/G, -G] u [G, 1/G]``.
The expected rate replaces the extrema by conditional expectations under
an eigenvalue density.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .filters import FilterDomainError, RationalFilter
from .loss import from_real, to_real
from .optimize import OptimizerConfig, OptimizerReport, nelder_mead

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_GAP",
    "EigenvalueDensity",
    "GapParameter",
    "expected_rate",
    "minimize_expected_rate",
    "predicted_iterations",
    "worst_case_rate",
]

# Moderate gap that works well in practice.
DEFAULT_GAP = 0.95


@dataclass(frozen=True)
class GapParameter:
    """Gap ``G`` in (0,1); the bands ``[-1/G,-G] u [G,1/G]`` are assumed
    free of eigenvalues."""

    value: float

    def __post_init__(self):
        if not (0.0 < self.value < 1.0):
            raise FilterDomainError(f"gap parameter must lie in (0, 1), got {self.value}")

    @property
    def inner_edge(self) -> float:
        return self.value

    @property
    def outer_edge(self) -> float:
        return 1.0 / self.value


def _as_gap(gap) -> float:
    if isinstance(gap, GapParameter):
        return gap.value
    return GapParameter(float(gap)).value


def _local_extrema(filt: RationalFilter, lo: float, hi: float, mode: str,
                   samples: int) -> tuple[float, float]:
    """Extremum of |r| over [lo, hi].

    Scans the sign of d|r|/dx = sign(r) * r' on a dense grid; every sign
    change brackets either a stationary point of r (refined on r') or a
    zero of r (refined on r itself, a kink minimum of |r|).  This catches
    narrow lobes adjacent to the domain edges that a value-pattern scan
    can step over.
    """
    x = np.linspace(lo, hi, samples)
    vals = filt.evaluate(x)
    slope = np.sign(vals) * filt.evaluate_derivative(x)
    candidates: list[float] = [lo, hi]
    candidates.extend(x[np.flatnonzero(slope == 0.0)].tolist())

    flips = np.flatnonzero(np.sign(slope[:-1]) * np.sign(slope[1:]) < 0.0)
    for i in flips:
        a, b = float(x[i]), float(x[i + 1])
        fn = filt.evaluate if vals[i] * vals[i + 1] < 0.0 else filt.evaluate_derivative
        fa, fb = fn(a), fn(b)
        if fa * fb < 0.0:
            candidates.append(brentq(fn, a, b, xtol=1e-14))
        else:
            # scalar re-evaluation can flip a near-zero sign seen on the
            # grid; the cell endpoints then already are the candidates
            candidates.extend((a, 0.5 * (a + b), b))
    # sampled extrema as safety seeds (multiple flips inside one cell)
    avals = np.abs(vals)
    candidates.append(float(x[np.argmax(avals)]))
    candidates.append(float(x[np.argmin(avals)]))

    cand_vals = np.abs(filt.evaluate(np.array(candidates)))
    k = int(np.argmax(cand_vals)) if mode == "max" else int(np.argmin(cand_vals))
    return float(cand_vals[k]), float(candidates[k])


def worst_case_rate(filt: RationalFilter, gap=DEFAULT_GAP, *, samples: int = 4096) -> float:
    """Worst-case convergence rate at the given gap.

    The interior minimum is located on ``[0, G]``; the exterior maximum on
    ``[1/G, X]`` with ``X`` grown from ``64/G`` until the analytic tail
    bound ``4 sum |b_i||w_i| / (X^2 - max|w|^2)`` certifies that nothing
    beyond ``X`` can exceed the scanned maximum.
    """
    G = _as_gap(gap)
    den, _ = _local_extrema(filt, 0.0, G, "min", samples)
    if den < 1e-300:
        raise FilterDomainError("filter vanishes inside the search region; rate is degenerate")

    tail_coeff = 4.0 * float(np.sum(np.abs(filt.coeffs) * np.abs(filt.poles)))
    wmax2 = float(np.max(np.abs(filt.poles)) ** 2)
    lo = 1.0 / G
    X = 64.0 / G
    scan = samples
    for _ in range(40):
        num, _ = _local_extrema(filt, lo, X, "max", scan)
        tail = tail_coeff / (X * X - wmax2)
        if tail <= num:
            return num / den
        X *= 2.0
        scan = min(2 * scan, 1 << 17)  # keep the per-unit scan density
    raise ArithmeticError("tail bound failed to certify the exterior maximum")


@dataclass(frozen=True)
class EigenvalueDensity:
    """Probability density of eigenvalues: a callback plus the radius
    beyond which it is treated as zero.  Normalization over the support is
    verified to 1e-6 by quadrature on construction."""

    density: Callable[[float], float]
    support_bound: float

    def __post_init__(self):
        if not self.support_bound > 0:
            raise FilterDomainError(f"support bound must be positive, got {self.support_bound}")
        mass, _ = quad(self.density, -self.support_bound, self.support_bound, limit=200)
        if abs(mass - 1.0) > 1e-6:
            raise FilterDomainError(f"density mass over the support is {mass:.8f}, not 1")

    @classmethod
    def uniform(cls, lo: float = -5.0, hi: float = 5.0) -> "EigenvalueDensity":
        if not lo < hi:
            raise FilterDomainError(f"invalid uniform range [{lo}, {hi}]")
        h = 1.0 / (hi - lo)

        def pdf(x: float) -> float:
            return h if lo <= x <= hi else 0.0

        return cls(pdf, max(abs(lo), abs(hi)))

    @classmethod
    def normal(cls, variance: float, support_bound: float | None = None) -> "EigenvalueDensity":
        if variance <= 0:
            raise FilterDomainError(f"variance must be positive, got {variance}")
        sigma = math.sqrt(variance)
        bound = 8.0 * sigma if support_bound is None else support_bound
        norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))

        def pdf(x: float) -> float:
            return norm * math.exp(-0.5 * (x / sigma) ** 2)

        return cls(pdf, bound)


def _sign_change_roots(filt: RationalFilter, lo: float, hi: float, samples: int = 4096) -> list[float]:
    x = np.linspace(lo, hi, samples)
    v = filt.evaluate(x)
    idx = np.flatnonzero(v[:-1] * v[1:] < 0.0)
    return [float(brentq(filt.evaluate, x[i], x[i + 1], xtol=1e-15)) for i in idx]


def _quad_panels(fn, edges: list[float]) -> float:
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            val, _ = quad(fn, a, b, epsabs=1e-12, epsrel=1e-10, limit=200)
            total += val
    return total


def expected_rate(filt: RationalFilter, density: EigenvalueDensity, gap=DEFAULT_GAP) -> float:
    """Expected convergence rate under the density: the factorized product

        (1 / (P_I P_O)) * int_I h/|r| * int_O |r| h

    with I = [-G, G] and O the exterior bands truncated at the density's
    support bound.  Quadrature panels split at sign changes of the filter;
    a filter zero inside I makes the inner integral divergent and the rate
    is reported as +inf with a diagnostic.
    """
    G = _as_gap(gap)
    S = density.support_bound
    lo_out = 1.0 / G
    h = density.density

    p_inner = _quad_panels(h, [-G, G])
    outer_ranges = [(-S, -lo_out), (lo_out, S)] if S > lo_out else []
    p_outer = sum(_quad_panels(h, [a, b]) for a, b in outer_ranges)
    if p_inner <= 0.0 or p_outer <= 0.0:
        raise FilterDomainError(
            f"density places no mass inside [-G, G] or outside [-1/G, 1/G] (G={G})"
        )

    inner_roots = _sign_change_roots(filt, -G, G)
    if inner_roots:
        logger.warning("filter vanishes at %s inside the search region; expected rate diverges",
                       [f"{r:.6g}" for r in inner_roots])
        return math.inf

    inner = _quad_panels(lambda x: h(x) / abs(filt.evaluate(x)), [-G, G])
    outer = 0.0
    for a, b in outer_ranges:
        roots = _sign_change_roots(filt, a, b)
        outer += _quad_panels(lambda x: abs(filt.evaluate(x)) * h(x), [a, *roots, b])
    return inner * outer / (p_inner * p_outer)


def minimize_expected_rate(
    density: EigenvalueDensity,
    gap,
    start: RationalFilter,
    config: OptimizerConfig | None = None,
) -> tuple[RationalFilter, OptimizerReport]:
    """Derivative-free reduction of the expected rate over the filter's
    real embedding.  Poles are kept away from the real axis by a log
    barrier that only activates below ``|Im w| = 1e-4``; the returned
    objective never exceeds the starting one.
    """
    G = _as_gap(gap)
    e0 = expected_rate(start, density, G)
    if not math.isfinite(e0):
        raise FilterDomainError("expected rate is not finite at the starting filter")
    barrier_edge = 1e-4

    def objective(v: np.ndarray) -> float:
        beta, w = from_real(v)
        aim = np.abs(w.imag)
        if np.any(aim < 1e-12):
            return math.inf
        try:
            e = expected_rate(RationalFilter(w, beta), density, G)
        except (FilterDomainError, ArithmeticError):
            return math.inf
        if not math.isfinite(e):
            return math.inf
        pen = np.log(barrier_edge / aim)
        return e + e0 * float(np.maximum(pen, 0.0).sum())

    cfg = config or OptimizerConfig(max_iterations=5000, max_evaluations=2000,
                                    gradient_tolerance=1e-10)
    report = nelder_mead(objective, to_real(start.coeffs, start.poles), cfg)
    beta, w = from_real(report.solution)
    filt = RationalFilter(w, beta)
    report.final_loss = expected_rate(filt, density, G)
    return filt, report


def predicted_iterations(rate: float, tolerance: float) -> int:
    """Iteration count needed to reduce the error below ``tolerance`` at a
    fixed per-iteration factor: ``ceil(log tol / log rate)``."""
    if not 0.0 < rate:
        raise FilterDomainError(f"rate must be positive, got {rate}")
    if rate >= 1.0:
        raise FilterDomainError(f"rate {rate} >= 1: the iteration does not converge")
    if not 0.0 < tolerance < 1.0:
        raise FilterDomainError(f"tolerance must lie in (0, 1), got {tolerance}")
    count = math.ceil(math.log(tolerance) / math.log(rate) - 1e-9)
    if count > 10_000:
        logger.warning("rate %.6g predicts %d iterations; effectively stagnant", rate, count)
    return max(count, 1)
