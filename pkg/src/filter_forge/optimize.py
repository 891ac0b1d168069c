"""Quasi-Newton minimization: Wolfe line search, BFGS with inverse-Hessian
updates, box-constrained BFGS (gradient projection + Cauchy point +
restricted subspace step), a quadratic-penalty wrapper for pointwise shape
constraints, and a derivative-free Nelder-Mead simplex."""

from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .filters import RationalFilter, rff_value
from .loss import (
    MIN_POLE_IMAG,
    SliseObjective,
    from_real,
    real_gradient_from_wirtinger,
    to_real,
)

logger = logging.getLogger(__name__)

__all__ = [
    "BoxBounds",
    "IterationRecord",
    "LineSearchResult",
    "OptimizationError",
    "OptimizerConfig",
    "OptimizerReport",
    "Termination",
    "bfgs_minimize",
    "bfgs_update",
    "box_bfgs_minimize",
    "cauchy_point",
    "nelder_mead",
    "project",
    "shape_constrained_minimize",
    "wolfe_line_search",
]


class OptimizationError(RuntimeError):
    """Raised for contract violations (non-descent directions, bad bounds)."""


class Termination(enum.Enum):
    GRADIENT_TOL = "gradient_tol"
    LOSS_TOL = "loss_tol"
    MAX_ITER = "max_iter"
    MAX_EVAL = "max_eval"
    LINE_SEARCH_FAIL = "line_search_fail"


@dataclass(frozen=True)
class OptimizerConfig:
    """Shared knobs for the minimizers.  Wolfe parameters must satisfy
    0 < c1 < c2 < 1; ``loss_tolerance`` of 0 disables the f-decrease test."""

    c1: float = 1e-4
    c2: float = 0.9
    max_iterations: int = 500
    max_evaluations: int = 20000
    gradient_tolerance: float = 1e-8
    loss_tolerance: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.c1 < self.c2 < 1.0):
            raise OptimizationError(f"need 0 < c1 < c2 < 1, got c1={self.c1}, c2={self.c2}")
        if self.max_iterations < 1 or self.max_evaluations < 1:
            raise OptimizationError("iteration/evaluation budgets must be positive")
        if self.gradient_tolerance <= 0 or self.loss_tolerance < 0:
            raise OptimizationError("invalid tolerances")


@dataclass
class IterationRecord:
    iteration: int
    loss: float
    grad_norm: float
    evaluations: int
    step_length: float = math.nan
    wolfe_ok: bool = True
    capped: bool = False
    update_skipped: bool = False
    point: np.ndarray | None = None  # accepted iterate (not serialized)


@dataclass
class OptimizerReport:
    solution: np.ndarray
    final_loss: float
    iterations: int
    loss_evaluations: int
    gradient_evaluations: int
    termination: Termination
    active_bounds: np.ndarray | None = None
    trace: list[IterationRecord] = field(default_factory=list)

    def write_trace(self, path) -> None:
        """Dump the per-iteration trace as CSV (iteration,loss,grad_norm,evaluations)."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "loss", "grad_norm", "evaluations"])
            for rec in self.trace:
                writer.writerow([rec.iteration, repr(rec.loss), repr(rec.grad_norm), rec.evaluations])


@dataclass(frozen=True)
class BoxBounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise OptimizationError(f"bound shape mismatch: {lo.shape} vs {hi.shape}")
        if np.any(lo > hi):
            raise OptimizationError("lower bound exceeds upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unbounded(cls, n: int) -> "BoxBounds":
        return cls(np.full(n, -np.inf), np.full(n, np.inf))


def project(x: np.ndarray, bounds: BoxBounds) -> np.ndarray:
    """Componentwise clamp onto the box."""
    x = np.asarray(x, dtype=float)
    if x.shape != bounds.lower.shape:
        raise OptimizationError(f"shape mismatch: x {x.shape}, bounds {bounds.lower.shape}")
    return np.minimum(np.maximum(x, bounds.lower), bounds.upper)


# ---------------------------------------------------------------------------
# Line search
# ---------------------------------------------------------------------------

@dataclass
class LineSearchResult:
    alpha: float
    value: float
    slope: float
    wolfe_ok: bool
    capped: bool = False


def _cubic_step(a, fa, ga, b, fb, gb):
    """Minimizer of the cubic Hermite interpolant on [a, b]; None if degenerate."""
    d1 = ga + gb - 3.0 * (fa - fb) / (a - b)
    disc = d1 * d1 - ga * gb
    if disc < 0.0 or not math.isfinite(disc):
        return None
    d2 = math.copysign(math.sqrt(disc), b - a)
    denom = gb - ga + 2.0 * d2
    if denom == 0.0:
        return None
    t = b - (b - a) * (gb + d2 - d1) / denom
    return t if math.isfinite(t) else None


def wolfe_line_search(
    phi,
    dphi,
    c1: float = 1e-4,
    c2: float = 0.9,
    *,
    f0: float | None = None,
    g0: float | None = None,
    initial_step: float = 1.0,
    max_step: float = math.inf,
    max_brackets: int = 100,
) -> LineSearchResult:
    """Bracket-and-zoom search for a step satisfying the two Wolfe conditions

        phi(a) <= phi(0) + c1 * a * phi'(0)      (sufficient decrease)
        phi'(a) >= c2 * phi'(0)                  (curvature)

    ``phi'(0)`` must be negative.  If ``max_step`` is finite and the
    curvature condition is unattainable below it, the best sufficient-
    decrease point at the cap is returned with ``wolfe_ok=False``.
    Raises OptimizationError when no sufficient-decrease point exists
    within the bracketing budget.
    """
    f0 = phi(0.0) if f0 is None else f0
    g0 = dphi(0.0) if g0 is None else g0
    if not g0 < 0.0:
        raise OptimizationError(f"line search needs a descent direction, slope {g0:.3e}")
    if not math.isfinite(f0):
        raise OptimizationError("line search started at a non-finite value")

    def armijo(a: float, fa: float) -> bool:
        return fa <= f0 + c1 * a * g0

    def zoom(lo, f_lo, g_lo, hi, f_hi, g_hi) -> LineSearchResult:
        # Invariant: armijo holds at lo, f_lo is the smallest such value seen,
        # and the slope at lo points toward hi.
        for _ in range(60):
            width = hi - lo
            if abs(width) <= 1e-14 * max(1.0, abs(lo)):
                return LineSearchResult(lo, f_lo, g_lo, wolfe_ok=False)
            a = None
            if g_hi is not None and math.isfinite(f_hi):
                a = _cubic_step(lo, f_lo, g_lo, hi, f_hi, g_hi)
            if a is None or not (min(lo, hi) < a < max(lo, hi)):
                a = lo + 0.5 * width
            # keep a safe distance from the bracket ends
            margin = 0.1 * abs(width)
            a = min(max(a, min(lo, hi) + margin), max(lo, hi) - margin)
            fa = phi(a)
            if not math.isfinite(fa) or not armijo(a, fa) or fa >= f_lo:
                hi, f_hi, g_hi = a, fa, None
                continue
            ga = dphi(a)
            if ga >= c2 * g0:
                return LineSearchResult(a, fa, ga, wolfe_ok=True)
            if ga * (hi - lo) >= 0.0:
                hi, f_hi, g_hi = lo, f_lo, g_lo
            lo, f_lo, g_lo = a, fa, ga
        return LineSearchResult(lo, f_lo, g_lo, wolfe_ok=False)

    a_prev, f_prev, g_prev = 0.0, f0, g0
    a = min(initial_step, max_step)
    for k in range(max_brackets):
        fa = phi(a)
        if not math.isfinite(fa) or not armijo(a, fa) or (k > 0 and fa >= f_prev):
            return zoom(a_prev, f_prev, g_prev, a, fa, None)
        ga = dphi(a)
        if ga >= c2 * g0:
            return LineSearchResult(a, fa, ga, wolfe_ok=True)
        if a >= max_step * (1.0 - 1e-12):
            # Sufficient decrease holds but the step is capped by the box.
            return LineSearchResult(a, fa, ga, wolfe_ok=False, capped=True)
        a_prev, f_prev, g_prev = a, fa, ga
        a = min(2.0 * a, max_step)
    raise OptimizationError(f"line search exhausted {max_brackets} bracketing steps")


# ---------------------------------------------------------------------------
# BFGS
# ---------------------------------------------------------------------------

def bfgs_update(H: np.ndarray, s: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Inverse-Hessian update

        H' = (I - s y^T / y^T s) H (I - y s^T / y^T s) + s s^T / y^T s.

    Preserves symmetric positive-definiteness when ``y^T s > 0``; a
    curvature violation leaves ``H`` unchanged (logged).
    """
    ys = float(y @ s)
    if ys <= 0.0:
        logger.warning("BFGS update skipped: curvature y^T s = %.3e <= 0", ys)
        return H
    rho = 1.0 / ys
    V = np.eye(H.shape[0]) - rho * np.outer(s, y)
    Hn = V @ H @ V.T + rho * np.outer(s, s)
    return 0.5 * (Hn + Hn.T)


class _Counted:
    """Call counter around loss/gradient callbacks."""

    def __init__(self, fn):
        self.fn = fn
        self.count = 0

    def __call__(self, x):
        self.count += 1
        return self.fn(x)


def bfgs_minimize(loss, grad, x0, config: OptimizerConfig | None = None) -> OptimizerReport:
    """Unconstrained BFGS from ``x0`` with H0 = identity and Wolfe steps.

    The iterate sequence is strictly decreasing in loss; termination is by
    projected-gradient tolerance, loss-decrease tolerance (if enabled),
    budgets, or line-search failure (best iterate returned).
    """
    cfg = config or OptimizerConfig()
    f_fn, g_fn = _Counted(loss), _Counted(grad)
    x = np.asarray(x0, dtype=float).copy()
    n = x.size
    H = np.eye(n)
    f = f_fn(x)
    if not math.isfinite(f):
        raise OptimizationError("loss is not finite at the starting point")
    g = g_fn(x)
    trace: list[IterationRecord] = []
    termination = Termination.MAX_ITER

    it = 0
    while it < cfg.max_iterations:
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= cfg.gradient_tolerance:
            termination = Termination.GRADIENT_TOL
            break
        if f_fn.count >= cfg.max_evaluations:
            termination = Termination.MAX_EVAL
            break
        p = -H @ g
        slope = float(g @ p)
        if slope >= 0.0:
            logger.warning("resetting H: model direction is not a descent direction")
            H = np.eye(n)
            p = -g
            slope = -float(g @ g)
        phi = lambda a: f_fn(x + a * p)
        dphi = lambda a: float(g_fn(x + a * p) @ p)
        try:
            ls = wolfe_line_search(phi, dphi, cfg.c1, cfg.c2, f0=f, g0=slope)
        except OptimizationError:
            termination = Termination.LINE_SEARCH_FAIL
            break
        if not ls.wolfe_ok:
            # Accept only full Wolfe steps; an Armijo-only zoom fallback means
            # the search has hit the numerical floor.
            termination = Termination.LINE_SEARCH_FAIL
            break
        it += 1
        x_new = x + ls.alpha * p
        f_new = ls.value
        g_new = g_fn(x_new)
        s = x_new - x
        y = g_new - g
        skipped = float(y @ s) <= 0.0
        if not skipped:
            H = bfgs_update(H, s, y)
        trace.append(
            IterationRecord(it, f_new, float(np.max(np.abs(g_new))), f_fn.count,
                            ls.alpha, ls.wolfe_ok, ls.capped, skipped, x_new.copy())
        )
        decrease = f - f_new
        x, f, g = x_new, f_new, g_new
        if cfg.loss_tolerance > 0.0 and decrease <= cfg.loss_tolerance:
            termination = Termination.LOSS_TOL
            break
    return OptimizerReport(x, f, it, f_fn.count, g_fn.count, termination, None, trace)


# ---------------------------------------------------------------------------
# Box-constrained BFGS
# ---------------------------------------------------------------------------

def cauchy_point(hessian: np.ndarray, x: np.ndarray, gradient: np.ndarray,
                 bounds: BoxBounds) -> tuple[np.ndarray, np.ndarray]:
    """First local minimizer of the quadratic model

        q(z) = g^T (z - x) + 1/2 (z - x)^T B (z - x)

    along the projected steepest-descent path ``P(x - t g)``, computed
    analytically segment by segment.  Returns the point and a mask of
    components sitting at a bound there.
    """
    B = np.asarray(hessian, dtype=float)
    x = np.asarray(x, dtype=float)
    g = np.asarray(gradient, dtype=float)
    lo, hi = bounds.lower, bounds.upper
    n = x.size
    d = -g.copy()

    t_break = np.full(n, np.inf)
    up = d > 0
    t_break[up] = (hi[up] - x[up]) / d[up]
    down = d < 0
    t_break[down] = (lo[down] - x[down]) / d[down]

    z = x.copy()
    # Components at a bound with the path pointing outward never move.
    frozen = t_break <= 0.0
    d[frozen] = 0.0
    if not np.any(d):
        at_bound = (z <= lo) | (z >= hi)
        return z, at_bound

    events = np.unique(t_break[(t_break > 0.0) & np.isfinite(t_break)])
    t_cur = 0.0
    for t_next in np.append(events, np.inf):
        f1 = float(g @ d + (z - x) @ (B @ d))
        f2 = float(d @ (B @ d))
        if f1 >= 0.0:
            break
        if f2 > 0.0:
            dt = -f1 / f2
            if t_cur + dt < t_next:
                z = z + dt * d
                break
        if not math.isfinite(t_next):
            # SPD model cannot be unbounded along a fixed direction.
            raise OptimizationError("quadratic model unbounded along projected path")
        # advance to the breakpoint and clamp the components that hit it
        z = z + (t_next - t_cur) * d
        hit = (t_break == t_next) & (d != 0.0)
        z[hit & up] = hi[hit & up]
        z[hit & down] = lo[hit & down]
        d[hit] = 0.0
        t_cur = t_next
        if not np.any(d):
            break
    z = project(z, bounds)
    at_bound = (z <= lo) | (z >= hi)
    return z, at_bound


def _check_start_feasible(x0: np.ndarray, bounds: BoxBounds) -> np.ndarray:
    """Clamp near-feasible starts onto the box (mirroring the behaviour of
    reference bound-constrained solvers); reject gross violations."""
    lo, hi = bounds.lower, bounds.upper
    viol = np.maximum(lo - x0, x0 - hi)
    viol = np.maximum(viol, 0.0)
    if np.any(viol > 0.0):
        scale = np.where(np.isfinite(lo) & (x0 < lo), np.abs(lo), np.abs(hi))
        allowed = 1e-12 + 1e-3 * np.maximum(scale, 1e-9)
        bad = viol > allowed
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise OptimizationError(
                f"starting point infeasible: component {k} = {x0[k]:.9g} "
                f"violates [{lo[k]:.9g}, {hi[k]:.9g}]"
            )
        logger.info("clamped %d start component(s) onto the box (max violation %.2e)",
                    int(np.count_nonzero(viol > 0)), float(viol.max()))
        return project(x0, bounds)
    return x0


def box_bfgs_minimize(loss, grad, x0, bounds: BoxBounds,
                      config: OptimizerConfig | None = None) -> OptimizerReport:
    """Projected quasi-Newton minimization over a box.

    Per iteration: build the quadratic model from the maintained Hessian
    approximation, walk the projected-gradient path to its Cauchy point,
    minimize the model over the free variables, project, and take a Wolfe
    step along the resulting direction (step capped at the box).  All
    iterates are feasible (clamped exactly).
    """
    cfg = config or OptimizerConfig()
    f_fn, g_fn = _Counted(loss), _Counted(grad)
    x = _check_start_feasible(np.asarray(x0, dtype=float).copy(), bounds)
    n = x.size
    H = np.eye(n)
    B = np.eye(n)  # direct Hessian approximation, kept in sync with H
    f = f_fn(x)
    if not math.isfinite(f):
        raise OptimizationError("loss is not finite at the starting point")
    g = g_fn(x)
    trace: list[IterationRecord] = []
    termination = Termination.MAX_ITER

    it = 0
    while it < cfg.max_iterations:
        pg = x - project(x - g, bounds)
        if float(np.max(np.abs(pg))) <= cfg.gradient_tolerance:
            termination = Termination.GRADIENT_TOL
            break
        if f_fn.count >= cfg.max_evaluations:
            termination = Termination.MAX_EVAL
            break
        xc, fixed = cauchy_point(B, x, g, bounds)
        free = ~fixed
        d = np.zeros(n)
        if np.any(free):
            model_grad = g + B @ (xc - x)
            try:
                d[free] = np.linalg.solve(B[np.ix_(free, free)], -model_grad[free])
            except np.linalg.LinAlgError:
                d[free] = -model_grad[free]
        p = project(xc + d, bounds) - x
        if float(g @ p) >= 0.0 or not np.any(p):
            p = xc - x  # fall back to the pure Cauchy step
            if float(g @ p) >= 0.0 or not np.any(p):
                termination = Termination.GRADIENT_TOL
                break
        # largest feasible step along p
        with np.errstate(divide="ignore", invalid="ignore"):
            steps_hi = np.where(p > 0, (bounds.upper - x) / p, np.inf)
            steps_lo = np.where(p < 0, (bounds.lower - x) / p, np.inf)
        alpha_max = float(min(np.min(steps_hi), np.min(steps_lo)))
        alpha_max = max(alpha_max, 1.0)  # x + p is feasible by construction

        phi = lambda a: f_fn(project(x + a * p, bounds))
        dphi = lambda a: float(g_fn(project(x + a * p, bounds)) @ p)
        slope = float(g @ p)
        try:
            ls = wolfe_line_search(phi, dphi, cfg.c1, cfg.c2, f0=f, g0=slope,
                                   initial_step=min(1.0, alpha_max), max_step=alpha_max)
        except OptimizationError:
            termination = Termination.LINE_SEARCH_FAIL
            break
        if not ls.wolfe_ok and not ls.capped:
            termination = Termination.LINE_SEARCH_FAIL
            break
        it += 1
        x_new = project(x + ls.alpha * p, bounds)
        f_new = ls.value
        g_new = g_fn(x_new)
        s = x_new - x
        y = g_new - g
        ys = float(y @ s)
        sBs = float(s @ (B @ s))
        skipped = ys <= 0.0 or sBs <= 0.0
        if not skipped:
            H = bfgs_update(H, s, y)
            Bs = B @ s
            B = B - np.outer(Bs, Bs) / sBs + np.outer(y, y) / ys
            B = 0.5 * (B + B.T)
        trace.append(
            IterationRecord(it, f_new, float(np.max(np.abs(x_new - project(x_new - g_new, bounds)))),
                            f_fn.count, ls.alpha, ls.wolfe_ok, ls.capped, skipped, x_new.copy())
        )
        decrease = f - f_new
        x, f, g = x_new, f_new, g_new
        if cfg.loss_tolerance > 0.0 and decrease <= cfg.loss_tolerance:
            termination = Termination.LOSS_TOL
            break
    active = (x <= bounds.lower) | (x >= bounds.upper)
    return OptimizerReport(x, f, it, f_fn.count, g_fn.count, termination, active, trace)


# ---------------------------------------------------------------------------
# Shape-constrained minimization (quadratic penalty)
# ---------------------------------------------------------------------------

def shape_constrained_minimize(
    objective: SliseObjective,
    start: RationalFilter,
    points,
    c: float,
    config: OptimizerConfig | None = None,
) -> tuple[RationalFilter, OptimizerReport]:
    """Minimize the weighted least-squares loss subject to pointwise caps
    ``|r(x_i)| <= (1 + c) |r_start(x_i)|`` at evaluation points ``x_i > 1``.

    The two one-sided constraints ``+-r(x_i) <= C_i`` are enforced by a
    quadratic penalty whose factor grows tenfold per outer round (at most
    eight rounds); the returned filter satisfies every cap within 1e-8.
    """
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        v0 = to_real(start.coeffs, start.poles)
        report = bfgs_minimize(objective.real_loss, objective.real_gradient, v0, config)
        beta, w = from_real(report.solution)
        return RationalFilter(w, beta), report
    if np.any(points <= 1.0) or np.any(np.diff(points) <= 0):
        raise OptimizationError("evaluation points must satisfy 1 < x_1 < ... < x_k")
    if not (0.0 < c < 1.0):
        raise OptimizationError(f"deviation control c must lie in (0, 1), got {c}")

    caps = (1.0 + c) * np.abs(start.evaluate(points))
    v0 = to_real(start.coeffs, start.poles)
    assert np.all(np.abs(start.evaluate(points)) <= caps + 1e-12), "start violates its own caps"

    m = start.m
    floor = max(MIN_POLE_IMAG, 1e-8)
    lower = np.full(4 * m, -np.inf)
    lower[3 * m :] = floor  # canonical poles keep Im(w) >= floor
    bounds = BoxBounds(lower, np.full(4 * m, np.inf))

    def penalized(rho):
        def pen_loss(v):
            base = objective.real_loss(v)
            if not math.isfinite(base):
                return base
            beta, w = from_real(v)
            r = rff_value(beta, w, points)
            over = np.maximum(0.0, r - caps)
            under = np.maximum(0.0, -r - caps)
            return base + rho * float(over @ over + under @ under)

        def pen_grad(v):
            base = objective.real_gradient(v)
            beta, w = from_real(v)
            r = rff_value(beta, w, points)
            over = np.maximum(0.0, r - caps)
            under = np.maximum(0.0, -r - caps)
            coeffs = 2.0 * rho * (over - under)
            if np.any(coeffs):
                for ci, xi in zip(coeffs, points):
                    if ci != 0.0:
                        base = base + ci * _rff_real_parameter_gradient(beta, w, xi)
            return base

        return pen_loss, pen_grad

    rho = 10.0
    v = v0
    total_f = total_g = total_it = 0
    report = None
    for _ in range(8):
        pen_loss, pen_grad = penalized(rho)
        report = box_bfgs_minimize(pen_loss, pen_grad, v, bounds, config)
        total_f += report.loss_evaluations
        total_g += report.gradient_evaluations
        total_it += report.iterations
        v = report.solution
        beta, w = from_real(v)
        if np.all(np.abs(rff_value(beta, w, points)) <= caps + 1e-8):
            break
        rho *= 10.0
    beta, w = from_real(v)
    filt = RationalFilter(w, beta)
    final = OptimizerReport(v, objective.real_loss(v), total_it, total_f, total_g,
                            report.termination, report.active_bounds, report.trace)
    return filt, final


def _rff_real_parameter_gradient(beta: np.ndarray, w: np.ndarray, x: float) -> np.ndarray:
    """Real-embedded gradient of the filter value r(x) at one point."""
    db = 1.0 / (x - w) - 1.0 / (x + w)
    dw = beta * (1.0 / (x - w) ** 2 + 1.0 / (x + w) ** 2)
    return np.concatenate([real_gradient_from_wirtinger(db), real_gradient_from_wirtinger(dw)])


# ---------------------------------------------------------------------------
# Nelder-Mead
# ---------------------------------------------------------------------------

def nelder_mead(
    f,
    x0,
    config: OptimizerConfig | None = None,
    *,
    initial_simplex: np.ndarray | None = None,
) -> OptimizerReport:
    """Reflect/expand/contract/shrink simplex search with coefficients
    (1, 2, 0.5, 0.5).

    Terminates when the simplex diameter drops below
    ``config.gradient_tolerance`` (reported as GRADIENT_TOL), when the
    value spread drops below ``config.loss_tolerance`` if that is enabled,
    or on budget exhaustion.  The trace's grad_norm column carries the
    simplex diameter.
    """
    cfg = config or OptimizerConfig()
    f_fn = _Counted(f)
    x0 = np.asarray(x0, dtype=float).copy()
    n = x0.size
    if initial_simplex is not None:
        simplex = np.asarray(initial_simplex, dtype=float).copy()
        if simplex.shape != (n + 1, n):
            raise OptimizationError(f"initial simplex must be {(n + 1, n)}, got {simplex.shape}")
    else:
        simplex = np.tile(x0, (n + 1, 1))
        for i in range(n):
            step = 0.05 * abs(x0[i]) if x0[i] != 0.0 else 0.00025
            simplex[i + 1, i] += step
    values = np.array([f_fn(v) for v in simplex])
    if not math.isfinite(values[0]):
        raise OptimizationError("objective is not finite at the starting point")

    trace: list[IterationRecord] = []
    termination = Termination.MAX_ITER
    it = 0
    while it < cfg.max_iterations:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        diameter = float(np.max(np.abs(simplex[1:] - simplex[0])))
        spread = float(values[-1] - values[0])
        if diameter <= cfg.gradient_tolerance:
            termination = Termination.GRADIENT_TOL
            break
        if cfg.loss_tolerance > 0.0 and math.isfinite(spread) and spread <= cfg.loss_tolerance:
            termination = Termination.LOSS_TOL
            break
        if f_fn.count >= cfg.max_evaluations:
            termination = Termination.MAX_EVAL
            break
        it += 1
        centroid = simplex[:-1].mean(axis=0)
        xr = centroid + (centroid - simplex[-1])
        fr = f_fn(xr)
        if fr < values[0]:
            xe = centroid + 2.0 * (centroid - simplex[-1])
            fe = f_fn(xe)
            simplex[-1], values[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        else:
            if fr < values[-1]:
                xc = centroid + 0.5 * (xr - centroid)
                fc = f_fn(xc)
                accept = fc <= fr
            else:
                xc = centroid + 0.5 * (simplex[-1] - centroid)
                fc = f_fn(xc)
                accept = fc < values[-1]
            if accept:
                simplex[-1], values[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    values[i] = f_fn(simplex[i])
        trace.append(IterationRecord(it, float(np.min(values)), diameter, f_fn.count))

    best = int(np.argmin(values))
    return OptimizerReport(simplex[best].copy(), float(values[best]), it,
                           f_fn.count, 0, termination, None, trace)
