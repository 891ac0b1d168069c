"""Weighted least-squares objective for fitting a rational filter to the
indicator of ``(-1, 1)``.

For a step weight ``G`` the objective is

    f(beta, w) = 1/2 * integral  G(x) * (ind(x) - r(x))^2  dx      over R,

where ``r`` is the four-term symmetric filter built from ``(beta, w)``.
The 1/2 makes the value match the residual convention of the published
reference filters (the integrand is even, so this equals the integral
over the positive half-line).

Because ``G`` is piecewise constant the integral has a closed form: every
term reduces to per-pole antiderivative accumulators

    G_i = int G/(x - z_i) dx         (complex log per weight piece)
    P_i = int G/(x - z_i)^2 dx
    Q_i = int G/(x - z_i)^3 dx

over the expanded pole set ``z = (w, conj w, -w, -conj w)`` with matching
coefficients ``alpha = (beta, conj beta, -beta, -conj beta)``.  Pairwise
integrals follow by partial fractions,

    int G/((x-a)(x-b)) dx = (G_a - G_b)/(a - b),

with the confluent limit ``P_a`` when ``|a-b|`` is below 1e-12.  The
analytic gradient is derived the same way (Wirtinger derivatives in
``beta`` and ``w``); ``loss_quadrature`` provides an independent adaptive
quadrature oracle for both.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from .filters import FilterDomainError, rff_value
from .weights import StepWeightFunction

__all__ = [
    "MIN_POLE_IMAG",
    "SliseObjective",
    "from_real",
    "real_gradient_from_wirtinger",
    "to_real",
]

# Poles closer to the real axis make the log-based antiderivatives
# ill-conditioned; reject them outright.
MIN_POLE_IMAG = 1e-10

_CONFLUENT_TOL = 1e-12


def to_real(beta: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Pack complex parameters as ``[Re b, Im b, Re w, Im w]``."""
    beta = np.asarray(beta, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if beta.shape != w.shape or beta.ndim != 1:
        raise FilterDomainError(f"shape mismatch: beta {beta.shape}, w {w.shape}")
    return np.concatenate([beta.real, beta.imag, w.real, w.imag])


def from_real(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unpack ``[Re b, Im b, Re w, Im w]`` into complex ``(beta, w)``."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size % 4 != 0:
        raise FilterDomainError(f"real parameter vector length {v.size} not divisible by 4")
    m = v.size // 4
    beta = v[0:m] + 1j * v[m : 2 * m]
    w = v[2 * m : 3 * m] + 1j * v[3 * m : 4 * m]
    return beta, w


def real_gradient_from_wirtinger(grad: np.ndarray) -> np.ndarray:
    """Real-embedded gradient ``(d/dRe, d/dIm)`` of a real-valued function
    from its Wirtinger derivative: ``2 conj(grad)`` split into slots."""
    g2 = 2.0 * np.conj(np.asarray(grad, dtype=complex))
    return np.concatenate([g2.real, g2.imag])


class SliseObjective:
    """Closed-form loss/gradient for one step weight and filter degree ``4m``."""

    def __init__(self, weight: StepWeightFunction, m: int):
        if m < 1:
            raise FilterDomainError(f"pole-pair count must be >= 1, got {m}")
        self.weight = weight
        self.m = int(m)

        pieces = weight.segments()
        # Full-line edges/values (weight mirrored to the negative half-line).
        lo = [(-hi, -low, v) for (low, hi, v) in reversed(pieces)]
        cells = lo + pieces
        self._edges = np.array([c[0] for c in cells] + [cells[-1][1]])
        self._vals = np.array([c[2] for c in cells])
        # Same cells clipped to the indicator's support (-1, 1); they may be
        # non-contiguous when the weight support stops short of 1.
        self._ind_cells = [
            (max(a, -1.0), min(b, 1.0), v) for (a, b, v) in cells if a < 1.0 and b > -1.0
        ]
        self.constant_term = 0.5 * sum(v * (b - a) for a, b, v in self._ind_cells)

    @property
    def n_variables(self) -> int:
        return 4 * self.m

    # -- parameter plumbing -------------------------------------------------

    def _check(self, beta, w) -> tuple[np.ndarray, np.ndarray]:
        beta = np.asarray(beta, dtype=complex)
        w = np.asarray(w, dtype=complex)
        if beta.shape != (self.m,) or w.shape != (self.m,):
            raise FilterDomainError(
                f"expected {self.m} coefficients and poles, got {beta.shape}/{w.shape}"
            )
        if np.any(np.abs(w.imag) < MIN_POLE_IMAG):
            raise FilterDomainError(
                f"pole too close to the real axis: min |Im w| = {np.min(np.abs(w.imag)):.3e}"
            )
        return beta, w

    @staticmethod
    def _expand(beta: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        alpha = np.concatenate([beta, np.conj(beta), -beta, -np.conj(beta)])
        z = np.concatenate([w, np.conj(w), -w, -np.conj(w)])
        return alpha, z

    # -- accumulators ---------------------------------------------------------

    def _pole_integrals(self, z: np.ndarray, edges: np.ndarray, vals: np.ndarray, third: bool):
        d = edges[None, :] - z[:, None]
        g = (vals * np.diff(np.log(d), axis=1)).sum(axis=1)
        inv = 1.0 / d
        p = -(vals * np.diff(inv, axis=1)).sum(axis=1)
        q = -(0.5 * vals * np.diff(inv * inv, axis=1)).sum(axis=1) if third else None
        return g, p, q

    def _pair_matrices(self, z: np.ndarray, need_gradient: bool):
        g, p, q = self._pole_integrals(z, self._edges, self._vals, third=need_gradient)
        dz = z[:, None] - z[None, :]
        small = np.abs(dz) < _CONFLUENT_TOL
        dzs = np.where(small, 1.0, dz)
        pair = (g[:, None] - g[None, :]) / dzs
        pair = np.where(small, p[:, None], pair)
        grad_pair = None
        if need_gradient:
            # int G / ((x - z_i)(x - z_j)^2) dx
            grad_pair = (g[:, None] - g[None, :]) / dzs**2 - p[None, :] / dzs
            grad_pair = np.where(small, q[:, None], grad_pair)
        return pair, grad_pair

    def _indicator_integrals(self, z: np.ndarray, need_gradient: bool):
        g = np.zeros(z.shape, dtype=complex)
        p = np.zeros(z.shape, dtype=complex)
        for a, b, v in self._ind_cells:
            da = a - z
            db = b - z
            g += v * (np.log(db) - np.log(da))
            if need_gradient:
                p += v * (1.0 / da - 1.0 / db)
        return g, p

    # -- closed form ----------------------------------------------------------

    def loss(self, beta, w) -> float:
        """Closed-form objective value (non-negative up to rounding)."""
        beta, w = self._check(beta, w)
        alpha, z = self._expand(beta, w)
        pair, _ = self._pair_matrices(z, need_gradient=False)
        g1, _ = self._indicator_integrals(z, need_gradient=False)
        value = self.constant_term - (alpha * g1).sum() + 0.5 * alpha @ pair @ alpha
        return self._as_real_loss(value)

    def gradient(self, beta, w) -> tuple[np.ndarray, np.ndarray]:
        """Wirtinger gradients ``(df/dbeta, df/dw)`` of the closed form."""
        return self.loss_and_gradient(beta, w)[1:]

    def loss_and_gradient(self, beta, w) -> tuple[float, np.ndarray, np.ndarray]:
        beta, w = self._check(beta, w)
        alpha, z = self._expand(beta, w)
        pair, grad_pair = self._pair_matrices(z, need_gradient=True)
        g1, p1 = self._indicator_integrals(z, need_gradient=True)

        value = self.constant_term - (alpha * g1).sum() + 0.5 * alpha @ pair @ alpha

        m = self.m
        b1 = slice(0, m)          # block of poles  w
        b3 = slice(2 * m, 3 * m)  # block of poles -w
        pair_alpha = pair @ alpha
        grad_beta = -(g1[b1] - g1[b3]) + (pair_alpha[b1] - pair_alpha[b3])
        alpha_grad = alpha @ grad_pair  # alpha_grad[i] = sum_j alpha_j int G/((x-z_j)(x-z_i)^2)
        grad_w = beta * (-(p1[b1] + p1[b3]) + alpha_grad[b1] + alpha_grad[b3])
        return self._as_real_loss(value), grad_beta, grad_w

    @staticmethod
    def _as_real_loss(value: complex) -> float:
        re, im = float(np.real(value)), float(np.imag(value))
        if abs(im) > 1e-10 * (1.0 + abs(re)):
            raise ArithmeticError(f"loss has non-rounding imaginary part {im:.3e}")
        if re < -1e-12:
            raise ArithmeticError(f"loss evaluated to {re:.3e} < 0")
        return max(re, 0.0)

    # -- quadrature oracle ------------------------------------------------------

    def loss_quadrature(self, beta, w) -> float:
        """Adaptive numerical integration of the defining integral.

        Panels are split at the weight breakpoints and at the indicator
        jumps +-1; each panel is integrated to 1e-13 absolute tolerance.
        Independent of the closed form by construction.
        """
        beta, w = self._check(beta, w)
        weight = self.weight

        def integrand(x: float) -> float:
            ind = 1.0 if -1.0 < x < 1.0 else 0.0
            return weight(x) * (ind - rff_value(beta, w, x)) ** 2

        edges = set(self._edges.tolist()) | {0.0}
        support = weight.support
        for e in (-1.0, 1.0):
            if -support < e < support:
                edges.add(e)
        pts = sorted(edges)
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            val, _ = quad(integrand, a, b, epsabs=1e-13, epsrel=1e-11, limit=400)
            total += val
        return 0.5 * total

    # -- real embedding -----------------------------------------------------------

    def real_loss(self, v: np.ndarray) -> float:
        """Loss over the packed real vector; +inf outside the pole-imag floor
        so line searches backtrack instead of erroring."""
        beta, w = from_real(v)
        if np.any(np.abs(w.imag) < MIN_POLE_IMAG):
            return np.inf
        return self.loss(beta, w)

    def real_gradient(self, v: np.ndarray) -> np.ndarray:
        beta, w = from_real(v)
        _, gb, gw = self.loss_and_gradient(beta, w)
        return np.concatenate(
            [real_gradient_from_wirtinger(gb), real_gradient_from_wirtinger(gw)]
        )

    def real_loss_and_gradient(self, v: np.ndarray) -> tuple[float, np.ndarray]:
        beta, w = from_real(v)
        value, gb, gw = self.loss_and_gradient(beta, w)
        grad = np.concatenate(
            [real_gradient_from_wirtinger(gb), real_gradient_from_wirtinger(gw)]
        )
        return value, grad
