import numpy as np
import pytest

from filter_forge import builtin_filter, builtin_filter_names, builtin_weight


def assert_wolfe_on_trace(loss, grad, x0, report, c1=1e-4, c2=0.9):
    """Recompute both Wolfe inequalities at every accepted step of a run."""
    x_prev = np.asarray(x0, dtype=float)
    for rec in report.trace:
        s = rec.point - x_prev
        p = s / rec.step_length
        f0, g0 = loss(x_prev), grad(x_prev)
        f1, g1 = loss(rec.point), grad(rec.point)
        slope0 = float(g0 @ p)
        assert f1 <= f0 + c1 * rec.step_length * slope0 + 1e-12 * (1 + abs(f0))
        if not rec.capped:
            assert float(g1 @ p) >= c2 * slope0 - 1e-12 * (1 + abs(slope0))
        assert rec.wolfe_ok or rec.capped
        x_prev = rec.point


def assert_strict_descent(report):
    losses = [rec.loss for rec in report.trace]
    assert all(b < a for a, b in zip(losses, losses[1:]))


@pytest.fixture(scope="session")
def all_builtin_filters():
    return {name: builtin_filter(name) for name in builtin_filter_names()}


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_parameters(rng, m=4, min_imag=0.05):
    """Random valid (beta, w) with poles kept away from the real axis."""
    beta = 0.05 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    w = -rng.uniform(0.05, 1.2, m) + 1j * rng.uniform(min_imag, 1.2, m)
    return beta, w


@pytest.fixture(scope="session")
def gamma_objective():
    from filter_forge import SliseObjective

    return SliseObjective(builtin_weight("gamma-slise"), 4)


@pytest.fixture(scope="session")
def box_objective():
    from filter_forge import SliseObjective

    return SliseObjective(builtin_weight("box-slise"), 4)
