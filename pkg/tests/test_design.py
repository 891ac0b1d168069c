import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from filter_forge import builtin_weight, gauss_legendre_filter
from filter_forge.design import (
    GAMMA_SLISE_PARAMETERS,
    SUPPORT_CAP,
    ParametricWeight,
    _from_vector,
    design_weight,
    realize,
    weight_objective,
)
from filter_forge.filters import FilterDomainError
from filter_forge.optimize import OptimizerConfig, Termination
from filter_forge.pipeline import optimize_filter
from filter_forge.rates import worst_case_rate

ENHANCED_PARAMETERS = ParametricWeight(
    np.array([0.7, 0.00092, 887.0, 20.0, 0.0]), 0.96, 1.4, 10.0
)

FAST_INNER = OptimizerConfig(max_iterations=300, max_evaluations=2000)


class TestParametricWeight:
    def test_invariants(self):
        with pytest.raises(FilterDomainError, match="w1"):
            ParametricWeight(np.ones(5), 1.2, 2.0, 3.0)
        with pytest.raises(FilterDomainError, match="w2 < w3"):
            ParametricWeight(np.ones(5), 0.9, 1.0, 3.0)  # w2 below 1/w1
        with pytest.raises(FilterDomainError, match="non-negative"):
            ParametricWeight(np.array([1, 1, 1, -1, 1.0]), 0.9, 1.5, 3.0)

    def test_realize_gamma_matches_builtin_off_rounding_sliver(self):
        # the builtin's printed breakpoint 1.05 rounds 1/w1 = 1/0.95;
        # compare everywhere outside that sliver
        realized = realize(GAMMA_SLISE_PARAMETERS)
        builtin = builtin_weight("gamma-slise")
        xs = np.concatenate([np.linspace(0, 12, 2400), [0.95, 1.4, 5.0, 10.0]])
        sliver = (xs >= 1.05) & (xs < 1.0 / 0.95)
        xs = xs[~sliver]
        np.testing.assert_array_equal(realized(xs), builtin(xs))

    def test_realize_enhanced_matches_builtin_off_rounding_sliver(self):
        realized = realize(ENHANCED_PARAMETERS)
        builtin = builtin_weight("enhanced-gamma-slise")
        xs = np.concatenate([np.linspace(0, 12, 2400), [0.96, 1.4, 10.0]])
        sliver = (xs >= 1.0 / 0.96) & (xs < 1.0417)
        xs = xs[~sliver]
        np.testing.assert_array_equal(realized(xs), builtin(xs))

    def test_realize_computes_reciprocal_breakpoint(self):
        pw = ParametricWeight(np.array([1, 2, 3, 4, 5.0]), 0.5, 3.0, 8.0)
        realized = realize(pw)
        np.testing.assert_allclose(realized.breakpoints, [0.5, 2.0, 3.0, 8.0, SUPPORT_CAP])
        np.testing.assert_allclose(realized.values, [1, 2, 3, 4, 5])

    def test_realize_caps_support(self):
        pw = ParametricWeight(np.array([1, 2, 3, 4, 5.0]), 0.5, 3.0, 12.0)
        realized = realize(pw)
        assert realized.support == 12.0
        assert realized.values.size == 4  # no tail beyond the cap


class TestWeightObjective:
    def test_pipeline_self_consistency(self):
        got = weight_objective(GAMMA_SLISE_PARAMETERS, 0.95, 4, FAST_INNER)
        filt, _ = optimize_filter(realize(GAMMA_SLISE_PARAMETERS),
                                  gauss_legendre_filter(4), config=FAST_INNER)
        manual = worst_case_rate(filt, 0.95)
        assert got == pytest.approx(manual, abs=1e-10)

    def test_positive(self):
        assert weight_objective(GAMMA_SLISE_PARAMETERS, 0.95, 4, FAST_INNER) > 0

    def test_enhanced_beats_gamma(self):
        gamma = weight_objective(GAMMA_SLISE_PARAMETERS, 0.95, 4, FAST_INNER)
        enhanced = weight_objective(ENHANCED_PARAMETERS, 0.95, 4, FAST_INNER)
        assert enhanced < gamma

    def test_scale_invariance_within_one_percent(self):
        pw = GAMMA_SLISE_PARAMETERS
        scaled = ParametricWeight(10.0 * pw.heights, pw.w1, pw.w2, pw.w3)
        a = weight_objective(pw, 0.95, 4, FAST_INNER)
        b = weight_objective(scaled, 0.95, 4, FAST_INNER)
        assert b == pytest.approx(a, rel=0.01)


class TestDesignWeight:
    def test_zero_budget_returns_start(self):
        best, report = design_weight(GAMMA_SLISE_PARAMETERS, 0.95, 4, budget=0)
        assert best is GAMMA_SLISE_PARAMETERS
        assert report.loss_evaluations == 0
        assert report.termination is Termination.MAX_EVAL

    def test_improves_on_start_and_logs(self, tmp_path):
        log = tmp_path / "design.csv"
        baseline = weight_objective(GAMMA_SLISE_PARAMETERS, 0.95, 4, FAST_INNER)
        best, report = design_weight(GAMMA_SLISE_PARAMETERS, 0.95, 4, budget=20,
                                     inner_config=FAST_INNER, log_path=log)
        assert report.final_loss <= baseline
        lines = log.read_text().splitlines()
        assert lines[0].startswith("evaluation,objective,v1")
        assert len(lines) == report.loss_evaluations + 1

    def test_deterministic(self, tmp_path):
        runs = []
        for tag in ("a", "b"):
            log = tmp_path / f"{tag}.csv"
            best, report = design_weight(GAMMA_SLISE_PARAMETERS, 0.95, 4, budget=12,
                                         inner_config=FAST_INNER, log_path=log)
            runs.append((log.read_bytes(), best.heights.tolist(), best.w1, best.w2, best.w3,
                         report.final_loss))
        assert runs[0] == runs[1]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=8, max_size=8))
def test_reparametrization_is_always_feasible(u):
    pw = _from_vector(np.array(u))
    assert 0.0 < pw.w1 < 1.0
    assert 1.0 / pw.w1 < pw.w2 < pw.w3
    assert np.all(pw.heights > 0)
    realize(pw)  # must not raise
