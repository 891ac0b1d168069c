import numpy as np
import pytest
from hypothesis import given, strategies as st

import filter_forge.simulate as sim
from filter_forge import builtin_filter
from filter_forge.filters import FilterDomainError
from filter_forge.rates import predicted_iterations
from filter_forge.simulate import (
    apply_filter,
    benchmark_rows,
    clustered_spectrum,
    eigentrace,
    generate_problem,
    measured_vs_predicted_rate,
    subspace_iteration,
)


class TestGenerateProblem:
    def test_seed_zero_is_diagonal(self):
        spec = [-2.0, -0.5, 0.5, 2.0]
        prob = generate_problem(spec, 0)
        np.testing.assert_array_equal(prob.matrix, np.diag(spec).astype(complex))

    def test_hermitian_to_tolerance(self):
        prob = generate_problem([-2.0, -0.5, 0.5, 2.0], 3)
        assert np.max(np.abs(prob.matrix - prob.matrix.conj().T)) <= 1e-13

    def test_planted_spectrum_recovered(self):
        spec = np.linspace(-3, 3, 100)
        prob = generate_problem(spec, 5)
        got = np.linalg.eigvalsh(prob.matrix)
        np.testing.assert_allclose(np.sort(got), np.sort(spec), atol=1e-12)

    def test_deterministic(self):
        a = generate_problem([1.0, 2.0, 3.0], 9)
        b = generate_problem([1.0, 2.0, 3.0], 9)
        np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_empty_rejected(self):
        with pytest.raises(FilterDomainError):
            generate_problem([], 1)


class TestApplyFilter:
    def test_diagonal_reduces_to_scalar_evaluation(self, rng):
        spec = np.array([-1.5, -0.5, 0.3, 2.0])
        prob = generate_problem(spec, 0)
        filt = builtin_filter("gauss-legendre16")
        V = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        X = apply_filter(filt, prob, V)
        expected = filt.evaluate(spec)[:, None] * V
        np.testing.assert_allclose(X, expected, atol=1e-10)

    def test_zero_block(self):
        prob = generate_problem([0.5, 1.5], 0)
        filt = builtin_filter("zolotarev16")
        X = apply_filter(filt, prob, np.zeros((2, 2), dtype=complex))
        np.testing.assert_array_equal(X, 0)

    def test_scalar_problem(self):
        prob = generate_problem([0.5], 0)
        filt = builtin_filter("zolotarev16")
        X = apply_filter(filt, prob, np.ones((1, 1), dtype=complex))
        assert X[0, 0] == pytest.approx(filt.evaluate(0.5), rel=1e-12)


class TestEigentrace:
    def test_mixed(self):
        assert eigentrace([0.5, -0.5, 2.0]) == 1.0

    def test_all_outside(self):
        assert eigentrace([-3.0, 1.5, 7.0]) == 0.0

    def test_near_edges(self):
        assert eigentrace([0.999, -0.999]) == pytest.approx(1.998)

    @given(st.lists(st.floats(-10, 10), max_size=12))
    def test_bounded_by_count(self, vals):
        assert 0.0 <= eigentrace(vals) <= len(vals)


class TestSubspaceIteration:
    def test_default_tolerance(self):
        import inspect

        sig = inspect.signature(subspace_iteration)
        assert sig.parameters["tol"].default == 1e-13

    def test_diagonal_8x8(self):
        prob = generate_problem([-3.0, -1.5, -0.7, -0.3, 0.3, 0.7, 1.5, 3.0], 0)
        filt = builtin_filter("gauss-legendre16")
        (vals, vecs), history = subspace_iteration(prob, 4, filt, seed=3)
        np.testing.assert_allclose(np.sort(vals), [-0.7, -0.3, 0.3, 0.7], atol=1e-10)
        assert history.converged
        assert len(history.eigentraces) <= 10
        # returned vectors are orthonormal eigenvectors
        np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(4), atol=1e-12)

    def test_200x200_planted_interior_recovered(self):
        spec = clustered_spectrum(seed=21)
        prob = generate_problem(spec, 21)
        filt = builtin_filter("gamma-slise16")
        (vals, vecs), history = subspace_iteration(prob, 22, filt, seed=4)
        planted = np.sort(spec[np.abs(spec) < 1])
        assert vals.size == planted.size
        np.testing.assert_allclose(np.sort(vals), planted, atol=1e-9)
        # residual quality of every returned pair
        R = prob.matrix @ vecs - vecs * vals
        assert np.max(np.linalg.norm(R, axis=0)) <= 1e-10 * prob.operator_norm

    def test_orthogonality_each_sweep(self, monkeypatch):
        original = sim._orthonormalize
        checked = []

        def checking(X, rng):
            Q = original(X, rng)
            checked.append(np.max(np.abs(Q.conj().T @ Q - np.eye(Q.shape[1]))))
            return Q

        monkeypatch.setattr(sim, "_orthonormalize", checking)
        prob = generate_problem(clustered_spectrum(n=80, interior=10, seed=2), 2)
        subspace_iteration(prob, 11, builtin_filter("gamma-slise16"), seed=4)
        assert checked and max(checked) <= 1e-12

    def test_eigentrace_changes_eventually_decrease(self):
        prob = generate_problem(clustered_spectrum(seed=23), 23)
        filt = builtin_filter("gauss-legendre16")
        _, history = subspace_iteration(prob, 22, filt, seed=4)
        # the trace jumps whenever newly-converged pairs pass the residual
        # gate; after the last such event the changes must shrink
        traces = history.eigentraces
        last_jump = max((i for i in range(1, len(traces))
                         if traces[i] > traces[i - 1] * 1.01), default=0)
        tail = history.relative_changes[last_jump:]
        assert len(tail) >= 2
        assert all(b <= a * 1.0001 for a, b in zip(tail, tail[1:]))

    def test_bad_width_rejected(self):
        prob = generate_problem([0.5, 1.5], 0)
        with pytest.raises(FilterDomainError):
            subspace_iteration(prob, 5, builtin_filter("zolotarev16"))


class TestMeasuredVsPredicted:
    def test_ordering_flag_true_for_dominant_filter(self):
        spec = clustered_spectrum(seed=31)
        prob = generate_problem(spec, 31)
        comp = measured_vs_predicted_rate(prob, 22, builtin_filter("gauss-legendre16"), seed=6)
        assert comp.ordering_ok

    def test_far_exterior_prediction_and_measurement(self):
        # exterior eigenvalues far outside: tiny predicted rate, and the
        # measured contraction within a factor of three
        spec = np.concatenate([np.linspace(-0.8, 0.8, 10),
                               np.linspace(2.0, 3.0, 25), -np.linspace(2.1, 3.1, 25)])
        prob = generate_problem(np.sort(spec), 41)
        filt = builtin_filter("gauss-legendre16")
        comp = measured_vs_predicted_rate(prob, 12, filt, seed=6)
        assert comp.predicted < 1e-3
        assert comp.measured / comp.predicted < 3.0
        assert comp.predicted / comp.measured < 3.0

    def test_iteration_count_tracks_prediction(self):
        # far-exterior suite where the eigentrace stop and the predicted
        # count land within two sweeps of each other
        spec = np.concatenate([np.linspace(-0.8, 0.8, 10),
                               np.linspace(2.0, 3.0, 25), -np.linspace(2.1, 3.1, 25)])
        prob = generate_problem(np.sort(spec), 43)
        for name in ("gauss-legendre16", "gamma-slise16"):
            comp = measured_vs_predicted_rate(prob, 12, builtin_filter(name), seed=6)
            assert comp.converged
            expected = predicted_iterations(comp.predicted, 1e-13)
            assert abs(comp.iterations - expected) <= 2


class TestBenchmark:
    def test_rows_and_ranking(self):
        filters = {name: builtin_filter(name) for name in
                   ("enhanced-gamma-slise16", "gamma-slise16", "gauss-legendre16")}
        spec = clustered_spectrum(n=120, interior=12, seed=8)
        problems = {"p8": generate_problem(spec, 8)}
        rows = benchmark_rows(problems, filters, 1.1, seed=9)
        assert len(rows) == 3
        by_name = {r["filter"]: r for r in rows}
        assert (by_name["enhanced-gamma-slise16"]["iterations"]
                <= by_name["gamma-slise16"]["iterations"]
                <= by_name["gauss-legendre16"]["iterations"])
        assert all(r["converged"] for r in rows)

    def test_multiplier_below_one_rejected(self):
        with pytest.raises(FilterDomainError, match="multiplier"):
            benchmark_rows({}, {}, 0.9)
