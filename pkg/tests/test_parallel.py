import numpy as np
import pytest

from filter_forge import builtin_filter
from filter_forge.parallel import parallel_map, thread_count
from filter_forge.simulate import apply_filter, generate_problem
import filter_forge.simulate as sim


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("FILTER_FORGE_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("FILTER_FORGE_THREADS", "0")
    assert thread_count() >= 1
    monkeypatch.delenv("FILTER_FORGE_THREADS")
    assert thread_count() >= 1
    monkeypatch.setenv("FILTER_FORGE_THREADS", "-2")
    with pytest.raises(ValueError):
        thread_count()
    monkeypatch.setenv("FILTER_FORGE_THREADS", "many")
    with pytest.raises(ValueError):
        thread_count()


def test_parallel_map_preserves_order(monkeypatch):
    monkeypatch.setenv("FILTER_FORGE_THREADS", "4")
    assert parallel_map(lambda v: v * v, range(10)) == [v * v for v in range(10)]


def test_apply_filter_thread_count_invariant(monkeypatch, rng):
    prob = generate_problem(np.linspace(-2, 2, 30), 5)
    filt = builtin_filter("gauss-legendre16")
    V = rng.standard_normal((30, 4)) + 1j * rng.standard_normal((30, 4))
    monkeypatch.setenv("FILTER_FORGE_THREADS", "1")
    serial = apply_filter(filt, prob, V)
    monkeypatch.setenv("FILTER_FORGE_THREADS", "4")
    threaded = apply_filter(filt, prob, V)
    np.testing.assert_array_equal(serial, threaded)


def test_rank_collapse_repair(rng, caplog):
    import logging

    X = rng.standard_normal((12, 4)) + 1j * rng.standard_normal((12, 4))
    X[:, 3] = X[:, 0]  # degenerate column
    with caplog.at_level(logging.WARNING, logger="filter_forge.simulate"):
        Q = sim._orthonormalize(X, np.random.default_rng(1))
    assert np.max(np.abs(Q.conj().T @ Q - np.eye(4))) <= 1e-12
    assert any("rank collapse" in rec.message for rec in caplog.records)
