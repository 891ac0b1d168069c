import csv

import numpy as np
import pytest

from filter_forge import SliseObjective, builtin_filter, builtin_weight
from filter_forge.cli import main
from filter_forge.filters import load_filter


def run(args):
    return main([str(a) for a in args])


class TestOptimizeCommand:
    def test_box_constrained_reference_run(self, tmp_path):
        out = tmp_path / "filt.json"
        trace = tmp_path / "trace.csv"
        code = run(["optimize", "--weight", "box-slise", "--start", "zolotarev16",
                    "--lb", "0.0022", "--out", out, "--trace", trace, "--no-plot"])
        assert code == 0
        filt = load_filter(out)
        obj = SliseObjective(builtin_weight("box-slise"), 4)
        assert obj.loss(filt.coeffs, filt.poles) == pytest.approx(4.72e-4, rel=0.02)
        rows = list(csv.DictReader(trace.open()))
        assert list(rows[0]) == ["iteration", "loss", "grad_norm", "evaluations"]
        losses = [float(r["loss"]) for r in rows]
        assert all(b < a for a, b in zip(losses, losses[1:]))

    def test_gamma_run_beats_published(self, tmp_path):
        out = tmp_path / "filt.json"
        code = run(["optimize", "--weight", "gamma-slise", "--start", "gauss-legendre16",
                    "--out", out, "--no-plot"])
        assert code == 0
        filt = load_filter(out)
        obj = SliseObjective(builtin_weight("gamma-slise"), 4)
        published = builtin_filter("gamma-slise16")
        assert (obj.loss(filt.coeffs, filt.poles)
                <= obj.loss(published.coeffs, published.poles) + 1e-6)

    def test_missing_weight_file(self, tmp_path, capsys):
        missing = tmp_path / "nope.json"
        code = run(["optimize", "--weight", missing, "--start", "zolotarev16",
                    "--out", tmp_path / "f.json", "--no-plot"])
        assert code == 2
        assert str(missing) in capsys.readouterr().err

    def test_infeasible_start_names_pole(self, tmp_path, capsys):
        code = run(["optimize", "--weight", "box-slise", "--start", "zolotarev16",
                    "--lb", "0.01", "--out", tmp_path / "f.json", "--no-plot"])
        assert code == 2
        err = capsys.readouterr().err
        assert "pole 0" in err and "0.01" in err


class TestEvalCommand:
    def test_endpoints_and_count(self, tmp_path):
        out = tmp_path / "curve.csv"
        assert run(["eval", "--filter", "zolotarev16", "--min", -2, "--max", 2,
                    "--samples", 41, "--out", out, "--no-plot"]) == 0
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 41
        assert float(rows[0]["x"]) == -2.0 and float(rows[-1]["x"]) == 2.0

    def test_symmetric_range_symmetric_values(self, tmp_path):
        out = tmp_path / "curve.csv"
        run(["eval", "--filter", "gauss-legendre16", "--min", -3, "--max", 3,
             "--samples", 21, "--out", out, "--no-plot"])
        vals = [float(r["value"]) for r in csv.DictReader(out.open())]
        np.testing.assert_allclose(vals, vals[::-1], rtol=1e-12, atol=1e-13)

    def test_renders_figure_alongside(self, tmp_path):
        out = tmp_path / "curve.csv"
        run(["eval", "--filter", "gauss-legendre16", "--out", out])
        assert (tmp_path / "curve.png").exists()


class TestRatesCommand:
    def test_grid_shape_and_determinism(self, tmp_path):
        args = ["rates", "--gaps", "0.9,0.95", "--poles", "8,16",
                "--budget", "1500", "--no-plot"]
        out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        assert run(args + ["--out", out1]) == 0
        assert run(args + ["--out", out2]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        rows = list(csv.DictReader(out1.open()))
        assert len(rows) == 2 * 2 * 3
        assert list(rows[0]) == ["G", "poles", "filter", "worst_case_rate"]
        for G in ("0.9", "0.95"):
            for poles in ("8", "16"):
                cell = {r["filter"]: float(r["worst_case_rate"]) for r in rows
                        if r["G"] == G and r["poles"] == poles}
                assert (cell["enhanced-gamma-slise"] < cell["gamma-slise"]
                        < cell["gauss-legendre"])

    def test_bad_pole_count(self, capsys):
        assert run(["rates", "--poles", "10", "--no-plot"]) == 2
        assert "multiples of 4" in capsys.readouterr().err


class TestDesignWeightCommand:
    def test_budget_and_reproducibility(self, tmp_path):
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / f"w{tag}.json"
            log = tmp_path / f"l{tag}.csv"
            assert run(["design-weight", "--gap", "0.95", "--poles", "16",
                        "--budget", "12", "--out", out, "--log", log,
                        "--no-plot"]) == 0
            rows = list(csv.DictReader(log.open()))
            assert len(rows) <= 12
            objectives = [float(r["objective"]) for r in rows]
            assert min(objectives) <= objectives[0]  # never worse than start
            outs.append(out.read_bytes() + log.read_bytes())
        assert outs[0] == outs[1]


class TestSimulateCommand:
    def test_diagonal_smoke(self, tmp_path):
        out = tmp_path / "bench.csv"
        code = run(["simulate", "--size", "24", "--interior", "4", "--seed", "0",
                    "--problems", "1", "--filter", "gauss-legendre16",
                    "--out", out, "--no-plot"])
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert list(rows[0]) == ["problem_id", "filter", "N_multiplier", "iterations",
                                 "converged", "predicted_rate", "measured_rate"]
        assert rows[0]["converged"] == "True"
        assert int(rows[0]["iterations"]) <= 10

    def test_multiplier_below_one_rejected(self, capsys):
        assert run(["simulate", "--multiplier", "0.5"]) == 2
        assert "multiplier" in capsys.readouterr().err

    def test_deterministic_bytes(self, tmp_path):
        args = ["simulate", "--size", "60", "--interior", "6", "--seed", "2",
                "--filter", "gamma-slise16", "--no-plot"]
        out1, out2 = tmp_path / "b1.csv", tmp_path / "b2.csv"
        assert run(args + ["--out", out1]) == 0
        assert run(args + ["--out", out2]) == 0
        assert out1.read_bytes() == out2.read_bytes()
