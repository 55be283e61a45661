# Author: Green Mountain Systems AI Inc.

"""Unit tests for experiment specs and the experiment runner."""

import pytest
from pydantic import ValidationError

from a2_lab.engines.experiments import (
    DEFAULT_Q_GRIDS,
    EXPERIMENTS,
    params_for,
    q_grid,
    run,
)
from a2_lab.models.core import EvaluatorKind, ExperimentName, WitnessChoice
from a2_lab.models.experiment import ExperimentSpec


class TestExperimentSpec:
    """Tests for ExperimentSpec validation."""

    def test_string_lists(self):
        spec = ExperimentSpec(experiment="remodel", q_grid="8, 16,32", frequencies="4,5")
        assert spec.q_grid == [8.0, 16.0, 32.0]
        assert spec.frequencies == [4, 5]

    def test_defaults(self):
        spec = ExperimentSpec(experiment="pi-exponent")
        assert spec.experiment == ExperimentName.PI_EXPONENT
        assert spec.witness == WitnessChoice.A0
        assert spec.evaluator == EvaluatorKind.FRAME_RECURSION
        assert spec.q_grid is None

    @pytest.mark.parametrize(
        "field,value",
        [
            ("q_grid", ""),
            ("q_grid", "0.5, 2"),
            ("delta0", 0.2),
            ("delta0", 0.0),
            ("frequencies", "1"),
            ("witness", "b0"),
            ("tol", -1.0),
        ],
    )
    def test_rejects(self, field, value):
        with pytest.raises(ValidationError):
            ExperimentSpec(experiment="pi-exponent", **{field: value})

    def test_unknown_experiment(self):
        with pytest.raises(ValidationError):
            ExperimentSpec(experiment="warp-drive")

    def test_frozen(self):
        spec = ExperimentSpec(experiment="pi-exponent")
        with pytest.raises(ValidationError):
            spec.seed = 3

    def test_echo(self):
        echo = ExperimentSpec(experiment="sign-structure", witness="a0+b0").echo()
        assert echo["experiment"] == "sign-structure"
        assert echo["witness"] == "a0+b0"


class TestGridParameters:
    """Tests for the per-Q construction parameters."""

    def test_every_experiment_registered(self):
        assert set(EXPERIMENTS) == set(ExperimentName)
        assert set(DEFAULT_Q_GRIDS) == set(ExperimentName)

    def test_default_grid(self):
        spec = ExperimentSpec(experiment="pi-exponent")
        assert q_grid(spec) == [8.0, 16.0, 32.0, 64.0]

    def test_defaults_per_experiment(self):
        params = params_for(ExperimentSpec(experiment="construct-verify"), 16.0)
        assert params.n_max == 64
        assert params.delta0 == pytest.approx(1e-3)
        params = params_for(ExperimentSpec(experiment="pi-exponent"), 4.0)
        assert params.n_max == 64

    def test_overrides(self):
        spec = ExperimentSpec(experiment="pi-exponent", nmax=5, delta0=1e-4, rotate=False)
        params = params_for(spec, 8.0)
        assert params.n_max == 5
        assert params.delta0 == 1e-4
        assert params.rotate is False


class TestRun:
    """Tests for running small experiments end to end."""

    def test_terminal_oracle(self):
        result = run(ExperimentSpec(experiment="terminal-oracle"))
        assert result.passed
        assert result.rows[0]["failures"] == 0
        assert result.summary["passed"] is True

    def test_evaluator_equivalence(self):
        result = run(ExperimentSpec(experiment="evaluator-equivalence", q_grid="4,16", nmax=5))
        assert result.passed, result.failed_checks()
        assert [r["Q"] for r in result.rows] == [4.0, 16.0]
        assert set(result.summary["timings"]) == {"4.0", "16.0"}
        assert all("ms" not in key for row in result.rows for key in row)

    def test_row_errors_do_not_stop_the_run(self, monkeypatch):
        monkeypatch.setenv("A2_LAB_PAIR_BUDGET", "1")
        result = run(ExperimentSpec(experiment="evaluator-equivalence", q_grid="4,16", nmax=5))
        assert len(result.rows) == 2
        assert all("budget" in r["error"] for r in result.rows)
        assert not result.passed
        assert "no_row_errors" in result.failed_checks()
        assert len(result.errors()) == 2

    def test_workers_keep_grid_order(self, monkeypatch):
        spec = ExperimentSpec(experiment="degenerate-controls", q_grid="2,4,8", nmax=6)
        serial = run(spec)
        monkeypatch.setenv("A2_LAB_WORKERS", "3")
        threaded = run(spec)
        assert threaded.rows == serial.rows
        assert serial.checks["zero_offdiag"]

    def test_construct_verify_tables(self):
        result = run(ExperimentSpec(experiment="construct-verify", q_grid="4,16", nmax=4))
        assert [r["error"] for r in result.rows] == ["", ""]
        table = result.tables["eigen_table"]
        assert [row["Q"] for row in table[:1]] == ["4.0"]
        assert table[-1]["Q"] == "16.0"
        assert "runtime_s" in result.summary

    def test_deterministic(self):
        spec = ExperimentSpec(experiment="terminal-oracle", seed=11)
        assert run(spec).rows == run(spec).rows

    def test_hdy_witness_sparse_counterparts(self):
        result = run(ExperimentSpec(experiment="hdy-witness", q_grid="4,8,16", nmax=2))
        assert result.checks["sparse_counterparts"]
        for row in result.rows:
            assert row["deep_n_max"] == 6
            defects = [value for key, value in row.items() if key.endswith("_sparse_defect")]
            assert len(defects) == 4
            assert max(defects) <= 1e-10
            assert row["witness_norm_error"] < 1e-9
        assert "slope_rises_with_depth" in result.checks
        assert {"hdy", "hdy_deep"} <= set(result.fits)

    def test_controlled_parts_norm_estimates(self, monkeypatch):
        monkeypatch.setenv("A2_LAB_RANDOM_TESTS", "2")
        result = run(ExperimentSpec(experiment="controlled-parts", q_grid="4,8,16", nmax=3, seed=5))
        assert result.summary["operator_norm_seed"] == 5
        assert result.summary["operator_norm_tests"] == 2
        for row in result.rows:
            assert row["pi1_norm"] >= row["pi1"] * (1 - 1e-12)
            assert row["s_l_norm"] >= row["s_l"] * (1 - 1e-12)
            assert row["square_function_norm"] >= row["square_function"] * (1 - 1e-12)
            assert row["pi_reference_nmax"] > row["n_max"]
        assert {"square_function_slope", "separated_from_pi", "controlled_slopes"} <= set(
            result.checks
        )
        assert "pi_offdiag" in result.fits
