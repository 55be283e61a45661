# Author: Green Mountain Systems AI Inc.

"""Unit tests for the a2-lab command line."""

import json

import pytest
from typer.testing import CliRunner

from a2_lab.interfaces.cli.main import app, build_spec
from a2_lab.models.core import ExperimentName
from a2_lab.storage.base import RESULTS_HEADER

runner = CliRunner()


class TestBuildSpec:
    """Tests for merging settings, run files and flags."""

    def test_flags_override_run_file(self, tmp_path):
        path = tmp_path / "run.txt"
        path.write_text("experiment = pi-exponent\nq-grid = 8, 16\nseed = 5\n", encoding="utf-8")
        spec = build_spec(path, {"seed": 9, "q_grid": None})
        assert spec.experiment == ExperimentName.PI_EXPONENT
        assert spec.q_grid == [8.0, 16.0]
        assert spec.seed == 9

    def test_settings_defaults(self, monkeypatch):
        monkeypatch.setenv("A2_LAB_SEED", "42")
        monkeypatch.setenv("A2_LAB_OUT_DIR", "elsewhere")
        spec = build_spec(None, {"experiment": "remodel"})
        assert spec.seed == 42
        assert spec.out == "elsewhere"

    def test_missing_experiment(self):
        with pytest.raises(ValueError, match="no experiment"):
            build_spec(None, {"experiment": None})


class TestRunCommand:
    """Tests for ``a2-lab run``."""

    def test_writes_results(self, tmp_path):
        out = tmp_path / "oracle"
        result = runner.invoke(app, ["run", "-e", "terminal-oracle", "--out", str(out)])
        assert result.exit_code == 0, result.output
        lines = (out / "results.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == RESULTS_HEADER
        assert lines[1].startswith("pairs,failures")
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert summary["passed"] is True
        assert summary["spec"]["experiment"] == "terminal-oracle"
        assert (out / "plotdata.csv").exists()

    def test_run_file(self, tmp_path):
        config = tmp_path / "run.txt"
        config.write_text(
            "experiment = evaluator-equivalence\nq-grid = 4\nnmax = 4\n", encoding="utf-8"
        )
        result = runner.invoke(app, ["run", "-c", str(config), "--store", "memory"])
        assert result.exit_code == 0, result.output

    def test_failed_checks_exit_one(self, monkeypatch, tmp_path):
        monkeypatch.setenv("A2_LAB_PAIR_BUDGET", "1")
        result = runner.invoke(
            app,
            [
                "run",
                "-e",
                "evaluator-equivalence",
                "--q-grid",
                "4",
                "--nmax",
                "4",
                "-o",
                str(tmp_path),
            ],
        )
        assert result.exit_code == 1
        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["passed"] is False

    @pytest.mark.parametrize(
        "args",
        [
            ["run"],
            ["run", "-e", "warp-drive"],
            ["run", "-e", "pi-exponent", "--q-grid", "0.5"],
            ["run", "-e", "pi-exponent", "--delta0", "0.5"],
            ["run", "-e", "transference", "--frequencies", "1,2"],
            ["run", "-e", "remodel", "--store", "sqlite"],
        ],
    )
    def test_usage_errors_exit_two(self, args):
        result = runner.invoke(app, args)
        assert result.exit_code == 2

    def test_bad_run_file_exit_two(self, tmp_path):
        config = tmp_path / "run.txt"
        config.write_text("experiment = remodel\nspeed = 3\n", encoding="utf-8")
        result = runner.invoke(app, ["run", "-c", str(config)])
        assert result.exit_code == 2
        assert "'speed'" in result.output


class TestInfoCommands:
    """Tests for ``a2-lab experiments`` and ``a2-lab constants``."""

    def test_experiments(self):
        result = runner.invoke(app, ["experiments"])
        assert result.exit_code == 0
        for name in ("construct-verify", "pi-exponent", "even-shift"):
            assert name in result.output

    def test_constants(self):
        result = runner.invoke(app, ["constants", "--terms", "4096"])
        assert result.exit_code == 0
        assert "c1" in result.output
        assert "c2" in result.output


class TestDumpCommand:
    """Tests for ``a2-lab dump``."""

    def test_writes_weight_files(self, tmp_path):
        out = tmp_path / "weight"
        result = runner.invoke(
            app, ["dump", "--q", "4", "--delta0", "0.01", "--nmax", "2", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        lines = (out / "weight.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# matrix-a2-lab weight v1 depth=5"
        assert lines[1] == "left,right,v0,v1,v2,v3"
        assert len(lines) == 2 + 32
        assert (out / "inverse_weight.csv").exists()

    def test_no_rotate(self, tmp_path):
        out = tmp_path / "control"
        result = runner.invoke(
            app, ["dump", "--q", "4", "--nmax", "1", "--no-rotate", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        rows = (out / "weight.csv").read_text(encoding="utf-8").splitlines()[2:]
        # no rotation keeps every leaf diagonal
        assert all(row.split(",")[3] in ("0.0", "-0.0") for row in rows)

    @pytest.mark.parametrize(
        "args",
        [
            ["dump", "--q", "0.5", "--nmax", "1"],
            ["dump", "--q", "4", "--delta0", "0.5", "--nmax", "1"],
            ["dump", "--q", "4", "--nmax", "40"],
            ["dump", "--q", "4", "--nmax", "1", "--store", "tape"],
        ],
    )
    def test_usage_errors_exit_two(self, args, tmp_path):
        result = runner.invoke(app, args + ["--out", str(tmp_path)])
        assert result.exit_code == 2
