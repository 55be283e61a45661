# Author: Green Mountain Systems AI Inc.

"""Unit tests for settings and run files."""

import pytest

from a2_lab.config import LabSettings, get_settings, load_run_file


class TestSettings:
    """Tests for LabSettings."""

    def test_defaults(self):
        """Test the built-in defaults."""
        settings = LabSettings(_env_file=None)
        assert settings.depth_cap == 24
        assert settings.workers == 1
        assert settings.store_type == "filesystem"

    def test_env_override(self, monkeypatch):
        """Test that A2_LAB_ variables override defaults."""
        monkeypatch.setenv("A2_LAB_SEED", "7")
        monkeypatch.setenv("A2_LAB_WORKERS", "4")
        settings = get_settings()
        assert settings.seed == 7
        assert settings.workers == 4

    def test_cached(self):
        """Test that get_settings returns one instance."""
        assert get_settings() is get_settings()

    @pytest.mark.parametrize(
        "Q,expected",
        [(16.0, 1e-3), (10000.0, 5e-4)],
    )
    def test_default_delta0(self, Q, expected):
        """Test delta0 = min(cap, scale / sqrt(Q))."""
        assert LabSettings(_env_file=None).default_delta0(Q) == pytest.approx(expected)

    def test_default_nmax(self):
        """Test n_max = ceil(16 Q)."""
        settings = LabSettings(_env_file=None)
        assert settings.default_nmax(4.0) == 64
        assert settings.default_nmax(2.5) == 40


class TestRunFile:
    """Tests for load_run_file."""

    def test_parse(self, tmp_path):
        """Test comments, blank lines and dashed keys."""
        path = tmp_path / "run.txt"
        path.write_text(
            "# pi exponent sweep\n"
            "experiment = pi-exponent\n"
            "\n"
            "q-grid = 8, 16, 32  # doubling\n"
            "witness = a0+b0\n",
            encoding="utf-8",
        )
        assert load_run_file(path) == {
            "experiment": "pi-exponent",
            "q_grid": "8, 16, 32",
            "witness": "a0+b0",
        }

    def test_unknown_key(self, tmp_path):
        """Test that the error names the offending line."""
        path = tmp_path / "run.txt"
        path.write_text("experiment = remodel\ncolour = blue\n", encoding="utf-8")
        with pytest.raises(ValueError, match=r":2: unknown key 'colour'"):
            load_run_file(path)

    def test_missing_equals(self, tmp_path):
        path = tmp_path / "run.txt"
        path.write_text("experiment remodel\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":1:"):
            load_run_file(path)

    def test_empty_value(self, tmp_path):
        path = tmp_path / "run.txt"
        path.write_text("seed =\n", encoding="utf-8")
        with pytest.raises(ValueError, match="empty value"):
            load_run_file(path)
