"""Tests for CLI module."""
import json
from unittest.mock import patch

import pytest

from cavitydetector.cli import create_parser, main
from cavitydetector.errors import QuadratureError

CONFIG = """
[run]
scenario = ratio_table
[cavity]
radius_ratios = 0.5
[detector]
gaps = 5.75, 20
[trajectory]
kind = galilean
values = 5e-4
[cutoffs]
radial = 4
longitudinal = 30
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(CONFIG, encoding="utf-8")
    return path


class TestCLIParser:
    """Test CLI argument parser."""

    def test_run_command(self):
        """Test run command parsing."""
        parser = create_parser()
        args = parser.parse_args(
            ["run", "--preset", "accelerated_ratio", "--cutoff-l", "5", "--tol", "1e-6"]
        )

        assert args.command == "run"
        assert args.preset == "accelerated_ratio"
        assert args.cutoff_l == 5
        assert args.tol == 1e-6
        assert args.config is None

    def test_short_preset_name(self):
        """Test that short preset names are accepted."""
        args = create_parser().parse_args(["run", "--preset", "table1"])
        assert args.preset == "table1"

    def test_config_and_preset_exclusive(self):
        """Test that --config and --preset cannot be combined."""
        parser = create_parser()
        with pytest.raises(SystemExit):
            parser.parse_args(["run", "--config", "a.ini", "--preset", "accelerated_ratio"])

    def test_unknown_preset(self):
        """Test that argparse rejects unknown preset names."""
        with pytest.raises(SystemExit):
            create_parser().parse_args(["run", "--preset", "nonexistent"])

    def test_no_command(self, capsys):
        """Test help and a usage exit code without a command."""
        assert main([]) == 2
        assert "usage" in capsys.readouterr().out


class TestPresetCommands:
    """Test preset listing commands."""

    def test_presets(self, capsys):
        """Test every preset is listed with its description."""
        assert main(["presets"]) == 0
        out = capsys.readouterr().out
        assert "accelerated_ratio" in out
        assert "thin_cavity_energy" in out
        assert "table1" in out
        assert "fig6" in out

    def test_show_preset(self, capsys):
        """Test printing a preset's configuration text."""
        assert main(["show-preset", "fibre_bound"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("[run]\nscenario = fibre\n")

    def test_show_unknown_preset(self, capsys):
        """Test a configuration error for a missing preset."""
        assert main(["show-preset", "nonexistent"]) == 2
        assert "unknown preset" in capsys.readouterr().err


class TestRunCommand:
    """Test the run command end to end."""

    def test_writes_csv(self, config_file, tmp_path):
        """Test a successful run writes the header and one row per sweep point."""
        out = tmp_path / "out.csv"
        assert main(["run", "--config", str(config_file), "--out", str(out)]) == 0

        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("# cavitydetector ")
        data = [line for line in lines if not line.startswith("#")]
        assert data[0].startswith("radius_ratio,gap,initial_state,parameter")
        assert len(data) == 1 + 2 * 2

    def test_byte_identical_reruns(self, config_file, tmp_path):
        """Test that the same configuration produces the same bytes."""
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["run", "--config", str(config_file), "--out", str(first)]) == 0
        assert main(["run", "--config", str(config_file), "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_json_and_overrides(self, config_file, tmp_path):
        """Test --format json and cutoff overrides."""
        out = tmp_path / "out.json"
        argv = ["run", "--config", str(config_file), "--out", str(out), "--format", "json"]
        assert main(argv + ["--cutoff-l", "2", "--cutoff-n", "10"]) == 0

        payload = json.loads(out.read_text(encoding="utf-8"))
        assert payload["scenario"] == "ratio_table"
        assert {row["cutoff_l"] for row in payload["rows"]} == {2}
        assert {row["cutoff_n"] for row in payload["rows"]} == {10}

    def test_stdout(self, config_file, capsys):
        """Test output to stdout when no path is configured."""
        assert main(["run", "--config", str(config_file)]) == 0
        assert capsys.readouterr().out.startswith("# cavitydetector ")

    def test_bad_config(self, tmp_path, capsys):
        """Test exit code 2, a keyed message and no output file."""
        path = tmp_path / "bad.ini"
        path.write_text(CONFIG.replace("gaps = 5.75, 20", "gaps = -1"), encoding="utf-8")
        out = tmp_path / "out.csv"

        assert main(["run", "--config", str(path), "--out", str(out)]) == 2
        assert "detector.gaps" in capsys.readouterr().err
        assert not out.exists()

    def test_bad_override(self, config_file, capsys):
        """Test that out-of-range overrides are configuration errors."""
        assert main(["run", "--config", str(config_file), "--cutoff-n", "0"]) == 2
        assert "cutoffs.longitudinal" in capsys.readouterr().err

    def test_quadrature_failure(self, config_file, tmp_path, capsys):
        """Test exit code 3 naming the failing cell."""
        error = QuadratureError("budget exhausted", estimate=1e-3).for_cell(1, 4)
        out = tmp_path / "out.csv"
        with patch("cavitydetector.cli.run_scenario", side_effect=error):
            code = main(["run", "--config", str(config_file), "--out", str(out)])

        assert code == 3
        assert "l=1, n=4" in capsys.readouterr().err
        assert not out.exists()
