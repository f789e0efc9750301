"""Tests for output module."""
import io
import json

import pytest

from cavitydetector import __version__
from cavitydetector.output import (
    format_value,
    header_lines,
    render,
    render_csv,
    render_json,
    write_result,
)
from cavitydetector.parser import Scenario, parse_config
from cavitydetector.scenarios import COLUMNS, ScenarioResult

CONFIG = """
[run]
scenario = nr_error
[cavity]
radius_ratios = 0.5
[detector]
gaps = 50
initial_states = excited
[trajectory]
kind = uniform_acceleration
values = 0.05
[cutoffs]
radial = 1
longitudinal = 2
"""


@pytest.fixture
def config(monkeypatch):
    monkeypatch.delenv("CAVITY_QUAD_TOL", raising=False)
    return parse_config(CONFIG)


@pytest.fixture
def result():
    result = ScenarioResult(scenario=Scenario.NR_ERROR, columns=COLUMNS[Scenario.NR_ERROR])
    result.rows.append((0.5, 50.0, "excited", 0.05, 1, 1, 0.1, True))
    result.rows.append((0.5, 50.0, "excited", 0.05, 1, 2, float("nan"), False))
    result.note("undefined_cells", 1.0)
    return result


class TestFormatValue:
    """Test CSV cell formatting."""

    @pytest.mark.parametrize(
        "value, text",
        [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (float("nan"), "nan"),
            (True, "true"),
            (False, "false"),
            (7, "7"),
            (None, ""),
            ("ground", "ground"),
        ],
    )
    def test_format(self, value, text):
        """Test 17 significant digits and the non-float cases."""
        assert format_value(value) == text


class TestCsv:
    """Test CSV rendering."""

    def test_header(self, config, result):
        """Test the version line, config echo and convergence block."""
        lines = header_lines(config, result)

        assert lines[0] == f"# cavitydetector {__version__}"
        assert "# scenario: nr_error" in lines
        assert "#   scenario = nr_error" in lines
        assert lines[-1] == "#   undefined_cells = 1"
        assert all(line.startswith("#") for line in lines)

    def test_rows(self, config, result):
        """Test column header and rows after the comment block."""
        text = render_csv(config, result)
        data = [line for line in text.splitlines() if not line.startswith("#")]

        assert data[0] == ",".join(COLUMNS[Scenario.NR_ERROR])
        assert data[1] == "0.5,50,excited,0.050000000000000003,1,1,0.10000000000000001,true"
        assert data[2].endswith(",nan,false")
        assert "\r" not in text
        assert text.endswith("\n")

    def test_deterministic(self, config, result):
        """Test that rendering twice gives identical text."""
        assert render(config, result) == render(config, result)


class TestJson:
    """Test JSON rendering."""

    def test_payload(self, config, result):
        """Test version, config text and null for NaN."""
        payload = json.loads(render_json(config, result))

        assert payload["version"] == __version__
        assert payload["scenario"] == "nr_error"
        assert parse_config(payload["config"]) == config
        assert payload["convergence"] == {"undefined_cells": 1.0}
        assert payload["rows"][0]["delta"] == 0.1
        assert payload["rows"][1]["delta"] is None
        assert payload["rows"][1]["defined"] is False

    def test_selected_by_format(self, config, result):
        """Test render follows the configured format."""
        json_config = parse_config(CONFIG.replace("[run]", "[run]\nformat = json"))
        assert render(json_config, result) == render_json(json_config, result)
        assert render(config, result) == render_csv(config, result)


class TestWriteResult:
    """Test writing to files and streams."""

    def test_file(self, config, result, tmp_path):
        """Test that missing directories are created and bytes match."""
        path = tmp_path / "nested" / "out.csv"
        write_result(config, result, path=path)

        assert path.read_bytes() == render_csv(config, result).encode("utf-8")

    def test_stream(self, config, result):
        """Test writing to a stream when no path is given."""
        stream = io.StringIO()
        write_result(config, result, stream=stream)
        assert stream.getvalue() == render_csv(config, result)
