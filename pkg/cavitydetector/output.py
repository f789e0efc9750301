"""CSV and JSON emitters for scenario results.

Files are byte-stable: floats use 17 significant digits, line endings are
LF and nothing time dependent is written.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, TextIO, Union

from . import __version__
from .parser import OutputFormat, RunConfig
from .scenarios import ScenarioResult

logger = logging.getLogger(__name__)


def format_value(value) -> str:
    """Text form of one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def header_lines(config: RunConfig, result: ScenarioResult) -> list[str]:
    """The ``#`` comment block heading every CSV file."""
    lines = [f"cavitydetector {__version__}", f"scenario: {result.scenario.value}", "config:"]
    lines += [f"  {line}" for line in config.canonical_text().splitlines()]
    lines.append("convergence:")
    for key, value in sorted(result.convergence.items()):
        lines.append(f"  {key} = {format_value(value)}")
    return [f"# {line}".rstrip() for line in lines]


def render_csv(config: RunConfig, result: ScenarioResult) -> str:
    buffer = io.StringIO()
    for line in header_lines(config, result):
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


def render_json(config: RunConfig, result: ScenarioResult) -> str:
    """Single object ``{config, convergence, rows}``; NaN becomes null."""
    payload = {
        "version": __version__,
        "scenario": result.scenario.value,
        "config": config.canonical_text(),
        "convergence": {
            key: _json_value(value) for key, value in sorted(result.convergence.items())
        },
        "rows": [
            {column: _json_value(value) for column, value in zip(result.columns, row)}
            for row in result.rows
        ],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2, allow_nan=False) + "\n"


def render(config: RunConfig, result: ScenarioResult) -> str:
    if config.output_format is OutputFormat.JSON:
        return render_json(config, result)
    return render_csv(config, result)


def write_result(
    config: RunConfig,
    result: ScenarioResult,
    path: Optional[Union[str, Path]] = None,
    stream: Optional[TextIO] = None,
) -> None:
    """Write ``result`` to ``path`` (UTF-8, LF), or to ``stream``/stdout if no path.

    The text is rendered before the file is opened, so a failure never
    leaves a truncated file behind.
    """
    text = render(config, result)
    if path is None:
        (stream or sys.stdout).write(text)
        return
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    logger.info(f"Wrote {len(result.rows)} row(s) to {path}")
