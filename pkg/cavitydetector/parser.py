"""Parsing of run configuration text.

A configuration is INI text with flat sections. Lists are comma separated.

    [run]
    scenario = spectrum | ratio_table | nr_error | fibre | table_1d | fibre_energy
    format = csv | json                      (default csv)
    output = path                            (default: stdout)
    sweep = product | paired                 (default product)

    [cavity]
    radius_ratios = 0.5, 0.25                ρ/L

    [detector]
    gaps = 20 | resonant                     ΩL; "resonant" picks ω(1, 1)
    initial_states = excited | ground | both (default both)

    [trajectory]
    kind = uniform_acceleration | constant_velocity | galilean
    values = 5e-5, 0.5                       aL, or v̄ for constant velocity
    matched = false                          values are aL, converted to v̄

    [cutoffs]
    radial = 200                             N_l
    longitudinal = 10000                     N_n

    [numerics]
    threshold = 0.02                         resonance window (fraction of Ω)
    tolerance = 1e-8                         quadrature rtol ($CAVITY_QUAD_TOL)
    max_panels = 20000
    workers = 1                              ($CAVITY_WORKERS)
    extrapolate = false                      tail extrapolation of branch sums

    [reduced]
    masses = 0, 2.41                         mL, paired with [detector] gaps
    selection = closest | window             (default closest)

Unknown sections or keys, duplicates and out-of-range values raise
ConfigError naming the ``section.key`` path.
"""
from __future__ import annotations

import configparser
import logging
import math
import os
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .errors import ConfigError
from .models import InitialState, TrajectoryKind

logger = logging.getLogger(__name__)


class Scenario(str, Enum):
    SPECTRUM = "spectrum"
    RATIO_TABLE = "ratio_table"
    NR_ERROR = "nr_error"
    FIBRE = "fibre"
    TABLE_1D = "table_1d"
    FIBRE_ENERGY = "fibre_energy"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


ALLOWED_KEYS: dict[str, tuple[str, ...]] = {
    "run": ("scenario", "format", "output", "sweep"),
    "cavity": ("radius_ratios",),
    "detector": ("gaps", "initial_states"),
    "trajectory": ("kind", "values", "matched"),
    "cutoffs": ("radial", "longitudinal"),
    "numerics": ("threshold", "tolerance", "max_panels", "workers", "extrapolate"),
    "reduced": ("masses", "selection"),
}

DEFAULT_THRESHOLD = 0.02
DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_PANELS = 20000

# (N_l, N_n) when [cutoffs] is absent.
DEFAULT_CUTOFFS = {
    Scenario.FIBRE: (50, 100_000),
    Scenario.TABLE_1D: (1, 2000),
}
FULL_CUTOFFS = (200, 10_000)


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration.

    ``gaps`` entries of None stand for the gap resonant with the lowest mode.
    """
    scenario: Scenario
    radius_ratios: tuple[float, ...] = ()
    gaps: tuple[Optional[float], ...] = ()
    initial_states: tuple[InitialState, ...] = (InitialState.EXCITED, InitialState.GROUND)
    kind: TrajectoryKind = TrajectoryKind.UNIFORM_ACCELERATION
    values: tuple[float, ...] = ()
    matched: bool = False
    radial_cutoffs: tuple[int, ...] = (FULL_CUTOFFS[0],)
    longitudinal_cutoffs: tuple[int, ...] = (FULL_CUTOFFS[1],)
    threshold: float = DEFAULT_THRESHOLD
    tolerance: float = DEFAULT_TOLERANCE
    max_panels: int = DEFAULT_MAX_PANELS
    workers: int = 1
    extrapolate: bool = False
    masses: tuple[float, ...] = ()
    selection: str = "closest"
    output_format: OutputFormat = OutputFormat.CSV
    output: Optional[str] = None
    sweep: str = "product"

    def canonical_text(self) -> str:
        """INI text that parses back to this configuration."""
        def floats(values) -> str:
            return ", ".join("resonant" if v is None else repr(float(v)) for v in values)

        lines = [
            "[run]",
            f"scenario = {self.scenario.value}",
            f"format = {self.output_format.value}",
            f"sweep = {self.sweep}",
        ]
        if self.output:
            lines.append(f"output = {self.output}")
        if self.radius_ratios:
            lines += ["[cavity]", f"radius_ratios = {floats(self.radius_ratios)}"]
        lines += [
            "[detector]",
            f"gaps = {floats(self.gaps)}",
            f"initial_states = {', '.join(s.value for s in self.initial_states)}",
            "[trajectory]",
            f"kind = {self.kind.value}",
            f"values = {floats(self.values)}",
            f"matched = {str(self.matched).lower()}",
            "[cutoffs]",
            f"radial = {', '.join(str(c) for c in self.radial_cutoffs)}",
            f"longitudinal = {', '.join(str(c) for c in self.longitudinal_cutoffs)}",
            "[numerics]",
            f"threshold = {self.threshold!r}",
            f"tolerance = {self.tolerance!r}",
            f"max_panels = {self.max_panels}",
            f"workers = {self.workers}",
            f"extrapolate = {str(self.extrapolate).lower()}",
        ]
        if self.masses:
            lines += [
                "[reduced]",
                f"masses = {floats(self.masses)}",
                f"selection = {self.selection}",
            ]
        return "\n".join(lines) + "\n"


def _split(raw: str, key: str) -> list[str]:
    items = [item.strip() for item in raw.split(",")]
    if not items or any(not item for item in items):
        raise ConfigError("empty list or list entry", key)
    return items


def _float(text: str, key: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", key) from None
    if not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {text!r}", key)
    return value


def _int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", key) from None


def _bool(text: str, key: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"expected true or false, got {text!r}", key)


def _positive_floats(raw: str, key: str, allow_zero: bool = False) -> tuple[float, ...]:
    values = tuple(_float(item, key) for item in _split(raw, key))
    for value in values:
        if value < 0 or (value == 0 and not allow_zero):
            bound = ">= 0" if allow_zero else "positive"
            raise ConfigError(f"values must be {bound}, got {value}", key)
    return values


def _choice(enum, text: str, key: str):
    try:
        return enum(text.strip().lower())
    except ValueError:
        options = ", ".join(member.value for member in enum)
        raise ConfigError(f"unknown value {text!r} (expected one of: {options})", key) from None


def env_default(name: str, convert, fallback):
    """Environment override for a numeric default (``.env`` is loaded at import)."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return fallback
    try:
        return convert(raw)
    except ValueError:
        raise ConfigError(f"invalid value {raw!r}", f"env.{name}") from None


def _read(text: str) -> configparser.ConfigParser:
    reader = configparser.ConfigParser(
        strict=True,
        interpolation=None,
        inline_comment_prefixes=("#", ";"),
        empty_lines_in_values=False,
    )
    try:
        reader.read_string(text, source="<config>")
    except configparser.Error as e:
        raise ConfigError(str(e).replace("\n", " ")) from None
    for section in reader.sections():
        if section not in ALLOWED_KEYS:
            raise ConfigError("unknown section", section)
        for key in reader[section]:
            if key not in ALLOWED_KEYS[section]:
                raise ConfigError("unknown key", f"{section}.{key}")
    return reader


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Args:
        text: INI configuration (see module docstring for the grammar)

    Returns:
        A fully validated RunConfig

    Raises:
        ConfigError: On any syntax, type or range problem
    """
    reader = _read(text)

    def get(section: str, key: str) -> Optional[str]:
        if reader.has_option(section, key):
            return reader.get(section, key)
        return None

    raw_scenario = get("run", "scenario")
    if raw_scenario is None:
        raise ConfigError("missing required key", "run.scenario")
    scenario = _choice(Scenario, raw_scenario, "run.scenario")
    settings: dict = {"scenario": scenario}

    if (raw := get("run", "format")) is not None:
        settings["output_format"] = _choice(OutputFormat, raw, "run.format")
    if (raw := get("run", "output")) is not None:
        settings["output"] = raw.strip() or None
    if (raw := get("run", "sweep")) is not None:
        if raw.strip().lower() not in ("product", "paired"):
            raise ConfigError(f"unknown value {raw!r} (expected product or paired)", "run.sweep")
        settings["sweep"] = raw.strip().lower()

    # Cavity and detector.
    if scenario is not Scenario.TABLE_1D:
        raw = get("cavity", "radius_ratios")
        if raw is None:
            raise ConfigError("missing required key", "cavity.radius_ratios")
        settings["radius_ratios"] = _positive_floats(raw, "cavity.radius_ratios")

    raw = get("detector", "gaps")
    if raw is None:
        raise ConfigError("missing required key", "detector.gaps")
    gaps: list[Optional[float]] = []
    for item in _split(raw, "detector.gaps"):
        if item.lower() == "resonant":
            gaps.append(None)
            continue
        gap = _float(item, "detector.gaps")
        if gap <= 0:
            raise ConfigError(f"gaps must be positive, got {gap}", "detector.gaps")
        gaps.append(gap)
    settings["gaps"] = tuple(gaps)

    if (raw := get("detector", "initial_states")) is not None:
        states: list[InitialState] = []
        for item in _split(raw, "detector.initial_states"):
            if item.lower() == "both":
                states.extend([InitialState.EXCITED, InitialState.GROUND])
            else:
                states.append(_choice(InitialState, item, "detector.initial_states"))
        settings["initial_states"] = tuple(dict.fromkeys(states))
    elif scenario is Scenario.FIBRE:
        settings["initial_states"] = (InitialState.GROUND,)

    # Trajectory.
    raw = get("trajectory", "kind")
    if raw is None:
        raise ConfigError("missing required key", "trajectory.kind")
    kind = _choice(TrajectoryKind, raw, "trajectory.kind")
    settings["kind"] = kind
    raw = get("trajectory", "values")
    if raw is None:
        raise ConfigError("missing required key", "trajectory.values")
    values = _positive_floats(raw, "trajectory.values")
    matched = _bool(get("trajectory", "matched") or "false", "trajectory.matched")
    if matched and kind is not TrajectoryKind.CONSTANT_VELOCITY:
        raise ConfigError(
            "only constant_velocity trajectories can be matched", "trajectory.matched"
        )
    if kind is TrajectoryKind.CONSTANT_VELOCITY and not matched:
        if any(v >= 1.0 for v in values):
            raise ConfigError("velocities must lie in (0, 1)", "trajectory.values")
    settings["values"] = values
    settings["matched"] = matched

    if scenario is Scenario.NR_ERROR and kind is not TrajectoryKind.UNIFORM_ACCELERATION:
        raise ConfigError("nr_error compares against uniform_acceleration", "trajectory.kind")
    if scenario is Scenario.FIBRE and kind is not TrajectoryKind.CONSTANT_VELOCITY:
        raise ConfigError("fibre needs constant_velocity", "trajectory.kind")

    # Cutoffs.
    default_l, default_n = DEFAULT_CUTOFFS.get(scenario, FULL_CUTOFFS)
    for key, default, target in (
        ("radial", default_l, "radial_cutoffs"),
        ("longitudinal", default_n, "longitudinal_cutoffs"),
    ):
        raw = get("cutoffs", key)
        items = (default,) if raw is None else tuple(
            _int(item, f"cutoffs.{key}") for item in _split(raw, f"cutoffs.{key}")
        )
        if any(item < 1 for item in items):
            raise ConfigError("cutoffs must be >= 1", f"cutoffs.{key}")
        settings[target] = items

    # Numerics.
    raw = get("numerics", "threshold")
    threshold = DEFAULT_THRESHOLD if raw is None else _float(raw, "numerics.threshold")
    if threshold <= 0:
        raise ConfigError(f"threshold must be positive, got {threshold}", "numerics.threshold")
    settings["threshold"] = threshold

    raw = get("numerics", "tolerance")
    tolerance = (
        env_default("CAVITY_QUAD_TOL", float, DEFAULT_TOLERANCE)
        if raw is None
        else _float(raw, "numerics.tolerance")
    )
    if not 0 < tolerance < 1:
        raise ConfigError(f"tolerance must lie in (0, 1), got {tolerance}", "numerics.tolerance")
    settings["tolerance"] = tolerance

    raw = get("numerics", "max_panels")
    max_panels = DEFAULT_MAX_PANELS if raw is None else _int(raw, "numerics.max_panels")
    if max_panels < 1:
        raise ConfigError("max_panels must be >= 1", "numerics.max_panels")
    settings["max_panels"] = max_panels

    raw = get("numerics", "workers")
    workers = (
        env_default("CAVITY_WORKERS", int, 1) if raw is None else _int(raw, "numerics.workers")
    )
    if workers < 1:
        raise ConfigError("workers must be >= 1", "numerics.workers")
    settings["workers"] = workers

    raw = get("numerics", "extrapolate") or "false"
    settings["extrapolate"] = _bool(raw, "numerics.extrapolate")

    # Reduced model.
    if scenario is Scenario.TABLE_1D:
        raw = get("reduced", "masses")
        if raw is None:
            raise ConfigError("missing required key", "reduced.masses")
        masses = _positive_floats(raw, "reduced.masses", allow_zero=True)
        if len(masses) != len(settings["gaps"]):
            raise ConfigError(
                f"{len(masses)} masses but {len(settings['gaps'])} gaps; they are paired",
                "reduced.masses",
            )
        settings["masses"] = masses
    elif get("reduced", "masses") is not None:
        raise ConfigError("only used by the table_1d scenario", "reduced.masses")
    if (raw := get("reduced", "selection")) is not None:
        if raw.strip().lower() not in ("closest", "window"):
            raise ConfigError(
                f"unknown value {raw!r} (expected closest or window)", "reduced.selection"
            )
        settings["selection"] = raw.strip().lower()

    if settings.get("sweep") == "paired":
        _check_paired(settings)

    config = RunConfig(**settings)
    logger.debug(f"Parsed {scenario.value} configuration")
    return config


def _check_paired(settings: dict) -> None:
    """Paired sweeps zip lists; every list must have the same length or length one."""
    keys = {
        "cavity.radius_ratios": settings.get("radius_ratios", ()),
        "detector.gaps": settings.get("gaps", ()),
        "trajectory.values": settings.get("values", ()),
        "cutoffs.radial": settings.get("radial_cutoffs", ()),
        "cutoffs.longitudinal": settings.get("longitudinal_cutoffs", ()),
    }
    lengths = {len(v) for v in keys.values() if len(v) > 1}
    if len(lengths) > 1:
        key = next(k for k, v in keys.items() if len(v) > 1 and len(v) != max(lengths))
        raise ConfigError("paired sweeps need lists of equal length", key)


def load_config(path: str) -> RunConfig:
    """Read and parse a configuration file."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigError(f"cannot read configuration: {e}") from None
    return parse_config(text)


def apply_overrides(
    config: RunConfig,
    cutoff_l: Optional[int] = None,
    cutoff_n: Optional[int] = None,
    tolerance: Optional[float] = None,
    workers: Optional[int] = None,
    output_format: Optional[str] = None,
    output: Optional[str] = None,
) -> RunConfig:
    """Command-line overrides on top of a parsed configuration.

    Raises:
        ConfigError: If an override is out of range
    """
    changes: dict = {}
    if cutoff_l is not None:
        if cutoff_l < 1:
            raise ConfigError("cutoffs must be >= 1", "cutoffs.radial")
        changes["radial_cutoffs"] = (cutoff_l,)
    if cutoff_n is not None:
        if cutoff_n < 1:
            raise ConfigError("cutoffs must be >= 1", "cutoffs.longitudinal")
        changes["longitudinal_cutoffs"] = (cutoff_n,)
    if tolerance is not None:
        if not 0 < tolerance < 1:
            raise ConfigError(
                f"tolerance must lie in (0, 1), got {tolerance}", "numerics.tolerance"
            )
        changes["tolerance"] = tolerance
    if workers is not None:
        if workers < 1:
            raise ConfigError("workers must be >= 1", "numerics.workers")
        changes["workers"] = workers
    if output_format is not None:
        changes["output_format"] = _choice(OutputFormat, output_format, "run.format")
    if output is not None:
        changes["output"] = output
    if not changes:
        return config
    logger.debug(f"Command-line overrides: {sorted(changes)}")
    return replace(config, **changes)
