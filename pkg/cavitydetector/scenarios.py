"""Table builders: one function per scenario, each turning a RunConfig into rows."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .models import (
    CavityGeometry,
    DetectorConfig,
    InitialState,
    Reduced1DField,
    TrajectoryKind,
    TrajectorySpec,
)
from .parser import RunConfig, Scenario
from .quadrature import OscillatoryQuadrature
from .reduced1d import (
    energy_map_3to1,
    energy_spectrum_1d,
    fibre_estimator,
    mode_frequency_1d,
    resonant_gap,
    resonant_ratio_1d,
)
from .response import mode_grid, relative_error_map, tail_estimate, validity_from_numbers
from .trajectory import matched_velocity

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ("radius_ratio", "gap", "initial_state", "parameter")

COLUMNS: dict[Scenario, tuple[str, ...]] = {
    Scenario.SPECTRUM: SWEEP_COLUMNS + ("l", "n", "omega", "number", "energy", "resonant"),
    Scenario.RATIO_TABLE: SWEEP_COLUMNS
    + ("cutoff_l", "cutoff_n", "p_total", "p_res", "ratio", "ratio_display", "tail", "n_resonant"),
    Scenario.NR_ERROR: SWEEP_COLUMNS + ("l", "n", "delta", "defined"),
    Scenario.FIBRE: SWEEP_COLUMNS
    + ("cutoff_l", "cutoff_n", "f_lower", "f_display", "p_branch1"),
    Scenario.TABLE_1D: (
        "mass",
        "gap",
        "initial_state",
        "parameter",
        "cutoff_n",
        "p_total",
        "p_res",
        "ratio",
        "ratio_display",
        "tail",
        "n_resonant",
    ),
    Scenario.FIBRE_ENERGY: SWEEP_COLUMNS + ("l", "n", "e3", "e1_mapped", "e1_massless"),
}


@dataclass(frozen=True)
class SweepPoint:
    """One parameter combination of a sweep.

    ``gap`` is None when the gap is the one resonant with the lowest mode;
    ``mass`` is only set for the 1+1D table.
    """
    radius: Optional[float]
    gap: Optional[float]
    state: InitialState
    value: float
    cutoffs: tuple[int, int]
    mass: Optional[float] = None


@dataclass
class ScenarioResult:
    """Rows of one scenario plus the convergence estimates reported in the header."""
    scenario: Scenario
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    convergence: dict[str, float] = field(default_factory=dict)

    def note(self, key: str, value: float) -> None:
        """Keep the worst (largest) value seen for a convergence estimate."""
        if np.isfinite(value):
            self.convergence[key] = max(self.convergence.get(key, float("-inf")), float(value))


def display(value: float) -> str:
    """Rounded text for table display: two decimals, scientific below 0.01, four digits from 10."""
    if not np.isfinite(value):
        return ""
    if value != 0 and abs(value) < 0.01:
        return f"{value:.1e}"
    return f"{value:.2f}" if abs(value) < 10 else f"{value:.4g}"


def sweep_points(config: RunConfig) -> Iterator[SweepPoint]:
    """Parameter combinations in output order.

    Product sweeps run radius, gap, initial state, value, N_l, N_n from the
    outermost loop in; paired sweeps zip the lists (length-one lists repeat)
    and loop over initial states inside. The 1+1D table always pairs masses
    with gaps.
    """
    if config.scenario is Scenario.TABLE_1D:
        for (mass, gap), state, value, n_n in itertools.product(
            zip(config.masses, config.gaps),
            config.initial_states,
            config.values,
            config.longitudinal_cutoffs,
        ):
            yield SweepPoint(None, gap, state, value, (1, n_n), mass)
        return

    if config.sweep == "paired":
        lists = (
            config.radius_ratios,
            config.gaps,
            config.values,
            config.radial_cutoffs,
            config.longitudinal_cutoffs,
        )
        size = max(len(items) for items in lists)
        for i in range(size):
            radius, gap, value, n_l, n_n = (items[i if len(items) > 1 else 0] for items in lists)
            for state in config.initial_states:
                yield SweepPoint(radius, gap, state, value, (n_l, n_n))
        return

    for radius, gap, state, value, n_l, n_n in itertools.product(
        config.radius_ratios,
        config.gaps,
        config.initial_states,
        config.values,
        config.radial_cutoffs,
        config.longitudinal_cutoffs,
    ):
        yield SweepPoint(radius, gap, state, value, (n_l, n_n))


def trajectory_for(config: RunConfig, value: float) -> TrajectorySpec:
    """Worldline for one kinematic value; matched velocities convert aL first."""
    if config.kind is TrajectoryKind.CONSTANT_VELOCITY:
        velocity = matched_velocity(value) if config.matched else value
        return TrajectorySpec.constant_velocity(velocity)
    if config.kind is TrajectoryKind.GALILEAN:
        return TrajectorySpec.galilean(value)
    return TrajectorySpec.uniform_acceleration(value)


def _setup(point: SweepPoint) -> tuple[CavityGeometry, DetectorConfig]:
    geom = CavityGeometry(radius=point.radius)
    gap = resonant_gap(geom) if point.gap is None else point.gap
    return geom, DetectorConfig(gap=gap, initial_state=point.state)


def _sweep_row(point: SweepPoint, det: DetectorConfig, spec: TrajectorySpec) -> tuple:
    return (point.radius, det.gap, point.state.value, spec.parameter)


def _spectrum(config, point, quadrature, result) -> None:
    geom, det = _setup(point)
    spec = trajectory_for(config, point.value)
    grid = mode_grid(geom, det, spec, point.cutoffs, config.threshold, quadrature, config.workers)
    omega = grid.omega
    head = _sweep_row(point, det, spec)
    for l, n, number, energy, resonant in grid.cells():
        result.rows.append(head + (l, n, float(omega[l - 1, n - 1]), number, energy, resonant))
    result.note("max_tail_estimate", tail_estimate(grid.number))
    peak = grid.peak()
    logger.info(
        f"{point.state.value} {spec.kind.value}={spec.parameter:g}: peak at (l, n) = {peak}"
    )


def _ratio_table(config, point, quadrature, result) -> None:
    geom, det = _setup(point)
    spec = trajectory_for(config, point.value)
    grid = mode_grid(geom, det, spec, point.cutoffs, config.threshold, quadrature, config.workers)
    report = validity_from_numbers(grid.number, grid.resonant, config.threshold)
    result.rows.append(
        _sweep_row(point, det, spec)
        + (
            point.cutoffs[0],
            point.cutoffs[1],
            report.p_total,
            report.p_res,
            report.ratio,
            display(report.ratio),
            report.tail_estimate,
            len(report.resonant_modes),
        )
    )
    result.note("max_tail_estimate", report.tail_estimate)


def _nr_error(config, point, quadrature, result) -> None:
    geom, det = _setup(point)
    spec = trajectory_for(config, point.value)
    error_map = relative_error_map(
        geom, det, spec.acceleration, point.cutoffs, quadrature, config.workers
    )
    head = _sweep_row(point, det, spec)
    for l, n, delta, defined in error_map.cells():
        result.rows.append(head + (l, n, delta, defined))
    result.note("undefined_cells", float(np.count_nonzero(~error_map.defined)))


def _fibre(config, point, quadrature, result) -> None:
    geom, det = _setup(point)
    spec = trajectory_for(config, point.value)
    n_l, n_n = point.cutoffs
    estimate = fibre_estimator(geom, det, spec.velocity, n_l, n_n, config.extrapolate)
    probabilities = estimate.branch_probabilities
    result.rows.append(
        _sweep_row(point, det, spec)
        + (n_l, n_n, estimate.f_lower, display(estimate.f_lower), probabilities[0])
    )
    # Share of the last branch: how much F still moves with N_l.
    if n_l > 1 and estimate.f_lower > 0:
        result.note("max_last_branch_share", probabilities[-1] / sum(probabilities[1:]))


def _table_1d(config, point, quadrature, result) -> None:
    field_1d = Reduced1DField(mass=point.mass)
    gap = mode_frequency_1d(field_1d, 1) if point.gap is None else point.gap
    det = DetectorConfig(gap=gap, initial_state=point.state)
    spec = trajectory_for(config, point.value)
    threshold = config.threshold if config.selection == "window" else None
    n_n = point.cutoffs[1]
    report = resonant_ratio_1d(field_1d, det, spec, n_n, threshold, quadrature)
    result.rows.append(
        (
            point.mass,
            det.gap,
            point.state.value,
            spec.parameter,
            n_n,
            report.p_total,
            report.p_res,
            report.ratio,
            display(report.ratio),
            report.tail_estimate,
            len(report.resonant_modes),
        )
    )
    result.note("max_tail_estimate", report.tail_estimate)


def _fibre_energy(config, point, quadrature, result) -> None:
    geom, det = _setup(point)
    spec = trajectory_for(config, point.value)
    n_l, n_n = point.cutoffs
    grid = mode_grid(geom, det, spec, point.cutoffs, config.threshold, quadrature, config.workers)
    _, _, massless = energy_spectrum_1d(Reduced1DField(mass=0.0), det, spec, n_n, quadrature)
    head = _sweep_row(point, det, spec)
    energy = grid.energy
    for l in range(1, n_l + 1):
        mapped = energy_map_3to1(energy[l - 1], l, geom.radius)
        for jn in range(n_n):
            result.rows.append(
                head + (l, jn + 1, float(energy[l - 1, jn]), float(mapped[jn]), float(massless[jn]))
            )
    total = float(np.sum(grid.number))
    if total > 0:
        result.note("max_tail_estimate", float(np.sum(grid.number[:, -1])) / total)


BUILDERS = {
    Scenario.SPECTRUM: _spectrum,
    Scenario.RATIO_TABLE: _ratio_table,
    Scenario.NR_ERROR: _nr_error,
    Scenario.FIBRE: _fibre,
    Scenario.TABLE_1D: _table_1d,
    Scenario.FIBRE_ENERGY: _fibre_energy,
}


def run_scenario(config: RunConfig) -> ScenarioResult:
    """Evaluate every sweep point of ``config``.

    Returns:
        Rows in sweep order, with the convergence estimates

    Raises:
        QuadratureError: If a trajectory integral fails; the error names the cell
        DomainError: If a sweep point lies outside the model's domain
    """
    quadrature = OscillatoryQuadrature(rtol=config.tolerance, max_panels=config.max_panels)
    result = ScenarioResult(scenario=config.scenario, columns=COLUMNS[config.scenario])
    builder = BUILDERS[config.scenario]
    points = list(sweep_points(config))
    logger.info(f"Running {config.scenario.value} over {len(points)} sweep point(s)")
    for i, point in enumerate(points, start=1):
        logger.debug(f"Sweep point {i}/{len(points)}: {point}")
        builder(config, point, quadrature, result)
    return result
