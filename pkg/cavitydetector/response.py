"""Detector response: per-mode excitation numbers and the sums built from them.

A detector moving along the cavity axis only couples to m = 0 modes. For
mode (l, n) the first-order number expectation value is

    N_{l,n}/λ² = A²_{0ln} |∫₀^T dτ e^{±iΩτ} e^{iω t(τ)} sin(nπ z(τ)/L)|²

with the + sign for a detector starting in its ground state. All values
returned here are divided by λ².
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from .cavity import frequency_grid, normalization, normalization_grid, mode_frequency
from .errors import CavityError, DomainError, QuadratureError
from .models import (
    CavityGeometry,
    DetectorConfig,
    InitialState,
    ModeGrid,
    ModeIndex,
    RelativeErrorMap,
    TrajectoryKind,
    TrajectorySpec,
    TransitionProbability,
    ValidityReport,
)
from .quadrature import OscillatoryQuadrature, PhasePiece, QuadratureResult
from .specfun import bessel_j, bessel_zero, bessel_zeros, erf_difference
from .trajectory import crossing_time

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.02
# Relative width of the band around q² = b² handed to quadrature.
SINGULAR_WINDOW = 1e-6
# Cells with N below this are left out of the relative error map.
NUMBER_FLOOR = 1e-300


def _accelerated_piece(a: float, omega: float, k: float, gap: float, sigma: int) -> PhasePiece:
    def phase(tau):
        return (
            gap * tau
            + omega * np.sinh(a * tau) / a
            + sigma * k * 2.0 * np.sinh(0.5 * a * tau) ** 2 / a
        )

    def rate(tau):
        return gap + omega * np.cosh(a * tau) + sigma * k * np.sinh(a * tau)

    # θ'' = a (ω sinh + σ k cosh) vanishes only for σ = -1, at tanh(aτ) = k/ω.
    turning = (math.atanh(k / omega) / a,) if sigma < 0 and k < omega else ()
    return PhasePiece(phase, rate, turning, scale=1.0 / a)


def _galilean_piece(a: float, omega: float, k: float, gap: float, sigma: int) -> PhasePiece:
    linear = gap + omega

    def phase(tau):
        return linear * tau + sigma * 0.5 * k * a * tau * tau

    def rate(tau):
        return linear + sigma * k * a * tau

    return PhasePiece(phase, rate)


def _linear_piece(slope: float) -> PhasePiece:
    return PhasePiece(lambda tau: slope * tau, lambda tau: slope + 0.0 * tau)


def _pieces(
    spec: TrajectorySpec, omega: float, k: float, gap: float
) -> tuple[PhasePiece, PhasePiece]:
    if spec.kind is TrajectoryKind.UNIFORM_ACCELERATION:
        return (
            _accelerated_piece(spec.acceleration, omega, k, gap, +1),
            _accelerated_piece(spec.acceleration, omega, k, gap, -1),
        )
    if spec.kind is TrajectoryKind.GALILEAN:
        return (
            _galilean_piece(spec.acceleration, omega, k, gap, +1),
            _galilean_piece(spec.acceleration, omega, k, gap, -1),
        )
    gamma, v = spec.gamma, spec.velocity
    return (
        _linear_piece(gap + gamma * omega + gamma * v * k),
        _linear_piece(gap + gamma * omega - gamma * v * k),
    )


def mode_overlap(
    spec: TrajectorySpec,
    omega: float,
    n: int,
    signed_gap: float,
    length: float = 1.0,
    quadrature: Optional[OscillatoryQuadrature] = None,
) -> QuadratureResult:
    """∫₀^T e^{isΩτ} e^{iω t(τ)} sin(nπ z(τ)/L) dτ along ``spec``.

    ``signed_gap`` is sΩ (see :attr:`DetectorConfig.signed_gap`). The same
    integral serves the 3+1D modes and the 1+1D massive modes; only ω differs.
    """
    quadrature = quadrature or OscillatoryQuadrature()
    total = crossing_time(spec, length).proper_time
    k = n * math.pi / length
    plus, minus = _pieces(spec, omega, k, signed_gap)
    return quadrature.sine_transform(plus, minus, 0.0, total)


def number_expectation_accelerated(
    geom: CavityGeometry,
    det: DetectorConfig,
    a: float,
    l: int,
    n: int,
    quadrature: Optional[OscillatoryQuadrature] = None,
) -> float:
    """N_{l,n}/λ² for a uniformly accelerated crossing.

    Raises:
        QuadratureError: If the trajectory integral does not converge
    """
    idx = ModeIndex(0, l, n)
    spec = TrajectorySpec.uniform_acceleration(a)
    omega = mode_frequency(geom, idx)
    try:
        overlap = mode_overlap(spec, omega, n, det.signed_gap, geom.length, quadrature)
    except QuadratureError as e:
        raise e.for_cell(l, n) from e
    return normalization(geom, idx) ** 2 * abs(overlap.value) ** 2


def _constant_velocity_closed_form(
    geom: CavityGeometry,
    det: DetectorConfig,
    v: float,
    omega: np.ndarray,
    n: np.ndarray,
    j1: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Closed form on arrays; also returns the mask of the singular band."""
    L = geom.length
    gamma = TrajectorySpec.constant_velocity(v).gamma
    q = omega + det.signed_gap / gamma
    b = n * math.pi * v / L
    x = q * L / v
    # 1 + (-1)^{n+1} cos x written with half angles so zeros stay zeros.
    numerator = np.where(n % 2 == 1, 2.0 * np.cos(0.5 * x) ** 2, 2.0 * np.sin(0.5 * x) ** 2)
    denominator = (q - b) * (q + b)
    singular = np.abs(denominator) <= SINGULAR_WINDOW * np.maximum(q * q, b * b)
    prefactor = 2.0 * math.pi * (n * v) ** 2 / (omega * L**3 * (geom.radius * gamma * j1) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = prefactor * numerator / denominator**2
    return np.where(singular, np.nan, value), singular


def _constant_velocity_quadrature(
    geom: CavityGeometry,
    det: DetectorConfig,
    v: float,
    l: int,
    n: int,
    quadrature: Optional[OscillatoryQuadrature],
) -> float:
    idx = ModeIndex(0, l, n)
    spec = TrajectorySpec.constant_velocity(v)
    omega = mode_frequency(geom, idx)
    try:
        overlap = mode_overlap(spec, omega, n, det.signed_gap, geom.length, quadrature)
    except QuadratureError as e:
        raise e.for_cell(l, n) from e
    return normalization(geom, idx) ** 2 * abs(overlap.value) ** 2


def number_expectation_constant_velocity(
    geom: CavityGeometry,
    det: DetectorConfig,
    v: float,
    l: int,
    n: int,
    quadrature: Optional[OscillatoryQuadrature] = None,
) -> float:
    """N_{l,n}/λ² for a constant-velocity crossing, in closed form.

    Near the removable singularity (ω ± Ω/γ)² = (nπv̄/L)² the integral is
    evaluated by quadrature instead.
    """
    idx = ModeIndex(0, l, n)
    omega = np.array([mode_frequency(geom, idx)])
    j1 = np.array([bessel_j(1, bessel_zero(0, l))])
    value, singular = _constant_velocity_closed_form(geom, det, v, omega, np.array([n]), j1)
    if singular[0]:
        logger.debug(f"Mode ({l}, {n}) on the singular band; using quadrature")
        return _constant_velocity_quadrature(geom, det, v, l, n, quadrature)
    return float(value[0])


def constant_velocity_grid(
    geom: CavityGeometry,
    det: DetectorConfig,
    v: float,
    cutoffs: tuple[int, int],
    quadrature: Optional[OscillatoryQuadrature] = None,
) -> np.ndarray:
    """Closed-form N/λ² on the whole (l, n) block."""
    n_l, n_n = cutoffs
    omega = frequency_grid(geom, cutoffs)
    n = np.broadcast_to(np.arange(1, n_n + 1), (n_l, n_n))
    j1 = np.abs(bessel_j(1, bessel_zeros(0, n_l)))[:, None]
    number, singular = _constant_velocity_closed_form(geom, det, v, omega, n, j1)
    for il, jn in zip(*np.nonzero(singular)):
        number[il, jn] = _constant_velocity_quadrature(geom, det, v, il + 1, jn + 1, quadrature)
    if singular.any():
        logger.info(f"{int(singular.sum())} cells evaluated by quadrature near q = ±b")
    return number


def galilean_amplitude(
    k: np.ndarray, n: np.ndarray, a: float, length: float = 1.0
) -> np.ndarray:
    """D± for the Galilean worldline z = aτ²/2, t = τ, with k = ω ± Ω.

    D = (√L e^{iπ/4} / (2√(2an))) {
          e^{iθ} [erf(c (πanT - Lk)/√(πanL)) + erf(c Lk/√(πanL))]
        + i e^{-iθ} [erf(d (Lk + πanT)/√(πanL)) - erf(d Lk/√(πanL))] }

    with c = (1 + i)/2, d = (i - 1)/2, θ = Lk²/(2πan) and T = √(2L/a);
    |D| equals |∫₀^T e^{ikτ} sin(aπnτ²/(2L)) dτ|.
    """
    L = length
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    total = math.sqrt(2.0 * L / a)
    root = np.sqrt(math.pi * a * n * L)
    theta = L * k * k / (2.0 * math.pi * a * n)
    c = 0.5 * (1.0 + 1.0j)
    d = 0.5 * (1.0j - 1.0)
    sweep = math.pi * a * n * total
    first = erf_difference(c * (sweep - L * k) / root, -c * L * k / root)
    second = erf_difference(d * (L * k + sweep) / root, d * L * k / root)
    prefactor = math.sqrt(L) * np.exp(0.25j * math.pi) / (2.0 * np.sqrt(2.0 * a * n))
    return prefactor * (np.exp(1j * theta) * first + 1j * np.exp(-1j * theta) * second)


def number_expectation_galilean(
    geom: CavityGeometry, det: DetectorConfig, a: float, l: int, n: int
) -> float:
    """N_{l,n}/λ² ≈ |A_{0ln}|² |D±(l, n)|² for the Galilean worldline."""
    idx = ModeIndex(0, l, n)
    omega = mode_frequency(geom, idx)
    amplitude = galilean_amplitude(
        np.array([omega + det.signed_gap]), np.array([n]), a, geom.length
    )
    return float(normalization(geom, idx) ** 2 * np.abs(amplitude[0]) ** 2)


def galilean_grid(
    geom: CavityGeometry, det: DetectorConfig, a: float, cutoffs: tuple[int, int]
) -> np.ndarray:
    n_l, n_n = cutoffs
    omega = frequency_grid(geom, cutoffs)
    n = np.broadcast_to(np.arange(1, n_n + 1), (n_l, n_n))
    amplitude = galilean_amplitude(omega + det.signed_gap, n, a, geom.length)
    return normalization_grid(geom, cutoffs) ** 2 * np.abs(amplitude) ** 2


def _accelerated_row(task: tuple) -> np.ndarray:
    """One row l of the accelerated grid; top level so worker processes can run it."""
    radius, length, gap, state, a, l, n_n, rtol, atol, max_panels = task
    geom = CavityGeometry(radius=radius, length=length)
    det = DetectorConfig(gap=gap, initial_state=InitialState(state))
    quadrature = OscillatoryQuadrature(rtol=rtol, atol=atol, max_panels=max_panels)
    spec = TrajectorySpec.uniform_acceleration(a)
    omega = frequency_grid(geom, (l, n_n))[l - 1]
    row = np.empty(n_n)
    for jn in range(n_n):
        try:
            overlap = mode_overlap(
                spec, float(omega[jn]), jn + 1, det.signed_gap, length, quadrature
            )
        except QuadratureError as e:
            raise e.for_cell(l, jn + 1) from e
        row[jn] = abs(overlap.value) ** 2
    return row


def accelerated_grid(
    geom: CavityGeometry,
    det: DetectorConfig,
    a: float,
    cutoffs: tuple[int, int],
    quadrature: Optional[OscillatoryQuadrature] = None,
    workers: int = 1,
) -> np.ndarray:
    """N/λ² on the (l, n) block for a uniformly accelerated crossing.

    With ``workers > 1`` rows are distributed over a process pool; every
    cell is computed by the same code either way, so the result does not
    depend on the number of workers.
    """
    quadrature = quadrature or OscillatoryQuadrature()
    n_l, n_n = cutoffs
    tasks = [
        (
            geom.radius,
            geom.length,
            det.gap,
            det.initial_state.value,
            a,
            l,
            n_n,
            quadrature.rtol,
            quadrature.atol,
            quadrature.max_panels,
        )
        for l in range(1, n_l + 1)
    ]
    logger.info(f"Accelerated grid {n_l}x{n_n} (aL={a * geom.length:g}) on {workers} worker(s)")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_accelerated_row, tasks))
    else:
        rows = [_accelerated_row(task) for task in tasks]
    overlap = np.vstack(rows)
    return normalization_grid(geom, cutoffs) ** 2 * overlap


def number_expectation(
    geom: CavityGeometry,
    det: DetectorConfig,
    spec: TrajectorySpec,
    l: int,
    n: int,
    quadrature: Optional[OscillatoryQuadrature] = None,
) -> float:
    """N_{l,n}/λ² for any trajectory kind."""
    if spec.kind is TrajectoryKind.UNIFORM_ACCELERATION:
        return number_expectation_accelerated(geom, det, spec.acceleration, l, n, quadrature)
    if spec.kind is TrajectoryKind.CONSTANT_VELOCITY:
        return number_expectation_constant_velocity(geom, det, spec.velocity, l, n, quadrature)
    return number_expectation_galilean(geom, det, spec.acceleration, l, n)


def number_grid(
    geom: CavityGeometry,
    det: DetectorConfig,
    spec: TrajectorySpec,
    cutoffs: tuple[int, int],
    quadrature: Optional[OscillatoryQuadrature] = None,
    workers: int = 1,
) -> np.ndarray:
    _check_cutoffs(cutoffs)
    if spec.kind is TrajectoryKind.UNIFORM_ACCELERATION:
        return accelerated_grid(geom, det, spec.acceleration, cutoffs, quadrature, workers)
    if spec.kind is TrajectoryKind.CONSTANT_VELOCITY:
        return constant_velocity_grid(geom, det, spec.velocity, cutoffs, quadrature)
    return galilean_grid(geom, det, spec.acceleration, cutoffs)


def _check_cutoffs(cutoffs: tuple[int, ...]) -> None:
    if any(int(c) != c or c < 1 for c in cutoffs):
        raise DomainError(f"cutoffs must be positive integers, got {cutoffs}")


def resonance_mask(
    omega: np.ndarray, gap: float, threshold: float = DEFAULT_THRESHOLD
) -> np.ndarray:
    """Cells with |ω - Ω|/Ω <= threshold, or the single closest cell if none."""
    if not threshold > 0:
        raise DomainError(f"resonance threshold must be positive, got {threshold}")
    detuning = np.abs(omega - gap) / gap
    mask = detuning <= threshold
    if not mask.any():
        logger.debug(f"No mode within {threshold:.1%} of the gap; using the closest one")
        mask = np.zeros(omega.shape, dtype=bool)
        mask[np.unravel_index(int(np.argmin(detuning)), omega.shape)] = True
    return mask


def select_resonant(
    geom: CavityGeometry,
    det: DetectorConfig,
    cutoffs: tuple[int, int],
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[ModeIndex, ...]:
    """Modes within ``threshold`` of the gap (fractional), or the closest one."""
    _check_cutoffs(cutoffs)
    mask = resonance_mask(frequency_grid(geom, cutoffs), det.gap, threshold)
    return tuple(ModeIndex(0, int(il) + 1, int(jn) + 1) for il, jn in zip(*np.nonzero(mask)))


def mode_grid(
    geom: CavityGeometry,
    det: DetectorConfig,
    spec: TrajectorySpec,
    cutoffs: tuple[int, int],
    threshold: float = DEFAULT_THRESHOLD,
    quadrature: Optional[OscillatoryQuadrature] = None,
    workers: int = 1,
) -> ModeGrid:
    """Per-mode N, ω and resonance flags on the block l <= N_l, n <= N_n."""
    number = number_grid(geom, det, spec, cutoffs, quadrature, workers)
    omega = frequency_grid(geom, cutoffs)
    return ModeGrid(
        cutoffs=tuple(cutoffs),
        number=number,
        omega=omega,
        resonant=resonance_mask(omega, det.gap, threshold),
    )


def relative_error_map(
    geom: CavityGeometry,
    det: DetectorConfig,
    a: float,
    cutoffs: tuple[int, int],
    quadrature: Optional[OscillatoryQuadrature] = None,
    workers: int = 1,
) -> RelativeErrorMap:
    """Δ(l, n) = 1 - N_Galilean/N_accelerated.

    Cells whose accelerated value lies below 1e-300 are undefined (NaN).
    """
    exact = accelerated_grid(geom, det, a, cutoffs, quadrature, workers)
    approx = galilean_grid(geom, det, a, cutoffs)
    defined = exact >= NUMBER_FLOOR
    delta = np.full(exact.shape, np.nan)
    delta[defined] = 1.0 - approx[defined] / exact[defined]
    if not defined.all():
        logger.warning(f"{int((~defined).sum())} cells below the number floor left undefined")
    return RelativeErrorMap(cutoffs=tuple(cutoffs), delta=delta, defined=defined)


def tail_estimate(number: np.ndarray) -> float:
    """Share of the sum carried by the last row and column of the block."""
    total = float(np.sum(number))
    if total <= 0:
        return 0.0
    edge = float(np.sum(number[-1, :]) + np.sum(number[:, -1]) - number[-1, -1])
    return edge / total


def transition_probability(
    geom: CavityGeometry,
    det: DetectorConfig,
    spec: TrajectorySpec,
    cutoffs: tuple[int, int],
    quadrature: Optional[OscillatoryQuadrature] = None,
    workers: int = 1,
    grid: Optional[ModeGrid] = None,
) -> TransitionProbability:
    """P/λ² = Σ N_{l,n}/λ² over the block, with its tail estimate.

    Pass a precomputed ``grid`` to reuse the per-mode values.
    """
    number = grid.number if grid is not None else number_grid(
        geom, det, spec, cutoffs, quadrature, workers
    )
    return TransitionProbability(
        value=float(np.sum(number)),
        cutoffs=tuple(number.shape),
        tail_estimate=tail_estimate(number),
    )


def validity_from_numbers(
    number: np.ndarray,
    resonant: np.ndarray,
    threshold: Optional[float],
    branch: int = 1,
) -> ValidityReport:
    """ValidityReport from per-mode values and a resonance mask of the same shape."""
    p_total = float(np.sum(number))
    if not p_total > 0:
        raise CavityError("total transition probability vanished; ratio undefined")
    p_res = float(np.sum(number[resonant]))
    if number.ndim == 2:
        modes = tuple(
            ModeIndex(0, int(il) + 1, int(jn) + 1) for il, jn in zip(*np.nonzero(resonant))
        )
        tail = tail_estimate(number)
    else:
        # A 1+1D sum: a single branch, reported as l = branch.
        modes = tuple(ModeIndex(0, branch, int(jn) + 1) for jn in np.flatnonzero(resonant))
        tail = float(number[-1]) / p_total
    return ValidityReport(
        p_total=p_total,
        p_res=p_res,
        ratio=min(1.0, p_res / p_total),
        resonance_threshold=threshold,
        cutoffs=tuple(number.shape),
        tail_estimate=tail,
        resonant_modes=modes,
    )


def validity_ratio(
    geom: CavityGeometry,
    det: DetectorConfig,
    spec: TrajectorySpec,
    cutoffs: tuple[int, int],
    threshold: float = DEFAULT_THRESHOLD,
    quadrature: Optional[OscillatoryQuadrature] = None,
    workers: int = 1,
    grid: Optional[ModeGrid] = None,
) -> ValidityReport:
    """P_res/P for the resonant set of :func:`select_resonant`.

    P is truncated at the cutoffs, so the ratio is an upper bound.
    """
    if grid is None:
        grid = mode_grid(geom, det, spec, cutoffs, threshold, quadrature, workers)
    return validity_from_numbers(grid.number, grid.resonant, threshold)


def invisibility_gap(
    geom: CavityGeometry,
    v: float,
    l: int,
    n: int,
    m: int,
    initial_state: InitialState = InitialState.EXCITED,
) -> float:
    """Gap Ω at which mode (l, n) is invisible to a constant-velocity crossing.

    The closed form vanishes for (ω ± Ω/γ)L/v̄ = πm when m ≡ n (mod 2) and
    |m| ≠ n.

    Raises:
        DomainError: If m breaks the parity rule or no positive gap exists
    """
    if (m - n) % 2 != 0 or abs(m) == n:
        raise DomainError(f"m={m} gives no zero for n={n}; need m ≡ n (mod 2), |m| != n")
    gamma = TrajectorySpec.constant_velocity(v).gamma
    omega = mode_frequency(geom, ModeIndex(0, l, n))
    target = math.pi * m * v / geom.length
    gap = InitialState(initial_state).sign * gamma * (target - omega)
    if not gap > 0:
        raise DomainError(f"no positive gap puts mode ({l}, {n}) on the zero set with m={m}")
    return gap
