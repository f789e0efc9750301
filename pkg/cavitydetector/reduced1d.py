"""1+1D reduction of the cylindrical cavity.

On the axis the radial factor of a 3+1D mode is constant, so each radial
branch l behaves as a 1+1D field of mass m̃ = x_{0l}/ρ with modes

    ũ_n(z, t) = e^{-iω̃t} sin(nπz/L) / sqrt(ω̃L),   ω̃ = sqrt(m̃² + (nπ/L)²)

and ũ_n = sqrt(π) |J₁(x_{0l})| ρ · u_{0ln}(r=0). Branch-l probabilities and
energies therefore differ from the 3+1D ones by π J₁(x_{0l})² ρ².
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from .errors import DomainError, QuadratureError
from .models import (
    CavityGeometry,
    DetectorConfig,
    FibreEstimate,
    Reduced1DField,
    TrajectoryKind,
    TrajectorySpec,
    ValidityReport,
)
from .quadrature import OscillatoryQuadrature
from .response import (
    SINGULAR_WINDOW,
    galilean_amplitude,
    mode_overlap,
    validity_from_numbers,
)
from .specfun import bessel_j, bessel_zero

logger = logging.getLogger(__name__)

# Terms summed per vectorized block in the branch sums.
CHUNK = 1_000_000


def branch_field(geom: CavityGeometry, l: int) -> Reduced1DField:
    """The 1+1D field carried by radial branch l of ``geom``."""
    omega0 = bessel_zero(0, 1) / geom.radius
    mass = omega0 * bessel_zero(0, l) / bessel_zero(0, 1)
    return Reduced1DField(mass=mass, length=geom.length, branch=l, omega0=omega0)


def resonant_gap(geom: CavityGeometry) -> float:
    """Gap resonant with the lowest on-axis mode (l, n) = (1, 1)."""
    return math.hypot(bessel_zero(0, 1) / geom.radius, math.pi / geom.length)


def mode_frequency_1d(field: Reduced1DField, n):
    """ω̃_n = sqrt(m̃² + (nπ/L)²); ``n`` may be an array."""
    n_arr = np.asarray(n)
    if np.any(n_arr < 1):
        raise DomainError("longitudinal number n must be >= 1")
    value = np.hypot(field.mass, n_arr * math.pi / field.length)
    if np.ndim(value) == 0:
        return float(value)
    return value


def mode_function_1d(field: Reduced1DField, n: int, z, t):
    """ũ_n(z, t).

    Raises:
        DomainError: If z lies outside [0, L]
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > field.length):
        raise DomainError(f"longitudinal coordinate outside [0, {field.length}]")
    omega = mode_frequency_1d(field, n)
    value = (
        np.exp(-1j * omega * np.asarray(t))
        * np.sin(n * math.pi * z / field.length)
        / math.sqrt(omega * field.length)
    )
    if np.ndim(value) == 0:
        return complex(value)
    return value


def reduction_factor(geom: CavityGeometry, l: int) -> float:
    """sqrt(π) |J₁(x_{0l})| ρ, the ratio ũ_n / u_{0ln} on the axis."""
    return math.sqrt(math.pi) * abs(bessel_j(1, bessel_zero(0, l))) * geom.radius


def energy_map_3to1(energy, l: int, radius: float):
    """Ẽ^{1+1} = π J₁(x_{0l})² ρ² E^{3+1}."""
    if l < 1:
        raise DomainError(f"branch l must be >= 1, got {l}")
    return math.pi * bessel_j(1, bessel_zero(0, l)) ** 2 * radius**2 * energy


def energy_map_1to3(energy, l: int, radius: float):
    """Inverse of :func:`energy_map_3to1`."""
    if l < 1:
        raise DomainError(f"branch l must be >= 1, got {l}")
    return energy / (math.pi * bessel_j(1, bessel_zero(0, l)) ** 2 * radius**2)


def _constant_velocity_terms(
    field: Reduced1DField, det: DetectorConfig, v: float, n: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    L = field.length
    gamma = TrajectorySpec.constant_velocity(v).gamma
    omega = np.hypot(field.mass, n * math.pi / L)
    q = omega + det.signed_gap / gamma
    b = n * math.pi * v / L
    x = q * L / v
    numerator = np.where(n % 2 == 1, 2.0 * np.cos(0.5 * x) ** 2, 2.0 * np.sin(0.5 * x) ** 2)
    denominator = (q - b) * (q + b)
    singular = np.abs(denominator) <= SINGULAR_WINDOW * np.maximum(q * q, b * b)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = 2.0 * b * b * numerator / (gamma**2 * denominator**2 * omega * L)
    return np.where(singular, np.nan, value), singular


def number_expectation_1d(
    field: Reduced1DField,
    det: DetectorConfig,
    spec: TrajectorySpec,
    n: int,
    quadrature: Optional[OscillatoryQuadrature] = None,
) -> float:
    """Ñ_n/λ² = |∫₀^T e^{±iΩτ} ũ_n*(z(τ), t(τ)) dτ|²."""
    return float(number_spectrum_1d(field, det, spec, n, quadrature, first=n)[0])


def number_spectrum_1d(
    field: Reduced1DField,
    det: DetectorConfig,
    spec: TrajectorySpec,
    n_max: int,
    quadrature: Optional[OscillatoryQuadrature] = None,
    first: int = 1,
) -> np.ndarray:
    """Ñ_n/λ² for n = first..n_max."""
    if n_max < first or first < 1:
        raise DomainError(f"need 1 <= first <= n_max, got {first}, {n_max}")
    n = np.arange(first, n_max + 1)
    omega = mode_frequency_1d(field, n)
    if spec.kind is TrajectoryKind.CONSTANT_VELOCITY:
        number, singular = _constant_velocity_terms(field, det, spec.velocity, n)
        todo = np.flatnonzero(singular)
    elif spec.kind is TrajectoryKind.GALILEAN:
        amplitude = galilean_amplitude(omega + det.signed_gap, n, spec.acceleration, field.length)
        return np.abs(amplitude) ** 2 / (omega * field.length)
    else:
        number = np.empty(n.size)
        todo = np.arange(n.size)
    for i in todo:
        try:
            overlap = mode_overlap(
                spec, float(omega[i]), int(n[i]), det.signed_gap, field.length, quadrature
            )
        except QuadratureError as e:
            raise e.for_cell(field.branch or 1, int(n[i])) from e
        number[i] = abs(overlap.value) ** 2 / (omega[i] * field.length)
    return number


def energy_spectrum_1d(
    field: Reduced1DField,
    det: DetectorConfig,
    spec: TrajectorySpec,
    n_max: int,
    quadrature: Optional[OscillatoryQuadrature] = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(ω̃_n, Ñ_n, Ẽ_n = ω̃_n Ñ_n) for n = 1..n_max."""
    number = number_spectrum_1d(field, det, spec, n_max, quadrature)
    omega = mode_frequency_1d(field, np.arange(1, n_max + 1))
    return omega, number, omega * number


def transition_probability_1d(
    field: Reduced1DField,
    det: DetectorConfig,
    spec: TrajectorySpec,
    n_max: int,
    quadrature: Optional[OscillatoryQuadrature] = None,
) -> float:
    """𝒫̃/λ² = Σ_{n=1}^{N_n} Ñ_n/λ²."""
    return float(np.sum(number_spectrum_1d(field, det, spec, n_max, quadrature)))


def resonant_ratio_1d(
    field: Reduced1DField,
    det: DetectorConfig,
    spec: TrajectorySpec,
    n_max: int,
    threshold: Optional[float] = None,
    quadrature: Optional[OscillatoryQuadrature] = None,
) -> ValidityReport:
    """Resonant share of the 1+1D probability.

    With ``threshold=None`` only the mode closest to the gap counts as
    resonant; otherwise every mode with |ω̃ - Ω|/Ω <= threshold does
    (falling back to the closest mode when the window is empty).
    """
    number = number_spectrum_1d(field, det, spec, n_max, quadrature)
    omega = mode_frequency_1d(field, np.arange(1, n_max + 1))
    detuning = np.abs(omega - det.gap) / det.gap
    resonant = np.zeros(n_max, dtype=bool)
    if threshold is not None:
        if not threshold > 0:
            raise DomainError(f"resonance threshold must be positive, got {threshold}")
        resonant = detuning <= threshold
    if not resonant.any():
        resonant[int(np.argmin(detuning))] = True
    return validity_from_numbers(number, resonant, threshold, branch=field.branch or 1)


def _branch_partial_sums(
    geom: CavityGeometry, det: DetectorConfig, v: float, l: int, checkpoints: list[int]
) -> list[float]:
    """3+1D branch-l sums Σ_{n<=N} N_{l,n} at each N in ``checkpoints``."""
    field = branch_field(geom, l)
    scale = 1.0 / (math.pi * bessel_j(1, bessel_zero(0, l)) ** 2 * geom.radius**2)
    spec = TrajectorySpec.constant_velocity(v)
    sums, running, start = [], 0.0, 1
    for stop in sorted(checkpoints):
        while start <= stop:
            end = min(stop, start + CHUNK - 1)
            n = np.arange(start, end + 1)
            terms, singular = _constant_velocity_terms(field, det, v, n)
            for i in np.flatnonzero(singular):
                omega = mode_frequency_1d(field, int(n[i]))
                overlap = mode_overlap(spec, omega, int(n[i]), det.signed_gap, geom.length)
                terms[i] = abs(overlap.value) ** 2 / (omega * geom.length)
            running += float(np.sum(terms))
            start = end + 1
        sums.append(scale * running)
    return sums


def branch_probability(
    geom: CavityGeometry,
    det: DetectorConfig,
    v: float,
    l: int,
    n_max: int,
    extrapolate: bool = False,
) -> float:
    """𝒫_l/λ² = Σ_{n=1}^{N_n} N_{l,n}/λ² for a constant-velocity crossing.

    Terms decay like n⁻³, so partial sums approach their limit like N⁻²;
    with ``extrapolate`` the tail is estimated by Richardson extrapolation
    from the sums at N/2 and N.
    """
    if n_max < 1:
        raise DomainError(f"N_n must be >= 1, got {n_max}")
    if not extrapolate or n_max < 4:
        return _branch_partial_sums(geom, det, v, l, [n_max])[0]
    half, full = _branch_partial_sums(geom, det, v, l, [n_max // 2, n_max])
    return full + (full - half) / 3.0


def fibre_estimator(
    geom: CavityGeometry,
    det: DetectorConfig,
    v: float,
    n_l: int,
    n_n: int,
    extrapolate: bool = False,
) -> FibreEstimate:
    """Lower bound F >= Σ_{l=2}^{N_l} 𝒫_l / 𝒫_1 for a constant-velocity crossing.

    Intended for non-relativistic speeds (v̄ of order 0.01 or below).
    """
    if n_l < 1 or n_n < 1:
        raise DomainError(f"cutoffs must be >= 1, got ({n_l}, {n_n})")
    if v > 0.05:
        logger.warning(f"Fibre estimator used at v={v}, outside the non-relativistic regime")
    probabilities = tuple(
        branch_probability(geom, det, v, l, n_n, extrapolate) for l in range(1, n_l + 1)
    )
    logger.debug(f"Branch probabilities for v={v}: {probabilities[:3]}...")
    f_lower = float(np.sum(probabilities[1:])) / probabilities[0] if n_l > 1 else 0.0
    return FibreEstimate(
        f_lower=f_lower, cutoffs=(n_l, n_n), velocity=v, branch_probabilities=probabilities
    )
