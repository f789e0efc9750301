"""On-axis detector worldlines, parametrized by proper time τ.

The detector enters the cavity at t = z = 0 and leaves at z = L.

    uniform acceleration:  t = sinh(aτ)/a,  z = (cosh(aτ) - 1)/a
    constant velocity:     t = γτ,          z = γv̄τ
    Galilean limit:        t = τ,           z = aτ²/2
"""
from __future__ import annotations

import math
from typing import Union

import numpy as np

from .errors import DomainError
from .models import CrossingTime, TrajectoryKind, TrajectorySpec

ArrayLike = Union[float, np.ndarray]

# Relative slack allowed past τ = T to absorb rounding of T itself.
TAU_SLACK = 1e-12


def crossing_time(spec: TrajectorySpec, length: float = 1.0) -> CrossingTime:
    """Proper time at which the worldline reaches z = L.

    Uniform acceleration gives T = arccosh(aL + 1)/a, evaluated as
    2 asinh(sqrt(aL/2))/a which stays accurate for aL << 1.
    """
    if not length > 0:
        raise DomainError(f"length must be positive, got {length}")
    if spec.kind is TrajectoryKind.UNIFORM_ACCELERATION:
        a = spec.acceleration
        return CrossingTime(2.0 * math.asinh(math.sqrt(0.5 * a * length)) / a)
    if spec.kind is TrajectoryKind.CONSTANT_VELOCITY:
        return CrossingTime(length / (spec.gamma * spec.velocity))
    return CrossingTime(math.sqrt(2.0 * length / spec.acceleration))


def worldline(spec: TrajectorySpec, tau: ArrayLike, length: float = 1.0):
    """Cavity-frame coordinates (t, z) at proper time ``tau``.

    Raises:
        DomainError: If any τ lies outside [0, T]
    """
    total = crossing_time(spec, length).proper_time
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0) or np.any(tau_arr > total * (1.0 + TAU_SLACK)):
        raise DomainError(f"proper time outside [0, {total}]")

    if spec.kind is TrajectoryKind.UNIFORM_ACCELERATION:
        a = spec.acceleration
        t = np.sinh(a * tau_arr) / a
        z = 2.0 * np.sinh(0.5 * a * tau_arr) ** 2 / a
    elif spec.kind is TrajectoryKind.CONSTANT_VELOCITY:
        t = spec.gamma * tau_arr
        z = spec.gamma * spec.velocity * tau_arr
    else:
        t = tau_arr.copy()
        z = 0.5 * spec.acceleration * tau_arr**2

    if np.ndim(t) == 0:
        return float(t), float(z)
    return t, z


def coordinate_crossing_time(spec: TrajectorySpec, length: float = 1.0) -> float:
    """Cavity-frame duration t(T) of the crossing."""
    if spec.kind is TrajectoryKind.UNIFORM_ACCELERATION:
        a = spec.acceleration
        return math.sqrt(a * length * (a * length + 2.0)) / a
    if spec.kind is TrajectoryKind.CONSTANT_VELOCITY:
        return length / spec.velocity
    return crossing_time(spec, length).proper_time


def matched_velocity(aL: float) -> float:
    """Constant velocity with the same cavity-frame crossing time as acceleration ``aL``."""
    if not aL > 0:
        raise DomainError(f"aL must be positive, got {aL}")
    return 1.0 / math.sqrt(1.0 + 2.0 / aL)


def final_velocity(spec: TrajectorySpec, length: float = 1.0) -> float:
    """Coordinate velocity dz/dt = tanh(aT) when leaving the cavity."""
    if spec.kind is not TrajectoryKind.UNIFORM_ACCELERATION:
        raise DomainError("final velocity is defined for uniformly accelerated crossings")
    aL = spec.acceleration * length
    return math.sqrt(aL * (aL + 2.0)) / (aL + 1.0)
