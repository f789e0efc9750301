"""Data models for cavitydetector.

All quantities are expressed in units of the cavity length: pass ``length=1``
(the default) and the dimensionless groups ``aL``, ``ΩL``,
``ρ/L``, ``ωL`` and ``mL`` can be used directly as acceleration, gap, radius,
frequency and mass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DomainError


class InitialState(str, Enum):
    """Initial state of the two-level detector."""
    GROUND = "ground"
    EXCITED = "excited"

    @property
    def sign(self) -> int:
        """Sign of the gap in the e^{±iΩτ} factor (+1 ground, -1 excited)."""
        return 1 if self is InitialState.GROUND else -1


class TrajectoryKind(str, Enum):
    """Detector worldlines along the cavity axis."""
    UNIFORM_ACCELERATION = "uniform_acceleration"
    CONSTANT_VELOCITY = "constant_velocity"
    GALILEAN = "galilean"


@dataclass(frozen=True)
class CavityGeometry:
    """Cylindrical cavity of length L and radius ρ with Dirichlet walls."""
    radius: float
    length: float = 1.0

    def __post_init__(self) -> None:
        if not (self.length > 0 and math.isfinite(self.length)):
            raise DomainError(f"cavity length must be positive, got {self.length}")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError(f"cavity radius must be positive, got {self.radius}")


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Quantum numbers (m, l, n) of a cavity mode."""
    m: int
    l: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 0:
            raise DomainError(f"azimuthal number m must be >= 0, got {self.m}")
        if self.l < 1:
            raise DomainError(f"radial number l must be >= 1, got {self.l}")
        if self.n < 1:
            raise DomainError(f"longitudinal number n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class ModeData:
    """Frequency and delta-normalization constant of one cavity mode."""
    index: ModeIndex
    omega: float
    norm_A: float


@dataclass(frozen=True)
class DetectorConfig:
    """Two-level detector with gap Ω and coupling λ.

    Response functions report λ-scaled values: N/λ², E/λ² and P/λ².
    """
    gap: float
    initial_state: InitialState = InitialState.EXCITED
    coupling: float = 1.0

    def __post_init__(self) -> None:
        if not (self.gap > 0 and math.isfinite(self.gap)):
            raise DomainError(f"detector gap must be positive, got {self.gap}")
        if not self.coupling > 0:
            raise DomainError(f"coupling must be positive, got {self.coupling}")
        object.__setattr__(self, "initial_state", InitialState(self.initial_state))

    @property
    def signed_gap(self) -> float:
        """±Ω as it enters the phase: +Ω for ground, -Ω for excited."""
        return self.initial_state.sign * self.gap


@dataclass(frozen=True)
class TrajectorySpec:
    """Kinematics of an on-axis crossing.

    Use the classmethod constructors rather than filling the fields by hand.
    """
    kind: TrajectoryKind
    acceleration: Optional[float] = None
    velocity: Optional[float] = None

    def __post_init__(self) -> None:
        kind = TrajectoryKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is TrajectoryKind.CONSTANT_VELOCITY:
            if self.acceleration is not None:
                raise DomainError("constant-velocity trajectories take no acceleration")
            if self.velocity is None or not 0.0 < self.velocity < 1.0:
                raise DomainError(f"velocity must lie in (0, 1), got {self.velocity}")
        else:
            if self.velocity is not None:
                raise DomainError(f"{kind.value} trajectories take no velocity")
            if self.acceleration is None or not (
                self.acceleration > 0 and math.isfinite(self.acceleration)
            ):
                raise DomainError(f"acceleration must be positive, got {self.acceleration}")

    @classmethod
    def uniform_acceleration(cls, acceleration: float) -> "TrajectorySpec":
        return cls(TrajectoryKind.UNIFORM_ACCELERATION, acceleration=acceleration)

    @classmethod
    def constant_velocity(cls, velocity: float) -> "TrajectorySpec":
        return cls(TrajectoryKind.CONSTANT_VELOCITY, velocity=velocity)

    @classmethod
    def galilean(cls, acceleration: float) -> "TrajectorySpec":
        return cls(TrajectoryKind.GALILEAN, acceleration=acceleration)

    @property
    def gamma(self) -> float:
        """Lorentz factor of a constant-velocity crossing (1 otherwise)."""
        if self.velocity is None:
            return 1.0
        return 1.0 / math.sqrt((1.0 - self.velocity) * (1.0 + self.velocity))

    @property
    def parameter(self) -> float:
        """The kinematic parameter of this kind (a or v̄)."""
        return self.velocity if self.velocity is not None else self.acceleration  # type: ignore


@dataclass(frozen=True)
class CrossingTime:
    """Proper time spent inside the cavity."""
    proper_time: float

    def __post_init__(self) -> None:
        if not (self.proper_time > 0 and math.isfinite(self.proper_time)):
            raise DomainError(f"crossing time must be positive and finite, got {self.proper_time}")


@dataclass
class ModeGrid:
    """Per-mode results on the rectangular block l = 1..N_l, n = 1..N_n.

    Arrays are indexed ``[l - 1, n - 1]``.
    """
    cutoffs: tuple[int, int]
    number: np.ndarray
    omega: np.ndarray
    resonant: np.ndarray

    def __post_init__(self) -> None:
        shape = tuple(self.cutoffs)
        for name in ("number", "omega", "resonant"):
            if getattr(self, name).shape != shape:
                raise DomainError(
                    f"{name} has shape {getattr(self, name).shape}, expected {shape}"
                )
        if np.any(self.number < 0):
            raise DomainError("number expectation values must be nonnegative")

    @property
    def energy(self) -> np.ndarray:
        """Energy per mode E = ω N."""
        return self.omega * self.number

    def peak(self) -> tuple[int, int]:
        """(l, n) of the largest number expectation value."""
        il, jn = np.unravel_index(int(np.argmax(self.number)), self.number.shape)
        return int(il) + 1, int(jn) + 1

    def cells(self):
        """Iterate ``(l, n, N, E, resonant)`` in row-major order."""
        energy = self.energy
        n_l, n_n = self.cutoffs
        for il in range(n_l):
            for jn in range(n_n):
                yield (
                    il + 1,
                    jn + 1,
                    float(self.number[il, jn]),
                    float(energy[il, jn]),
                    bool(self.resonant[il, jn]),
                )


@dataclass
class RelativeErrorMap:
    """Δ(l, n) = 1 - N_NR/N; undefined cells hold NaN and ``defined`` False."""
    cutoffs: tuple[int, int]
    delta: np.ndarray
    defined: np.ndarray

    def cells(self):
        n_l, n_n = self.cutoffs
        for il in range(n_l):
            for jn in range(n_n):
                yield il + 1, jn + 1, float(self.delta[il, jn]), bool(self.defined[il, jn])


@dataclass(frozen=True)
class TransitionProbability:
    """Cutoff-truncated detector transition probability P/λ² = Σ N_{l,n}/λ²."""
    value: float
    cutoffs: tuple[int, int]
    tail_estimate: float


@dataclass(frozen=True)
class ValidityReport:
    """Resonant share P_res/P of a transition probability.

    Because P is truncated at the cutoffs the ratio is an upper bound.
    """
    p_total: float
    p_res: float
    ratio: float
    resonance_threshold: Optional[float]
    cutoffs: tuple[int, ...]
    tail_estimate: float = 0.0
    resonant_modes: tuple[ModeIndex, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.p_res > self.p_total * (1 + 1e-12):
            raise DomainError("resonant contribution exceeds the total")
        if not 0.0 <= self.ratio <= 1.0:
            raise DomainError(f"ratio must lie in [0, 1], got {self.ratio}")


@dataclass(frozen=True)
class Reduced1DField:
    """Scalar field of effective mass m̃ in a 1+1D cavity of length L.

    ``branch`` and ``omega0`` are set when the mass comes from radial branch
    l of a cylindrical cavity (see :func:`reduced1d.branch_field`).
    """
    mass: float
    length: float = 1.0
    branch: Optional[int] = None
    omega0: Optional[float] = None

    def __post_init__(self) -> None:
        if not (self.mass >= 0 and math.isfinite(self.mass)):
            raise DomainError(f"effective mass must be >= 0, got {self.mass}")
        if not self.length > 0:
            raise DomainError(f"length must be positive, got {self.length}")
        if self.branch is not None:
            if self.branch < 1 or self.omega0 is None or not self.omega0 > 0:
                raise DomainError("a branch field needs l >= 1 and a positive omega0")
            from .specfun import bessel_zero

            expected = self.omega0 * bessel_zero(0, self.branch) / bessel_zero(0, 1)
            if not math.isclose(self.mass, expected, rel_tol=1e-12):
                raise DomainError(
                    f"mass {self.mass} does not match branch {self.branch} ({expected})"
                )

    @classmethod
    def from_branch(cls, geom: "CavityGeometry", l: int) -> "Reduced1DField":
        """The field carried by radial branch l of ``geom``."""
        from .reduced1d import branch_field

        return branch_field(geom, l)


@dataclass(frozen=True)
class FibreEstimate:
    """Lower bound to the l > 1 / l = 1 excitation-probability ratio F."""
    f_lower: float
    cutoffs: tuple[int, int]
    velocity: float
    branch_probabilities: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.f_lower < 0:
            raise DomainError(f"F must be nonnegative, got {self.f_lower}")
