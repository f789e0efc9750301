"""Tests for models module."""
import math

import pytest

from cavitydetector.errors import DomainError
from cavitydetector.models import (
    CavityGeometry,
    DetectorConfig,
    InitialState,
    ModeIndex,
    TrajectoryKind,
    TrajectorySpec,
)


class TestDetectorConfig:
    """Test the two-level detector record."""

    def test_signed_gap(self):
        """Test +Ω for ground and -Ω for excited detectors."""
        assert DetectorConfig(gap=5.75, initial_state=InitialState.GROUND).signed_gap == 5.75
        assert DetectorConfig(gap=5.75).signed_gap == -5.75

    def test_state_from_string(self):
        """Test initial states given as text are converted to the enum."""
        det = DetectorConfig(gap=1.0, initial_state="ground")
        assert det.initial_state is InitialState.GROUND

    @pytest.mark.parametrize("gap, coupling", [(0.0, 1.0), (math.inf, 1.0), (1.0, 0.0)])
    def test_rejects_bad_values(self, gap, coupling):
        """Test that gap and coupling must be positive and finite."""
        with pytest.raises(DomainError):
            DetectorConfig(gap=gap, coupling=coupling)


class TestGeometryAndModes:
    """Test cavity and mode-index validation."""

    def test_rejects_bad_radius(self):
        """Test that a non-positive radius is refused."""
        with pytest.raises(DomainError):
            CavityGeometry(radius=0.0)

    @pytest.mark.parametrize("m, l, n", [(-1, 1, 1), (0, 0, 1), (0, 1, 0)])
    def test_rejects_bad_index(self, m, l, n):
        """Test m >= 0, l >= 1 and n >= 1."""
        with pytest.raises(DomainError):
            ModeIndex(m, l, n)


class TestTrajectorySpec:
    """Test trajectory constructors."""

    def test_parameter_and_gamma(self):
        """Test the kinematic parameter and Lorentz factor per kind."""
        spec = TrajectorySpec.constant_velocity(0.6)
        assert spec.kind is TrajectoryKind.CONSTANT_VELOCITY
        assert spec.parameter == 0.6
        assert spec.gamma == pytest.approx(1.25, rel=1e-15)
        assert TrajectorySpec.galilean(0.05).gamma == 1.0
        assert TrajectorySpec.uniform_acceleration(0.5).parameter == 0.5

    @pytest.mark.parametrize("velocity", [0.0, 1.0, -0.2])
    def test_rejects_bad_velocity(self, velocity):
        """Test that the velocity must lie in (0, 1)."""
        with pytest.raises(DomainError):
            TrajectorySpec.constant_velocity(velocity)

    def test_rejects_mixed_fields(self):
        """Test that each kind takes only its own parameter."""
        with pytest.raises(DomainError):
            TrajectorySpec(TrajectoryKind.GALILEAN, acceleration=1.0, velocity=0.1)
        with pytest.raises(DomainError):
            TrajectorySpec(TrajectoryKind.CONSTANT_VELOCITY, acceleration=1.0, velocity=0.1)
