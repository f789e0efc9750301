"""Tests for cavity module."""
import math

import numpy as np
import pytest

from cavitydetector.cavity import (
    frequency_grid,
    kg_inner_product,
    mode_data,
    mode_frequency,
    mode_function,
    normalization,
    normalization_grid,
)
from cavitydetector.errors import DomainError
from cavitydetector.models import CavityGeometry, ModeIndex


@pytest.fixture
def geom():
    return CavityGeometry(radius=0.5)


class TestModeFrequency:
    """Test the mode spectrum."""

    def test_lowest_mode(self, geom):
        """Test ω(0, 1, 1) for ρ/L = 1/2 (the ΩL = 5.75 resonance)."""
        omega = mode_frequency(geom, ModeIndex(0, 1, 1))
        assert omega == pytest.approx(5.74476, abs=1e-4)

    def test_grid_matches_pointwise(self, geom):
        """Test the vectorized grid against single-mode evaluation."""
        grid = frequency_grid(geom, (4, 6))
        assert grid.shape == (4, 6)
        for l in range(1, 5):
            for n in range(1, 7):
                assert grid[l - 1, n - 1] == pytest.approx(
                    mode_frequency(geom, ModeIndex(0, l, n)), rel=1e-15
                )

    def test_monotone_in_both_indices(self, geom):
        """Test that ω grows with l and with n."""
        grid = frequency_grid(geom, (10, 10))
        assert np.all(np.diff(grid, axis=0) > 0)
        assert np.all(np.diff(grid, axis=1) > 0)


class TestNormalization:
    """Test the delta-normalization constants."""

    def test_positive_and_consistent(self, geom):
        """Test A > 0 and agreement between grid and scalar forms."""
        grid = normalization_grid(geom, (3, 4))
        assert np.all(grid > 0)
        assert grid[2, 3] == pytest.approx(normalization(geom, ModeIndex(0, 3, 4)), rel=1e-14)

    def test_closed_form(self, geom):
        """Test A = 1/(ρ sqrt(Lπω) |J_1(x_01)|) for the lowest mode."""
        data = mode_data(geom, ModeIndex(0, 1, 1))
        expected = 1.0 / (0.5 * math.sqrt(math.pi * data.omega) * 0.5191474972894669)
        assert data.norm_A == pytest.approx(expected, rel=1e-12)


class TestInnerProduct:
    """Test Klein-Gordon orthonormality."""

    @pytest.mark.parametrize(
        "index",
        [ModeIndex(0, 1, 1), ModeIndex(0, 2, 3), ModeIndex(1, 1, 2), ModeIndex(2, 3, 1)],
    )
    def test_unit_norm(self, geom, index):
        """Test (u, u) = 1."""
        assert kg_inner_product(geom, index, index) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize(
        "a, b",
        [
            (ModeIndex(0, 1, 1), ModeIndex(0, 2, 1)),
            (ModeIndex(0, 1, 1), ModeIndex(0, 1, 2)),
            (ModeIndex(0, 1, 1), ModeIndex(1, 1, 1)),
        ],
    )
    def test_orthogonal(self, geom, a, b):
        """Test (u_a, u_b) = 0 for distinct modes."""
        assert abs(kg_inner_product(geom, a, b)) < 1e-8

    def test_delta_matrix(self, geom):
        """Test (u_a, u_b) = δ_ab on the block m <= 2, l <= 3, n <= 3."""
        modes = [ModeIndex(m, l, n) for m in range(3) for l in range(1, 4) for n in range(1, 4)]
        gram = np.array([[kg_inner_product(geom, a, b) for b in modes] for a in modes])
        np.testing.assert_allclose(gram, np.eye(len(modes)), atol=1e-6)

    def test_rejects_tiny_resolution(self, geom):
        """Test that a resolution below 2 is refused."""
        with pytest.raises(DomainError):
            kg_inner_product(geom, ModeIndex(0, 1, 1), ModeIndex(0, 1, 1), resolution=1)


class TestModeFunction:
    """Test pointwise mode evaluation."""

    def test_on_axis(self, geom):
        """Test u(r = 0) = A e^{-iωt} sin(nπz/L) for m = 0."""
        idx = ModeIndex(0, 2, 3)
        data = mode_data(geom, idx)
        value = mode_function(geom, idx, 0.0, 0.3, 0.2, 1.5)
        expected = data.norm_A * np.exp(-1j * data.omega * 1.5) * math.sin(3 * math.pi * 0.2)
        assert value == pytest.approx(expected, rel=1e-13)

    def test_vanishes_on_walls(self, geom):
        """Test the Dirichlet conditions on r = ρ, z = 0 and z = L."""
        idx = ModeIndex(0, 1, 2)
        assert abs(mode_function(geom, idx, 0.5, 0.0, 0.4, 0.0)) < 1e-12
        assert abs(mode_function(geom, idx, 0.1, 0.0, 0.0, 0.0)) < 1e-12
        assert abs(mode_function(geom, idx, 0.1, 0.0, 1.0, 0.0)) < 1e-12

    def test_outside_cavity(self, geom):
        """Test that points outside the cavity are rejected."""
        with pytest.raises(DomainError):
            mode_function(geom, ModeIndex(0, 1, 1), 0.6, 0.0, 0.5, 0.0)
        with pytest.raises(DomainError):
            mode_function(geom, ModeIndex(0, 1, 1), 0.1, 0.0, 1.2, 0.0)
