"""Tests for reduced1d module."""
import math

import numpy as np
import pytest

from cavitydetector.cavity import mode_function
from cavitydetector.errors import DomainError
from cavitydetector.models import (
    CavityGeometry,
    DetectorConfig,
    InitialState,
    ModeIndex,
    Reduced1DField,
    TrajectorySpec,
)
from cavitydetector.quadrature import OscillatoryQuadrature
from cavitydetector.reduced1d import (
    branch_field,
    branch_probability,
    energy_map_1to3,
    energy_map_3to1,
    energy_spectrum_1d,
    fibre_estimator,
    mode_frequency_1d,
    mode_function_1d,
    number_expectation_1d,
    number_spectrum_1d,
    reduction_factor,
    resonant_gap,
    resonant_ratio_1d,
    transition_probability_1d,
)
from cavitydetector.response import constant_velocity_grid, mode_overlap

TIGHT = OscillatoryQuadrature(rtol=1e-12)


@pytest.fixture
def geom():
    return CavityGeometry(radius=0.5)


class TestBranchField:
    """Test the effective 1+1D fields of the radial branches."""

    def test_masses(self, geom):
        """Test m̃_l = x_{0l}/ρ and the resonant gap of the lowest mode."""
        assert branch_field(geom, 1).mass == pytest.approx(2.404825557695773 / 0.5)
        assert branch_field(geom, 2).mass == pytest.approx(5.520078110286311 / 0.5)
        assert Reduced1DField.from_branch(geom, 3) == branch_field(geom, 3)
        assert resonant_gap(geom) == pytest.approx(5.74476, abs=1e-4)

    def test_mismatched_branch_mass(self):
        """Test that a branch field must carry the branch's mass."""
        with pytest.raises(DomainError):
            Reduced1DField(mass=1.0, branch=2, omega0=4.8)

    def test_mode_function_on_axis(self, geom):
        """Test ũ_n = sqrt(π) |J₁(x_{0l})| ρ u_{0ln}(r = 0)."""
        l, n, z, t = 2, 3, 0.37, 0.8
        field = branch_field(geom, l)
        reduced = mode_function_1d(field, n, z, t)
        full = mode_function(geom, ModeIndex(0, l, n), 0.0, 0.0, z, t)
        assert reduced == pytest.approx(reduction_factor(geom, l) * full, rel=1e-12)

    def test_frequencies(self):
        """Test ω̃_n = sqrt(m̃² + (nπ/L)²) and the n >= 1 rule."""
        field = Reduced1DField(mass=2.41)
        np.testing.assert_allclose(
            mode_frequency_1d(field, np.arange(1, 4)), np.hypot(2.41, np.pi * np.arange(1, 4))
        )
        with pytest.raises(DomainError):
            mode_frequency_1d(field, 0)

    def test_outside_cavity(self):
        """Test that z outside [0, L] is rejected."""
        with pytest.raises(DomainError):
            mode_function_1d(Reduced1DField(mass=0.0), 1, 1.5, 0.0)


class TestEnergyMap:
    """Test the 3+1D ↔ 1+1D energy map."""

    def test_round_trip(self, geom):
        """Test that the two maps invert each other."""
        energy = np.array([1.0, 2.5, 7.0])
        mapped = energy_map_3to1(energy, 2, geom.radius)
        np.testing.assert_allclose(energy_map_1to3(mapped, 2, geom.radius), energy)

    def test_factor(self, geom):
        """Test the factor π J₁(x_{0l})² ρ² for l = 1."""
        assert energy_map_3to1(1.0, 1, 0.5) == pytest.approx(
            math.pi * 0.5191474972894669**2 * 0.25, rel=1e-12
        )

    def test_branch_zero_rejected(self):
        """Test that l = 0 is refused."""
        with pytest.raises(DomainError):
            energy_map_3to1(1.0, 0, 0.5)

    @pytest.mark.parametrize("l", [1, 2, 4])
    def test_branch_numbers_match_full_model(self, geom, l):
        """Test Ñ_n of branch l equals the mapped 3+1D N_{l,n} (constant velocity)."""
        det = DetectorConfig(gap=20.0, initial_state=InitialState.EXCITED)
        spec = TrajectorySpec.constant_velocity(0.05)
        reduced = number_spectrum_1d(branch_field(geom, l), det, spec, 30)
        full = constant_velocity_grid(geom, det, 0.05, (l, 30))[l - 1]
        np.testing.assert_allclose(energy_map_1to3(reduced, l, geom.radius), full, rtol=1e-10)


class TestSpectra:
    """Test 1+1D number spectra."""

    @pytest.mark.parametrize("state", [InitialState.EXCITED, InitialState.GROUND])
    def test_constant_velocity_closed_form_matches_quadrature(self, state):
        """Test the 1+1D closed form against the trajectory integral."""
        field = Reduced1DField(mass=2.41)
        det = DetectorConfig(gap=3.95, initial_state=state)
        v = 0.2
        spec = TrajectorySpec.constant_velocity(v)
        closed = number_spectrum_1d(field, det, spec, 12)
        omega = mode_frequency_1d(field, np.arange(1, 13))
        numeric = np.array(
            [
                abs(mode_overlap(spec, omega[n - 1], n, det.signed_gap, 1.0, TIGHT).value) ** 2
                for n in range(1, 13)
            ]
        )
        numeric /= omega
        np.testing.assert_allclose(closed, numeric, rtol=1e-6, atol=1e-9 * closed.max())

    def test_singular_band_falls_back_to_quadrature(self, monkeypatch):
        """Test cells inside the singular band are recomputed by quadrature."""
        field = Reduced1DField(mass=2.41)
        det = DetectorConfig(gap=3.95, initial_state=InitialState.GROUND)
        spec = TrajectorySpec.constant_velocity(0.2)
        closed = number_spectrum_1d(field, det, spec, 8)
        # A window this wide puts every cell in the band.
        monkeypatch.setattr("cavitydetector.reduced1d.SINGULAR_WINDOW", 1e6)
        fallback = number_spectrum_1d(field, det, spec, 8, TIGHT)
        np.testing.assert_allclose(fallback, closed, rtol=1e-6, atol=1e-9 * closed.max())

    def test_galilean_close_to_accelerated(self):
        """Test the Galilean spectrum tracks the accelerated one at small aL."""
        field = Reduced1DField(mass=0.0)
        det = DetectorConfig(gap=3.14, initial_state=InitialState.EXCITED)
        accelerated = number_expectation_1d(
            field, det, TrajectorySpec.uniform_acceleration(5e-4), 1, TIGHT
        )
        galilean = number_expectation_1d(field, det, TrajectorySpec.galilean(5e-4), 1)
        assert galilean == pytest.approx(accelerated, rel=2e-2)

    def test_energy_and_probability(self):
        """Test Ẽ = ω̃ Ñ and 𝒫̃ = Σ Ñ."""
        field = Reduced1DField(mass=4.81)
        det = DetectorConfig(gap=5.74, initial_state=InitialState.GROUND)
        spec = TrajectorySpec.galilean(0.05)
        omega, number, energy = energy_spectrum_1d(field, det, spec, 40)
        np.testing.assert_allclose(energy, omega * number)
        assert transition_probability_1d(field, det, spec, 40) == pytest.approx(number.sum())

    def test_bad_range(self):
        """Test that an empty mode range is rejected."""
        field = Reduced1DField(mass=0.0)
        det = DetectorConfig(gap=1.0)
        with pytest.raises(DomainError):
            number_spectrum_1d(field, det, TrajectorySpec.galilean(0.1), 0)


class TestResonantRatio1D:
    """Test resonant shares of the 1+1D model."""

    def test_closest_mode(self):
        """Test the default selection uses exactly one mode."""
        field = Reduced1DField(mass=0.0)
        det = DetectorConfig(gap=3.14, initial_state=InitialState.GROUND)
        report = resonant_ratio_1d(field, det, TrajectorySpec.galilean(0.05), 200)
        assert report.resonant_modes == (ModeIndex(0, 1, 1),)
        assert 0.0 <= report.ratio <= 1.0
        assert report.resonance_threshold is None

    def test_window_contains_closest(self):
        """Test a 20% window includes the closest mode and grows the share."""
        field = Reduced1DField(mass=48.1)
        det = DetectorConfig(gap=49.0, initial_state=InitialState.GROUND)
        spec = TrajectorySpec.galilean(5e-3)
        closest = resonant_ratio_1d(field, det, spec, 400)
        window = resonant_ratio_1d(field, det, spec, 400, threshold=0.2)
        assert set(closest.resonant_modes) <= set(window.resonant_modes)
        assert window.ratio >= closest.ratio

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "mass, gap, excited_ratio, ground_ratio, ground_tol",
        [
            (0.0, 3.14, 1.000, 0.522, 0.01),
            (2.41, 3.95, 1.000, 0.334, 0.01),
            (4.81, 5.74, 1.000, 0.133, 0.01),
            (48.1, 48.19, 1.000, 2.6e-4, 0.5e-4),
        ],
    )
    def test_slow_crossing_table(self, mass, gap, excited_ratio, ground_ratio, ground_tol):
        """Test the closest-mode shares at aL = 5e-5 for the four masses."""
        field = Reduced1DField(mass=mass)
        spec = TrajectorySpec.uniform_acceleration(5e-5)
        excited = resonant_ratio_1d(
            field, DetectorConfig(gap=gap, initial_state=InitialState.EXCITED), spec, 2000
        )
        ground = resonant_ratio_1d(
            field, DetectorConfig(gap=gap, initial_state=InitialState.GROUND), spec, 2000
        )
        assert excited.ratio == pytest.approx(excited_ratio, abs=0.01)
        assert ground.ratio == pytest.approx(ground_ratio, abs=ground_tol)

    @pytest.mark.slow
    def test_gap_sweep_closest_mode(self):
        """Test the closest-mode share for a massless field at ΩL = 100."""
        det = DetectorConfig(gap=100.0, initial_state=InitialState.GROUND)
        spec = TrajectorySpec.uniform_acceleration(5e-5)
        report = resonant_ratio_1d(Reduced1DField(mass=0.0), det, spec, 2000)
        assert report.resonant_modes == (ModeIndex(0, 1, 32),)
        assert report.ratio == pytest.approx(0.012, abs=0.005)

    @pytest.mark.slow
    def test_gap_sweep_twenty_percent_window(self):
        """Test the share of modes within 20% of ΩL = 100 for a massless field."""
        det = DetectorConfig(gap=100.0, initial_state=InitialState.GROUND)
        spec = TrajectorySpec.uniform_acceleration(5e-5)
        report = resonant_ratio_1d(Reduced1DField(mass=0.0), det, spec, 2000, threshold=0.2)
        assert report.ratio == pytest.approx(0.153, abs=0.005)


class TestFibre:
    """Test the thin-cavity estimator F."""

    def test_extrapolation_raises_partial_sum(self, geom):
        """Test the Richardson tail is nonnegative for positive terms."""
        det = DetectorConfig(gap=20.0, initial_state=InitialState.GROUND)
        plain = branch_probability(geom, det, 0.005, 2, 4000)
        extrapolated = branch_probability(geom, det, 0.005, 2, 4000, extrapolate=True)
        assert extrapolated >= plain > 0

    def test_more_branches_raise_bound(self, geom):
        """Test that F grows as branches are added."""
        det = DetectorConfig(gap=20.0, initial_state=InitialState.GROUND)
        small = fibre_estimator(geom, det, 0.005, 5, 2000)
        large = fibre_estimator(geom, det, 0.005, 10, 2000)
        assert 0 < small.f_lower < large.f_lower
        assert large.branch_probabilities[:5] == small.branch_probabilities
        assert large.cutoffs == (10, 2000)

    def test_single_branch(self, geom):
        """Test F = 0 with only the lowest branch."""
        det = DetectorConfig(gap=20.0, initial_state=InitialState.GROUND)
        assert fibre_estimator(geom, det, 0.005, 1, 100).f_lower == 0.0

    def test_warns_when_relativistic(self, geom, caplog):
        """Test a warning outside the non-relativistic regime."""
        det = DetectorConfig(gap=20.0, initial_state=InitialState.GROUND)
        with caplog.at_level("WARNING"):
            fibre_estimator(geom, det, 0.3, 2, 100)
        assert "non-relativistic" in caplog.text

    def test_branch_sums_match_grid(self, geom):
        """Test 𝒫_l against row sums of the 3+1D constant-velocity grid."""
        det = DetectorConfig(gap=20.0, initial_state=InitialState.GROUND)
        grid = constant_velocity_grid(geom, det, 0.005, (4, 500))
        estimate = fibre_estimator(geom, det, 0.005, 4, 500)
        np.testing.assert_allclose(estimate.branch_probabilities, grid.sum(axis=1), rtol=1e-10)
        assert estimate.f_lower == pytest.approx(grid[1:].sum() / grid[0].sum(), rel=1e-10)

    @pytest.mark.slow
    def test_thin_cavity_bound_at_desk_cutoffs(self, geom):
        """Test F > 50 at (N_l, N_n) = (50, 1e5) and growth in both cutoffs."""
        det = DetectorConfig(gap=20.0, initial_state=InitialState.GROUND)
        full = fibre_estimator(geom, det, 0.005, 50, 100000)
        fewer_modes = fibre_estimator(geom, det, 0.005, 50, 25000)
        probabilities = full.branch_probabilities
        fewer_branches = sum(probabilities[1:25]) / probabilities[0]

        assert full.f_lower > 50
        assert fewer_branches <= full.f_lower
        assert fewer_modes.f_lower <= full.f_lower
