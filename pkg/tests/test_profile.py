"""
Tests for src/profile.py: composite Gaussian intensity, central deficit,
FWHM metrics and the modulation bookkeeping.
"""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from src.cavity import CavityConfig, enumerate_exact, propagate_moments
from src.errors import DomainError
from src.profile import (
    FWHM_PER_SIGMA,
    BeamCenters,
    GaussianBeam,
    central_deficit,
    compose_intensity,
    deficit_exponent,
    metrics,
    modulation_report,
    waist_for_deficit,
)


@pytest.fixture
def beam() -> GaussianBeam:
    return GaussianBeam(waist_sigma=1.0)


# ---------------------------------------------------------------------------
# Central deficit
# ---------------------------------------------------------------------------


class TestCentralDeficit:
    def test_unshifted_beam_has_no_deficit(self, beam):
        assert central_deficit(beam, BeamCenters([0.0], [1.0], 0.0)) == 0.0

    def test_symmetric_pair_closed_form(self, beam):
        deficit = central_deficit(beam, BeamCenters.symmetric_pair(0.1))
        assert deficit == pytest.approx(1.0 - math.exp(-0.005), rel=1e-14)

    def test_tiny_shift_keeps_precision(self, beam):
        """A 1e-9 sigma shift gives 5e-19, far below double-precision epsilon."""
        deficit = central_deficit(beam, BeamCenters.symmetric_pair(1e-9))
        assert deficit == pytest.approx(5e-19, rel=1e-9)

    def test_small_shift_branch_agrees(self, beam):
        centers = BeamCenters.symmetric_pair(1e-9)
        assert central_deficit(beam, centers, small_shift=True) == pytest.approx(
            central_deficit(beam, centers), rel=1e-9
        )

    def test_two_centers_small_offset(self, beam):
        deficit = central_deficit(beam, BeamCenters.symmetric_pair(1e-3))
        assert deficit == pytest.approx(0.5e-6, rel=0.01)

    def test_cluster_variance_broadens(self, beam):
        """A cluster of variance sigma^2 at the center lowers the peak by 1/sqrt(2)."""
        deficit = central_deficit(beam, BeamCenters([0.0], [1.0], 1.0))
        assert deficit == pytest.approx(1.0 - 1.0 / math.sqrt(2.0), rel=1e-14)

    def test_deficit_is_quadratic_in_shift(self, beam):
        exponent, deficits = deficit_exponent(beam, np.logspace(-6, -3, 7))
        assert exponent == pytest.approx(2.0, abs=1e-3)
        assert np.all(np.diff(deficits) > 0)

    def test_lattice_and_leaves_agree(self):
        """Pooling leaves per angle index keeps the deficit to leading order."""
        config = CavityConfig(pass_length=1.0, passes=12, theta_mode=1e-7)
        sigma_beam = GaussianBeam(waist_sigma=1e-3)
        from_leaves = central_deficit(sigma_beam, BeamCenters.from_leaves(enumerate_exact(config)))
        lattice, _ = propagate_moments(config)
        from_lattice = central_deficit(sigma_beam, BeamCenters.from_lattice(lattice))
        assert from_lattice == pytest.approx(from_leaves, rel=1e-4)


# ---------------------------------------------------------------------------
# Composite profile and metrics
# ---------------------------------------------------------------------------


class TestMetrics:
    def test_single_beam_reproduces_reference(self, beam):
        profile = compose_intensity(beam, BeamCenters([0.0], [1.0], 0.0))
        m = metrics(profile, beam)
        assert m.fwhm == pytest.approx(FWHM_PER_SIGMA, rel=1e-8)
        assert m.reference_fwhm == pytest.approx(2.3548, rel=1e-4)
        assert m.peak == pytest.approx(1.0, rel=1e-12)
        assert m.central_deficit == 0.0
        assert m.power == pytest.approx(1.0, rel=1e-10)
        assert m.throughput == pytest.approx(1.0)

    def test_split_beam_is_wider(self, beam):
        profile = compose_intensity(beam, BeamCenters.symmetric_pair(1.5))
        m = metrics(profile, beam)
        assert m.fwhm > m.reference_fwhm
        assert m.central_deficit == pytest.approx(1.0 - math.exp(-1.125), rel=1e-12)
        assert m.power == pytest.approx(1.0, rel=1e-10)

    def test_throughput_tracks_lost_weight(self, beam):
        profile = compose_intensity(beam, BeamCenters.symmetric_pair(0.1, total_weight=0.8))
        m = metrics(profile, beam)
        assert m.throughput == pytest.approx(0.8)
        assert m.power == pytest.approx(0.8, rel=1e-10)

    def test_grid_is_symmetric(self, beam):
        profile = compose_intensity(beam, BeamCenters.symmetric_pair(0.5))
        np.testing.assert_allclose(profile.grid, -profile.grid[::-1], atol=1e-12)
        np.testing.assert_allclose(profile.intensity, profile.intensity[::-1], rtol=1e-12)
        assert list(profile.to_frame().columns) == ["y_m", "intensity"]

    def test_small_shift_flag(self, beam):
        assert compose_intensity(beam, BeamCenters.symmetric_pair(1e-14)).small_shift
        assert not compose_intensity(beam, BeamCenters.symmetric_pair(1e-3)).small_shift

    @pytest.mark.parametrize("offset", [1.2345, 1.5, 2.0])
    def test_two_peak_fwhm_off_grid(self, beam, offset):
        """Peaks between grid samples: FWHM still within 1e-6 sigma of the analytic value."""

        def pair(y):
            return 0.5 * (math.exp(-0.5 * (y - offset) ** 2) + math.exp(-0.5 * (y + offset) ** 2)) / math.sqrt(
                2.0 * math.pi
            )

        # maxima of the pair sit at y = offset * tanh(offset * y)
        y_peak = brentq(lambda y: y - offset * math.tanh(offset * y), 1e-6, offset, xtol=1e-15)
        half = 0.5 * pair(y_peak)
        right = brentq(lambda y: pair(y) - half, y_peak, offset + 10.0, xtol=1e-15)

        m = metrics(compose_intensity(beam, BeamCenters.symmetric_pair(offset)), beam)
        assert m.fwhm == pytest.approx(2.0 * right, abs=1e-6)
        assert m.peak == pytest.approx(pair(y_peak) * math.sqrt(2.0 * math.pi), rel=1e-12)

    def test_deficit_uses_reference_beam(self, beam):
        profile = compose_intensity(beam, BeamCenters([0.0], [1.0], 0.0))
        m = metrics(profile, GaussianBeam(waist_sigma=0.8))
        assert m.central_deficit == pytest.approx(0.2, rel=1e-12)
        assert m.reference_fwhm == pytest.approx(0.8 * FWHM_PER_SIGMA)

    def test_grid_resolves_center_spread(self, beam):
        wide = compose_intensity(beam, BeamCenters.symmetric_pair(0.5))
        narrow = compose_intensity(beam, BeamCenters.symmetric_pair(0.05))
        assert np.diff(wide.grid)[0] == pytest.approx(0.5 / 64, rel=0.05)
        assert np.diff(narrow.grid)[0] < np.diff(wide.grid)[0]
        assert metrics(narrow, beam).power == pytest.approx(1.0, rel=1e-10)


# ---------------------------------------------------------------------------
# Waist and modulation
# ---------------------------------------------------------------------------


def test_waist_for_deficit():
    assert waist_for_deficit(2e-19, 1e-9) == pytest.approx(1e-5, rel=1e-12)


def test_waist_for_deficit_rejects_target():
    with pytest.raises(DomainError):
        waist_for_deficit(1e-19, 0.0)


def test_modulation_report_scales_deficit():
    report = modulation_report(1e-9, 1e5)
    assert report.reported == pytest.approx(1e-4)
    assert "user-supplied" in report.to_dict()["gain_provenance"]


@pytest.mark.parametrize("deficit,gain", [(1e-9, 0.5), (-0.1, 10.0), (1.5, 1.0)])
def test_modulation_report_domain(deficit, gain):
    with pytest.raises(DomainError):
        modulation_report(deficit, gain)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def test_beam_requires_positive_waist():
    with pytest.raises(DomainError, match="GaussianBeam.waist_sigma"):
        GaussianBeam(waist_sigma=0.0)


def test_centers_length_mismatch():
    with pytest.raises(DomainError):
        BeamCenters([0.0, 1.0], [1.0], 0.0)


def test_centers_second_moment():
    centers = BeamCenters([-1.0, 1.0], [0.5, 0.5], [0.25, 0.25])
    assert centers.second_moment == pytest.approx(1.25)
    assert centers.spread == pytest.approx(math.sqrt(1.25))
