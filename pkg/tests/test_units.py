"""
Tests for src/units.py and the derived constants in src/constants.py.
"""

import math

import numpy as np
import pytest

from src.constants import GAUSS_TO_EV2, HC_EV_M, TESLA_TO_EV2
from src.errors import ComputationError, DomainError
from src.units import (
    DEFAULT_CONSTANTS,
    Constants,
    critical_field_natural,
    gauss_to_natural,
    gradient_to_natural,
    inverse_gev_to_inverse_ev,
    natural_to_gauss,
    verify_critical_field,
    wavelength_to_omega,
)


# ---------------------------------------------------------------------------
# Field conversion
# ---------------------------------------------------------------------------


def test_tesla_in_heaviside_lorentz_units():
    """1 T ~ 195.35 eV^2 with e = sqrt(4 pi alpha)."""
    assert TESLA_TO_EV2 == pytest.approx(195.35, rel=1e-3)
    assert GAUSS_TO_EV2 == pytest.approx(TESLA_TO_EV2 * 1e-4, rel=1e-15)


def test_gauss_to_natural_lab_field():
    assert gauss_to_natural(1e5) == pytest.approx(1953.5, rel=1e-3)


def test_gauss_to_natural_zero_is_allowed():
    assert gauss_to_natural(0.0) == 0.0


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_gauss_to_natural_rejects_bad_input(bad):
    with pytest.raises(DomainError):
        gauss_to_natural(bad)


def test_natural_to_gauss_inverts():
    assert natural_to_gauss(gauss_to_natural(4.4e13)) == pytest.approx(4.4e13, rel=1e-14)


@pytest.mark.parametrize("b", [float(b) for b in np.logspace(0.0, 16.0, 17)] + [3.7, 2.9e7, 8.123e15])
def test_gauss_round_trip_over_range(b):
    assert natural_to_gauss(gauss_to_natural(b)) == pytest.approx(b, rel=1e-14)


def test_gradient_keeps_sign():
    assert gradient_to_natural(-1e6) == pytest.approx(-gauss_to_natural(1e6), rel=1e-15)


# ---------------------------------------------------------------------------
# Other conversions
# ---------------------------------------------------------------------------


def test_wavelength_to_omega_one_micron():
    assert wavelength_to_omega(1e-6) == pytest.approx(1.23984, rel=1e-5)
    assert wavelength_to_omega(1e-6) == pytest.approx(HC_EV_M / 1e-6, rel=1e-15)


def test_wavelength_must_be_positive():
    with pytest.raises(DomainError):
        wavelength_to_omega(0.0)


def test_inverse_gev_to_inverse_ev():
    assert inverse_gev_to_inverse_ev(1e-10) == pytest.approx(1e-19, rel=1e-15)
    with pytest.raises(DomainError):
        inverse_gev_to_inverse_ev(-1e-10)


# ---------------------------------------------------------------------------
# Critical field consistency
# ---------------------------------------------------------------------------


def test_critical_field_from_electron_mass():
    """m_e^2 / e ~ 8.62e11 eV^2."""
    assert critical_field_natural() == pytest.approx(8.623e11, rel=1e-3)


def test_quoted_critical_field_within_tolerance():
    deviation = verify_critical_field()
    assert deviation < 0.01


def test_critical_field_check_fails_with_tight_tolerance():
    with pytest.raises(ComputationError, match="B_crit check failed"):
        verify_critical_field(tolerance=1e-5)


def test_default_constants_b_crit_natural():
    assert DEFAULT_CONSTANTS.b_crit_natural == pytest.approx(gauss_to_natural(4.4e13), rel=1e-15)


def test_constants_reject_non_positive():
    with pytest.raises(DomainError, match="Constants.alpha"):
        Constants(alpha=0.0, m_e=1.0, B_crit=1.0, gauss_to_ev2=1.0, hc=1.0)
