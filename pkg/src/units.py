"""
Natural-unit (hbar = c = 1, Heaviside-Lorentz) conversions.

Canonical internal units: energies in eV, lengths in meters, magnetic
fields in eV^2, couplings in eV^-1. Everything crosses this boundary
exactly once, in src.scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from src.constants import (
    ALPHA,
    B_CRIT_GAUSS_QUOTED,
    B_CRIT_TOLERANCE,
    E_CHARGE_NATURAL,
    GAUSS_TO_EV2,
    HC_EV_M,
    HC_EV_NM,
    INV_GEV_TO_INV_EV,
    M_E_EV,
)
from src.errors import ComputationError, DomainError


@dataclass(frozen=True)
class Constants:
    """Immutable bundle of the constants the mixing formulas consume."""

    alpha: float
    m_e: float
    B_crit: float
    gauss_to_ev2: float
    hc: float

    def __post_init__(self) -> None:
        for name in ("alpha", "m_e", "B_crit", "gauss_to_ev2", "hc"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"Constants.{name} must be finite and > 0, got {value}")

    @property
    def b_crit_natural(self) -> float:
        """Critical field in eV^2 (m_e^2 / e)."""
        return self.B_crit * self.gauss_to_ev2


DEFAULT_CONSTANTS = Constants(
    alpha=ALPHA,
    m_e=M_E_EV,
    B_crit=B_CRIT_GAUSS_QUOTED,
    gauss_to_ev2=GAUSS_TO_EV2,
    hc=HC_EV_NM,
)


def _require_finite(value: float, name: str) -> None:
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")


def gauss_to_natural(b: float) -> float:
    """
    Convert a field strength from gauss to eV^2.

    Raises
    ------
    DomainError
        If b is negative or non-finite.
    """
    _require_finite(b, "field strength")
    if b < 0:
        raise DomainError(f"field strength must be >= 0 gauss, got {b}")
    return b * GAUSS_TO_EV2


def natural_to_gauss(b_ev2: float) -> float:
    """Inverse of gauss_to_natural."""
    _require_finite(b_ev2, "field strength")
    if b_ev2 < 0:
        raise DomainError(f"field strength must be >= 0 eV^2, got {b_ev2}")
    return b_ev2 / GAUSS_TO_EV2


def gradient_to_natural(b1_gauss_per_m: float) -> float:
    """Transverse field gradient gauss/m -> eV^2/m. Sign is kept."""
    _require_finite(b1_gauss_per_m, "field gradient")
    return b1_gauss_per_m * GAUSS_TO_EV2


def wavelength_to_omega(wavelength_m: float) -> float:
    """
    Photon energy in eV for a vacuum wavelength in meters.

    Raises
    ------
    DomainError
        If the wavelength is not strictly positive.
    """
    _require_finite(wavelength_m, "wavelength")
    if wavelength_m <= 0:
        raise DomainError(f"wavelength must be > 0 m, got {wavelength_m}")
    return HC_EV_M / wavelength_m


def inverse_gev_to_inverse_ev(g_gev_inv: float) -> float:
    """Coupling GeV^-1 -> eV^-1."""
    _require_finite(g_gev_inv, "coupling")
    if g_gev_inv < 0:
        raise DomainError(f"coupling must be >= 0, got {g_gev_inv}")
    return g_gev_inv * INV_GEV_TO_INV_EV


def critical_field_natural() -> float:
    """m_e^2 / sqrt(4 pi alpha) in eV^2, independent of the gauss factor."""
    return M_E_EV**2 / E_CHARGE_NATURAL


def verify_critical_field(tolerance: float = B_CRIT_TOLERANCE) -> float:
    """
    Check the gauss -> eV^2 factor against the critical field.

    The quoted 4.4e13 G, converted with the CODATA-derived factor, has to
    land within ``tolerance`` of m_e^2/e computed from alpha and m_e alone.

    Returns
    -------
    float
        Relative deviation.

    Raises
    ------
    ComputationError
        If the deviation exceeds the tolerance.
    """
    oracle = critical_field_natural()
    converted = gauss_to_natural(B_CRIT_GAUSS_QUOTED)
    deviation = abs(converted - oracle) / oracle
    if deviation > tolerance:
        raise ComputationError(
            f"B_crit check failed: {converted:.6g} eV^2 vs m_e^2/e = "
            f"{oracle:.6g} eV^2 (deviation {deviation:.3%} > {tolerance:.0%})"
        )
    return deviation
