"""
Photon-axion dispersion system: Q terms, eigen-modes, refraction indices,
mixing angle and mixing matrix.

The 2x2 Hermitian dispersion matrix is

    M = [[Q_gamma, -i Q_M],
         [i Q_M,    Q_a  ]]

with Q_gamma = omega^2 (7 alpha / 45 pi)(B/B_crit)^2, Q_a = -m_a^2 and
Q_M = omega g_a B. Its eigenvalues shift the photon wavenumber as
k^2 = omega^2 + lambda, so n^2 = 1 + lambda/omega^2.

At laboratory magnitudes lambda/omega^2 is ~1e-16, so the index excess
n - 1 is carried separately (log1p/expm1) instead of being recovered from n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.constants import EH_COEFFICIENT
from src.errors import ComputationError, DomainError, EvanescentModeError
from src.units import DEFAULT_CONSTANTS, Constants

Mode = Literal["plus", "minus"]
MODES: tuple[Mode, Mode] = ("plus", "minus")


def mode_sign(mode: Mode) -> int:
    """+1 for the plus mode, -1 for the minus mode."""
    if mode == "plus":
        return 1
    if mode == "minus":
        return -1
    raise DomainError(f"mode must be 'plus' or 'minus', got {mode!r}")


@dataclass(frozen=True)
class MediumParams:
    """Physical inputs in natural units: omega (eV), b_field (eV^2), g_a (eV^-1), m_a (eV)."""

    omega: float
    b_field: float
    g_a: float
    m_a: float = 0.0

    def __post_init__(self) -> None:
        errors = medium_findings(self)
        if errors:
            raise DomainError("; ".join(errors))

    def with_field(self, b_field: float) -> "MediumParams":
        return MediumParams(self.omega, b_field, self.g_a, self.m_a)


def medium_findings(p: MediumParams) -> list[str]:
    """All invariant violations of a MediumParams, prefixed with the field name."""
    errors = []
    if not (math.isfinite(p.omega) and p.omega > 0):
        errors.append(f"MediumParams.omega must be > 0, got {p.omega}")
    for name in ("b_field", "g_a", "m_a"):
        value = getattr(p, name)
        if not (math.isfinite(value) and value >= 0):
            errors.append(f"MediumParams.{name} must be >= 0, got {value}")
    return errors


@dataclass(frozen=True)
class QTerms:
    q_gamma: float
    q_a: float
    q_m: float


@dataclass(frozen=True)
class ModeSolution:
    """
    Eigen-decomposition of the dispersion matrix at one field value.

    dn_plus / dn_minus are n - 1 computed without cancellation; use them
    instead of ``n_plus - 1`` whenever the excess is below ~1e-8.
    """

    lambda_plus: float
    lambda_minus: float
    n_plus: float
    n_minus: float
    phi: float
    dn_plus: float
    dn_minus: float

    def index(self, mode: Mode) -> float:
        return self.n_plus if mode_sign(mode) > 0 else self.n_minus

    def excess(self, mode: Mode) -> float:
        return self.dn_plus if mode_sign(mode) > 0 else self.dn_minus

    def eigenvalue(self, mode: Mode) -> float:
        return self.lambda_plus if mode_sign(mode) > 0 else self.lambda_minus

    def to_dict(self) -> dict[str, float]:
        return {
            "lambda_plus_ev2": self.lambda_plus,
            "lambda_minus_ev2": self.lambda_minus,
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "dn_plus": self.dn_plus,
            "dn_minus": self.dn_minus,
            "phi_rad": self.phi,
        }


def compute_q_terms(p: MediumParams, constants: Constants = DEFAULT_CONSTANTS) -> QTerms:
    """
    Entries of the dispersion matrix for a medium.

    Parameters
    ----------
    p : MediumParams
        Natural-unit inputs.
    constants : Constants
        Source of B_crit; defaults to CODATA values.

    Returns
    -------
    QTerms

    Raises
    ------
    ComputationError
        If any entry is non-finite.
    """
    ratio = p.b_field / constants.b_crit_natural
    q_gamma = p.omega**2 * EH_COEFFICIENT * ratio**2
    q_a = -(p.m_a**2)
    q_m = p.omega * p.g_a * p.b_field
    for name, value in (("q_gamma", q_gamma), ("q_a", q_a), ("q_m", q_m)):
        if not math.isfinite(value):
            raise ComputationError(f"{name} is not finite ({value}) for {p}")
    return QTerms(q_gamma=q_gamma, q_a=q_a + 0.0, q_m=q_m)


def eigenvalues(q: QTerms) -> tuple[float, float]:
    """
    (lambda_plus, lambda_minus) of the dispersion matrix.

    The larger-magnitude root comes from the sum, the other from the
    product lambda_+ lambda_- = Q_gamma Q_a - Q_M^2, so neither loses
    digits when |Q_a| >> Q_gamma, Q_M.
    """
    mean = 0.5 * (q.q_gamma + q.q_a)
    radius = math.hypot(0.5 * (q.q_gamma - q.q_a), q.q_m)
    product = q.q_gamma * q.q_a - q.q_m**2
    if mean >= 0:
        lam_plus = mean + radius
        lam_minus = product / lam_plus if lam_plus != 0 else mean - radius
    else:
        lam_minus = mean - radius
        lam_plus = product / lam_minus
    return lam_plus, lam_minus


def _index_from_eigenvalue(lam: float, omega: float) -> tuple[float, float]:
    x = lam / omega**2
    if x <= -1.0:
        raise EvanescentModeError(1.0 + x)
    dn = math.expm1(0.5 * math.log1p(x))
    return 1.0 + dn, dn


def mixing_angle(q: QTerms) -> float:
    """phi from tan 2phi = 2 Q_M / (Q_gamma - Q_a); pi/4 at Q_gamma = Q_a."""
    return 0.5 * math.atan2(2.0 * q.q_m, q.q_gamma - q.q_a)


def mode_solution(q: QTerms, omega: float) -> ModeSolution:
    """
    Diagonalize the dispersion matrix and return per-mode indices.

    Raises
    ------
    DomainError
        If omega is not positive.
    EvanescentModeError
        If n_minus^2 <= 0 (or n_plus^2, for unphysical inputs).
    """
    if not (math.isfinite(omega) and omega > 0):
        raise DomainError(f"omega must be > 0, got {omega}")
    lam_plus, lam_minus = eigenvalues(q)
    n_minus, dn_minus = _index_from_eigenvalue(lam_minus, omega)
    n_plus, dn_plus = _index_from_eigenvalue(lam_plus, omega)
    return ModeSolution(
        lambda_plus=lam_plus,
        lambda_minus=lam_minus,
        n_plus=n_plus,
        n_minus=n_minus,
        phi=mixing_angle(q),
        dn_plus=dn_plus,
        dn_minus=dn_minus,
    )


def symmetric_beta(p: MediumParams) -> float:
    """beta = g_a B / (2 omega)."""
    return p.g_a * p.b_field / (2.0 * p.omega)


def symmetric_indices(beta: float) -> tuple[float, float]:
    """
    Maximal-mixing indices (1 + beta, 1 - beta).

    Raises
    ------
    DomainError
        If beta is outside [0, 1).
    """
    if not (math.isfinite(beta) and 0.0 <= beta < 1.0):
        raise DomainError(f"beta must be in [0, 1), got {beta}")
    return 1.0 + beta, 1.0 - beta


def dispersion_matrix(q: QTerms) -> np.ndarray:
    return np.array(
        [[q.q_gamma, -1j * q.q_m], [1j * q.q_m, q.q_a]],
        dtype=complex,
    )


def mixing_matrix(phi: float) -> np.ndarray:
    """R = [[cos phi, i sin phi], [i sin phi, cos phi]]; columns are the plus/minus eigenstates."""
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)


def mix_states(
    phi: float, photon_amp: complex, axion_amp: complex
) -> tuple[complex, complex]:
    """Apply the unitary mixing matrix to a (photon, axion) amplitude pair."""
    values = (phi, complex(photon_amp), complex(axion_amp))
    if not all(np.isfinite(v) for v in values):
        raise DomainError(f"mix_states inputs must be finite, got {values}")
    out = mixing_matrix(phi) @ np.array([photon_amp, axion_amp], dtype=complex)
    return complex(out[0]), complex(out[1])
