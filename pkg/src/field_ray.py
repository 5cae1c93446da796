"""
Transverse field model, per-mode index profiles and ray trajectories.

Geometry: the beam travels along +z, the field gradient points along y.
Each mode sees its own index n(y); rays bend toward increasing n.

For a profile that depends on y only, n * l_z is conserved along the ray.
Writing a = n_e * l_z(entry), the tangent at any y on the path is

    |l_y| = sqrt((n - a)(n + a)) / n

and, for a linear profile n = n_e + b (y - y_e), the path is a catenary,
n(z) = a cosh(s) with s advancing as |b| dz / a. The closed form and the
inverse y(z) below are written in terms of h = n - a so that laboratory
excesses of ~1e-16 never go through 1 + tiny.

Three independent trajectory routes are provided: closed form,
quadrature of dz/dy, and ODE integration of the ray equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Protocol

import numpy as np
import pandas as pd
from scipy.integrate import quad, solve_ivp

from src.constants import (
    EFFECTIVE_PATH_LENGTH_M,
    ODE_ABS_TOL,
    ODE_REL_TOL,
    QUAD_ABS_TOL,
    TRAJECTORY_SAMPLES,
)
from src.errors import (
    CausticError,
    DegenerateProfileError,
    DomainError,
    EvanescentModeError,
    IntegrationError,
    QuadratureError,
    UndefinedGeometricFactorError,
)
from src.mixing import (
    MODES,
    MediumParams,
    Mode,
    compute_q_terms,
    mode_sign,
    mode_solution,
    symmetric_indices,
)
from src.units import DEFAULT_CONSTANTS, Constants

MixingModel = Literal["symmetric", "exact"]

_EPS = float(np.finfo(float).eps)


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearFieldProfile:
    """B(y) = b0 + b1 (y - y0) in eV^2, valid on [y_min, y_max]."""

    b0: float
    b1: float
    y0: float = 0.0
    y_min: float = -1.0
    y_max: float = 1.0

    def __post_init__(self) -> None:
        errors = field_findings(self)
        if errors:
            raise DomainError("; ".join(errors))

    def at(self, y: float) -> float:
        return self.b0 + self.b1 * (y - self.y0)


def field_findings(f: LinearFieldProfile) -> list[str]:
    errors = []
    values = (f.b0, f.b1, f.y0, f.y_min, f.y_max)
    if not all(math.isfinite(v) for v in values):
        return [f"LinearFieldProfile values must be finite, got {values}"]
    if f.b0 < 0:
        errors.append(f"LinearFieldProfile.b0 must be >= 0, got {f.b0}")
    if not f.y_min < f.y_max:
        errors.append(
            f"LinearFieldProfile domain must have y_min < y_max, got [{f.y_min}, {f.y_max}]"
        )
    elif not f.y_min <= f.y0 <= f.y_max:
        errors.append(f"LinearFieldProfile.y0 = {f.y0} outside [{f.y_min}, {f.y_max}]")
    for y in (f.y_min, f.y_max):
        if f.b0 + f.b1 * (y - f.y0) < 0:
            errors.append(f"LinearFieldProfile field is negative at y = {y} m")
    return errors


@dataclass(frozen=True)
class IndexProfile:
    """
    Linear index profile n(y) = n0 + b (y - y0) for one mode.

    dn0 is n0 - 1 carried at full precision.
    """

    mode: Mode
    n0: float
    b: float
    y0: float
    y_min: float
    y_max: float
    dn0: float = 0.0

    def __post_init__(self) -> None:
        sign = mode_sign(self.mode)
        if sign * self.dn0 < 0:
            raise DomainError(
                f"IndexProfile {self.mode}: n0 - 1 = {self.dn0} has the wrong sign"
            )
        for y in (self.y_min, self.y_max):
            if self.n(y) <= 0:
                raise EvanescentModeError(self.n(y) ** 2, y)

    def n(self, y: float) -> float:
        return self.n0 + self.b * (y - self.y0)

    def gradient(self, y: float) -> float:
        return self.b

    def rise(self, y_from: float, y: float) -> float:
        """n(y) - n(y_from), exact for a linear profile."""
        return self.b * (y - y_from)

    def contains(self, y: float) -> bool:
        return self.y_min <= y <= self.y_max


@dataclass(frozen=True)
class CallableProfile:
    """Arbitrary smooth n(y), used by the quadrature and ODE routes."""

    n_func: Callable[[float], float]
    gradient_func: Callable[[float], float]
    rise_func: Callable[[float, float], float] | None = None
    mode: Mode = "plus"
    y_min: float = -math.inf
    y_max: float = math.inf

    def n(self, y: float) -> float:
        return self.n_func(y)

    def gradient(self, y: float) -> float:
        return self.gradient_func(y)

    def rise(self, y_from: float, y: float) -> float:
        if self.rise_func is not None:
            return self.rise_func(y_from, y)
        return self.n_func(y) - self.n_func(y_from)

    def contains(self, y: float) -> bool:
        return self.y_min <= y <= self.y_max


class RayMedium(Protocol):
    mode: Mode

    def n(self, y: float) -> float: ...

    def gradient(self, y: float) -> float: ...

    def rise(self, y_from: float, y: float) -> float: ...

    def contains(self, y: float) -> bool: ...


@dataclass(frozen=True)
class RayState:
    y: float
    z: float = 0.0
    l_y: float = 0.0
    mode: Mode = "plus"

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.y, self.z, self.l_y)):
            raise DomainError(f"RayState values must be finite: {self}")
        if not -1.0 < self.l_y < 1.0:
            raise DomainError(f"RayState.l_y must be in (-1, 1), got {self.l_y}")
        mode_sign(self.mode)

    @property
    def l_z(self) -> float:
        return math.sqrt((1.0 - self.l_y) * (1.0 + self.l_y))


@dataclass
class Trajectory:
    """Sampled ray path. Arrays share one index."""

    mode: Mode
    method: str
    y: np.ndarray
    z: np.ndarray
    l_y: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.y)

    def exit_state(self) -> RayState:
        return RayState(y=float(self.y[-1]), z=float(self.z[-1]), l_y=float(self.l_y[-1]), mode=self.mode)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "y_m": self.y,
                "z_m": self.z,
                "l_y": self.l_y,
                "mode": self.mode,
            }
        )


# ---------------------------------------------------------------------------
# Index profile from the medium
# ---------------------------------------------------------------------------


def _exact_mode_gradient(
    params: MediumParams, b1: float, mode: Mode, constants: Constants
) -> tuple[float, float, float]:
    """(n, n - 1, dn/dy) of one exact mode, by chain rule through the eigenvalue."""
    q = compute_q_terms(params, constants)
    sol = mode_solution(q, params.omega)
    omega = params.omega
    dq_gamma = 2.0 * q.q_gamma / params.b_field * b1 if params.b_field > 0 else 0.0
    dq_m = omega * params.g_a * b1
    half_diff = 0.5 * (q.q_gamma - q.q_a)
    radius = math.hypot(half_diff, q.q_m)
    if radius > 0:
        d_radius = (half_diff * 0.5 * dq_gamma + q.q_m * dq_m) / radius
    else:
        d_radius = math.hypot(0.5 * dq_gamma, dq_m)
    sign = mode_sign(mode)
    d_lambda = 0.5 * dq_gamma + sign * d_radius
    n = sol.index(mode)
    return n, sol.excess(mode), d_lambda / (2.0 * omega**2 * n)


def index_profile(
    params: MediumParams,
    field_profile: LinearFieldProfile,
    mode: Mode,
    model: MixingModel = "symmetric",
    constants: Constants = DEFAULT_CONSTANTS,
) -> IndexProfile:
    """
    Linear index profile of one mode across the field region.

    Parameters
    ----------
    params : MediumParams
        Medium at the reference point; its b_field is replaced by B(y0).
    field_profile : LinearFieldProfile
        Transverse field model.
    mode : {"plus", "minus"}
    model : {"symmetric", "exact"}
        "symmetric" uses n = 1 +/- g B / 2 omega (Q_gamma = Q_a = 0);
        "exact" differentiates the full eigenvalue by the chain rule.

    Raises
    ------
    EvanescentModeError
        If the mode stops propagating anywhere on the domain (carries y).
    """
    sign = mode_sign(mode)
    medium = params.with_field(field_profile.b0)
    ends = (field_profile.y_min, field_profile.y_max)

    if model == "symmetric":
        if sign < 0:
            for y in ends:
                n_y = 1.0 - params.g_a * field_profile.at(y) / (2.0 * params.omega)
                if n_y <= 0:
                    raise EvanescentModeError(math.copysign(n_y * n_y, n_y), y)
        beta0 = params.g_a * field_profile.b0 / (2.0 * params.omega)
        n_plus, n_minus = symmetric_indices(beta0)
        n0 = n_plus if sign > 0 else n_minus
        dn0 = sign * beta0
        b = sign * params.g_a * field_profile.b1 / (2.0 * params.omega)
    elif model == "exact":
        for y in ends:
            try:
                mode_solution(compute_q_terms(params.with_field(field_profile.at(y)), constants), params.omega)
            except EvanescentModeError as exc:
                raise EvanescentModeError(exc.n_squared, y) from exc
        n0, dn0, b = _exact_mode_gradient(medium, field_profile.b1, mode, constants)
    else:
        raise DomainError(f"mixing model must be 'symmetric' or 'exact', got {model!r}")

    return IndexProfile(
        mode=mode,
        n0=n0,
        b=b,
        y0=field_profile.y0,
        y_min=field_profile.y_min,
        y_max=field_profile.y_max,
        dn0=dn0,
    )


def index_profiles(
    params: MediumParams,
    field_profile: LinearFieldProfile,
    model: MixingModel = "symmetric",
    constants: Constants = DEFAULT_CONSTANTS,
) -> dict[str, IndexProfile]:
    return {m: index_profile(params, field_profile, m, model, constants) for m in MODES}


# ---------------------------------------------------------------------------
# Linear-profile ray kinematics
# ---------------------------------------------------------------------------


def _acosh1p(u: float) -> float:
    """arccosh(1 + u) for u >= 0 without cancellation."""
    return math.log1p(u + math.sqrt(u * (2.0 + u)))


class _LinearRay:
    """First-integral kinematics of one ray in a linear profile (b != 0)."""

    def __init__(self, profile: IndexProfile, entry: RayState) -> None:
        if profile.b == 0:
            raise DegenerateProfileError(
                "Index gradient b = 0: the ray is a straight line"
            )
        if not profile.contains(entry.y):
            raise DomainError(f"entry y = {entry.y} outside profile domain")
        self.profile = profile
        self.entry = entry
        self.b = profile.b
        self.abs_b = abs(profile.b)
        self.sign_b = 1.0 if profile.b > 0 else -1.0
        self.n_e = profile.n(entry.y)
        l_z = entry.l_z
        # n_e - a, with a = n_e l_z
        self.gap = self.n_e * entry.l_y**2 / (1.0 + l_z)
        self.a = self.n_e * l_z
        self.heading_down = entry.l_y * profile.b < 0

    @property
    def y_turn(self) -> float:
        return self.entry.y - self.gap / self.b

    def h(self, y: float) -> float:
        """n(y) - a."""
        return self.profile.rise(self.entry.y, y) + self.gap

    def leg(self, y: float) -> str:
        """Which leg of the path reaches y first: 'out' or 'return'."""
        rise = self.profile.rise(self.entry.y, y)
        if not self.heading_down:
            if rise < 0:
                raise DomainError(
                    f"branch mismatch: y = {y} lies behind the entry of a ray "
                    f"bending toward {'+' if self.b > 0 else '-'}y"
                )
            return "out"
        return "out" if rise <= 0 else "return"

    def _check_h(self, y: float) -> float:
        rise = self.profile.rise(self.entry.y, y)
        h = rise + self.gap
        if h < 0:
            # y_turn itself may land an ulp past the turning point
            if h >= -4.0 * _EPS * (abs(rise) + self.gap):
                return 0.0
            raise CausticError(self.y_turn)
        return h

    def l_y(self, y: float, leg: str) -> float:
        h = self._check_h(y)
        n = self.a + h
        magnitude = math.sqrt(h * (n + self.a)) / n
        if leg == "out" and self.heading_down:
            return -self.sign_b * magnitude
        return self.sign_b * magnitude

    def _arc(self, h: float) -> float:
        """(a/|b|) arccosh(n/a)."""
        return self.a / self.abs_b * _acosh1p(h / self.a)

    def z(self, y: float, leg: str) -> float:
        h = self._check_h(y)
        base = self._arc(self.gap)
        if not self.heading_down:
            return self.entry.z + self._arc(h) - base
        if leg == "out":
            return self.entry.z + base - self._arc(h)
        return self.entry.z + base + self._arc(h)

    def along_z(self, dz: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(y, l_y) after advancing dz >= 0 along the beam axis."""
        s_e = _acosh1p(self.gap / self.a)
        if self.heading_down:
            s_e = -s_e
        s = s_e + self.abs_b * dz / self.a
        dn = 2.0 * self.a * np.sinh(0.5 * (s + s_e)) * np.sinh(0.5 * (s - s_e))
        return self.entry.y + dn / self.b, self.sign_b * np.tanh(s)


def _check_in_domain(profile: RayMedium, ys: np.ndarray) -> None:
    for y in (float(np.min(ys)), float(np.max(ys))):
        if not profile.contains(y):
            raise DomainError(f"trajectory leaves the profile domain at y = {y:.6g} m")


def tangent_ly(profile: IndexProfile, y: float, entry: RayState) -> float:
    """
    Transverse tangent component where the ray first reaches y.

    Normal entry gives l_y = sign(b) sqrt(1 - n0^2/n^2): the ray bends up
    its own gradient. For an oblique entry the constant a = n_e l_z(entry)
    fixes the branch.

    Raises
    ------
    CausticError
        If the ray turns around before reaching y.
    DomainError
        If y is behind the entry on a ray that never goes there.
    """
    if profile.b == 0:
        return entry.l_y
    ray = _LinearRay(profile, entry)
    return ray.l_y(y, ray.leg(y))


def trajectory_closed_form(
    profile: IndexProfile,
    entry: RayState,
    y_end: float,
    n_samples: int = TRAJECTORY_SAMPLES,
) -> Trajectory:
    """
    Analytic path z(y) from the entry to y_end.

    For normal entry z - z0 = (n0/|b|) arccosh(n/n0). Oblique entries that
    head down the gradient pass through the turning point and come back.

    Raises
    ------
    DegenerateProfileError
        If b = 0.
    CausticError, DomainError
        If y_end cannot be reached.
    """
    ray = _LinearRay(profile, entry)
    leg = ray.leg(y_end)
    if leg == "out":
        ys = np.linspace(entry.y, y_end, n_samples)
        legs = ["out"] * n_samples
    else:
        n_out = max(n_samples // 2, 2)
        y_turn = ray.y_turn
        ys = np.concatenate(
            [np.linspace(entry.y, y_turn, n_out), np.linspace(y_turn, y_end, n_samples - n_out + 1)[1:]]
        )
        legs = ["out"] * n_out + ["return"] * (len(ys) - n_out)
    _check_in_domain(profile, ys)
    zs = np.array([ray.z(float(y), lg) for y, lg in zip(ys, legs)])
    lys = np.array([ray.l_y(float(y), lg) for y, lg in zip(ys, legs)])
    return Trajectory(profile.mode, "closed_form", ys, zs, lys)


def trajectory_along_z(
    profile: IndexProfile,
    entry: RayState,
    length: float,
    n_samples: int = TRAJECTORY_SAMPLES,
) -> Trajectory:
    """Path sampled uniformly in z over [z0, z0 + length]; b = 0 gives a straight line."""
    if length < 0:
        raise DomainError(f"length must be >= 0, got {length}")
    dz = np.linspace(0.0, length, n_samples)
    if profile.b == 0:
        ys = entry.y + dz * entry.l_y / entry.l_z
        lys = np.full_like(dz, entry.l_y)
    else:
        ys, lys = _LinearRay(profile, entry).along_z(dz)
    _check_in_domain(profile, ys)
    return Trajectory(profile.mode, "along_z", ys, entry.z + dz, lys)


def trajectory_quadrature(
    profile: RayMedium,
    entry: RayState,
    y_end: float,
    n_samples: int = TRAJECTORY_SAMPLES,
    abs_tol: float = QUAD_ABS_TOL,
    rel_tol: float = 1e-12,
) -> Trajectory:
    """
    z(y) by adaptive quadrature of dz/dy = a / sqrt((n - a)(n + a)).

    The 1/sqrt(y - y_e) singularity at normal entry is removed with
    y = y_e + sign * u^2. Only monotone-in-y paths are supported.

    Raises
    ------
    DegenerateProfileError
        If the profile is uniform at the entry.
    CausticError
        If the ray turns before y_end.
    QuadratureError
        If any segment misses the tolerance.
    """
    if isinstance(profile, IndexProfile) and profile.b == 0:
        raise DegenerateProfileError("Index gradient b = 0: use a straight line")
    y_e = entry.y
    n_e = profile.n(y_e)
    l_z = entry.l_z
    a = n_e * l_z
    gap = n_e * entry.l_y**2 / (1.0 + l_z)
    direction = 1.0 if y_end >= y_e else -1.0

    def integrand(u: float) -> float:
        y = y_e + direction * u * u
        h = profile.rise(y_e, y) + gap
        if h <= 0:
            if u == 0:
                return 0.0
            raise CausticError(y)
        n = a + h
        return 2.0 * u * a / math.sqrt(h * (n + a))

    ys = np.linspace(y_e, y_end, n_samples)
    _check_in_domain(profile, ys)
    us = np.sqrt(np.abs(ys - y_e))
    zs = np.empty_like(ys)
    zs[0] = entry.z
    total_err = 0.0
    for k in range(1, len(us)):
        value, abserr = quad(integrand, us[k - 1], us[k], epsabs=abs_tol, epsrel=rel_tol, limit=200)
        if abserr > max(abs_tol, rel_tol * abs(value)):
            raise QuadratureError(value, abserr, abs_tol)
        zs[k] = zs[k - 1] + value
        total_err += abserr
    lys = np.empty_like(ys)
    for k, y in enumerate(ys):
        h = profile.rise(y_e, float(y)) + gap
        n = a + h
        lys[k] = direction * math.sqrt(max(h, 0.0) * (n + a)) / n
    return Trajectory(profile.mode, "quadrature", ys, zs, lys, meta={"abserr": total_err})


def trajectory_ode(
    n_of_y: RayMedium,
    entry: RayState,
    arclength: float,
    n_samples: int = TRAJECTORY_SAMPLES,
    rtol: float = ODE_REL_TOL,
    atol: float = ODE_ABS_TOL,
    y_stop: float | None = None,
) -> Trajectory:
    """
    Integrate the ray equation dl/ds = (grad n - l (l . grad n)) / n.

    The tangent is carried as an angle theta from the z axis, so
    l = (sin theta, cos theta) stays a unit vector exactly and
    d theta / ds = n'(y) cos theta / n.

    Parameters
    ----------
    y_stop : float, optional
        Terminal event: stop when the ray crosses this y.

    Raises
    ------
    IntegrationError
        If the integrator fails.
    """
    if arclength <= 0:
        raise DomainError(f"arclength must be > 0, got {arclength}")

    def rhs(_s: float, state: np.ndarray) -> list[float]:
        y, _z, theta = state
        return [
            math.sin(theta),
            math.cos(theta),
            n_of_y.gradient(y) * math.cos(theta) / n_of_y.n(y),
        ]

    events = None
    if y_stop is not None:

        def crossing(_s: float, state: np.ndarray) -> float:
            return state[0] - y_stop

        crossing.terminal = True
        events = crossing

    theta0 = math.asin(entry.l_y)
    s_eval = np.linspace(0.0, arclength, n_samples)
    sol = solve_ivp(
        rhs,
        (0.0, arclength),
        [entry.y, entry.z, theta0],
        method="DOP853",
        t_eval=s_eval,
        rtol=rtol,
        atol=atol,
        events=events,
    )
    if not sol.success:
        raise IntegrationError(f"ray ODE failed: {sol.message}")
    ys, zs, thetas = sol.y
    return Trajectory(n_of_y.mode, "ode", ys, zs, np.sin(thetas), meta={"s": sol.t})


# ---------------------------------------------------------------------------
# Refraction at discontinuities
# ---------------------------------------------------------------------------


def refract_at_entry(l_y_in: float, n_outside: float, n_mode: float) -> float:
    """
    Snell's law at the entry face z = const: n_out l_y,out = n_mode l_y,in.

    Raises
    ------
    DomainError
        On total internal reflection.
    """
    l_y = n_outside * l_y_in / n_mode
    if abs(l_y) >= 1.0:
        raise DomainError(f"total internal reflection at entry (l_y = {l_y})")
    return l_y


def cross_index_step(l_y: float, n1: float, n2: float) -> float:
    """
    Tangent after crossing a y = const step n1 -> n2; n l_z is conserved.

    Raises
    ------
    CausticError
        If the ray is totally reflected at the step.
    """
    l_z2 = n1 * math.sqrt((1.0 - l_y) * (1.0 + l_y)) / n2
    if l_z2 >= 1.0:
        raise CausticError(math.nan, f"total internal reflection at index step {n1} -> {n2}")
    return math.copysign(math.sqrt((1.0 - l_z2) * (1.0 + l_z2)), l_y)


# ---------------------------------------------------------------------------
# Angle estimates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplittingAngles:
    theta_plus: float
    theta_minus: float
    delta_theta: float
    f_G: float | None
    model: str = "symmetric"

    def to_dict(self) -> dict:
        return {
            "theta_plus_rad": self.theta_plus,
            "theta_minus_rad": self.theta_minus,
            "delta_theta_rad": self.delta_theta,
            "f_G": self.f_G,
            "model": self.model,
        }


def refraction_angle(profile: IndexProfile, length: float) -> float:
    """Lowest-order exit angle b L / n0 of a normally entering ray."""
    return profile.b * length / profile.n0


def splitting_angle(
    params: MediumParams,
    field_profile: LinearFieldProfile,
    length: float,
    model: MixingModel = "symmetric",
    require_geometric_factor: bool = True,
    constants: Constants = DEFAULT_CONSTANTS,
) -> SplittingAngles:
    """
    Per-mode refraction angles, their difference and the geometric factor.

    With the symmetric model theta_+/- = +/- g_a B1 L / (2 omega n0) and
    delta_theta ~ g_a B1 L / omega. f_G = (B1 / B0) L.

    Raises
    ------
    DomainError
        If length <= 0.
    UndefinedGeometricFactorError
        If B0 = 0 and the geometric factor is required.
    """
    if not (math.isfinite(length) and length > 0):
        raise DomainError(f"length must be > 0, got {length}")
    profiles = index_profiles(params, field_profile, model, constants)
    theta_plus = refraction_angle(profiles["plus"], length)
    theta_minus = refraction_angle(profiles["minus"], length)
    if field_profile.b0 == 0:
        if require_geometric_factor:
            raise UndefinedGeometricFactorError("f_G = (B1/B0) L is undefined for B0 = 0")
        f_g = None
    else:
        f_g = field_profile.b1 / field_profile.b0 * length
    return SplittingAngles(
        theta_plus=theta_plus,
        theta_minus=theta_minus,
        delta_theta=abs(theta_plus - theta_minus),
        f_G=f_g,
        model=model,
    )


def effective_length_splitting(
    delta_theta: float, length: float, effective_length: float = EFFECTIVE_PATH_LENGTH_M
) -> float:
    """Splitting if the per-pass angle kept accumulating over the whole cavity path."""
    if length <= 0:
        raise DomainError(f"length must be > 0, got {length}")
    return delta_theta / length * effective_length
