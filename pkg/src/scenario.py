"""
Scenario loading: the boundary between JSON config files (gauss, meters,
GeV^-1) and the natural-unit types used by the physics modules.

Configs are validated against every type invariant before anything is
built; validate_scenario reports all findings, not just the first.
Presets live in config/presets/*.json so their numbers can be audited.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import SimpleNamespace
from typing import Any

import yaml

from src.cavity import CavityConfig, cavity_findings
from src.constants import (
    CHECKPOINTS_PER_DECADE,
    LAB_B0_GAUSS,
    LAB_B1_GAUSS_PER_M,
    LAB_G_A_GEV_INV,
    LAB_LENGTH_M,
    LAB_PASSES,
    LAB_WAVELENGTH_M,
    MAGNETAR_B0_GAUSS,
    MAGNETAR_B1_GAUSS_PER_M,
    TRAJECTORY_SAMPLES,
)
from src.errors import ConfigIOError, ScenarioValidationError
from src.field_ray import LinearFieldProfile, field_findings, splitting_angle
from src.mixing import MediumParams, compute_q_terms, medium_findings, mode_solution
from src.profile import GaussianBeam, beam_findings
from src.units import (
    gauss_to_natural,
    gradient_to_natural,
    inverse_gev_to_inverse_ev,
    wavelength_to_omega,
)
from src.utils import config_path

SCENARIO_NAMES: tuple[str, ...] = ("lab_cavity", "magnetar", "custom")
MIXING_MODELS: tuple[str, ...] = ("symmetric", "exact")

# ---------------------------------------------------------------------------
# Config contract
# ---------------------------------------------------------------------------
REQUIRED_SECTIONS: list[str] = ["name", "medium", "field"]
REQUIRED_FIELD_KEYS: list[str] = ["b0_gauss", "b1_gauss_per_m", "length_m"]

# Pinned preset values (section, key, value)
_PRESET_PINS: dict[str, list[tuple[str, str, float]]] = {
    "lab_cavity": [
        ("field", "b0_gauss", LAB_B0_GAUSS),
        ("field", "b1_gauss_per_m", LAB_B1_GAUSS_PER_M),
        ("field", "length_m", LAB_LENGTH_M),
        ("medium", "wavelength_m", LAB_WAVELENGTH_M),
        ("medium", "g_a_gev_inv", LAB_G_A_GEV_INV),
        ("cavity", "passes", LAB_PASSES),
    ],
    "magnetar": [
        ("field", "b0_gauss", MAGNETAR_B0_GAUSS),
        ("field", "b1_gauss_per_m", MAGNETAR_B1_GAUSS_PER_M),
    ],
}
_MAGNETAR_F_G = 0.1

DEFAULT_PARAMS: dict[str, Any] = {
    "numerics": {
        "trajectory_samples": TRAJECTORY_SAMPLES,
        "checkpoints_per_decade": CHECKPOINTS_PER_DECADE,
    },
    "outputs": {"directory": "outputs"},
    "sensitivity": {
        "preset": "lab_cavity",
        "couplings_gev_inv": [1e-10, 1e-11, 1e-12, 1e-13, 1e-14],
        "pass_counts": [10, 100, 1000, 10000],
    },
}


@dataclass
class Scenario:
    name: str
    medium: MediumParams
    field: LinearFieldProfile
    length: float
    mixing_model: str = "symmetric"
    cavity: CavityConfig | None = None
    beam: GaussianBeam | None = None
    modulation_gain: float = 1.0
    outputs: str | None = None
    raw: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# File loading
# ---------------------------------------------------------------------------


def load_config(path: str | Path) -> dict:
    """
    Read a scenario JSON file.

    Raises
    ------
    ConfigIOError
        If the file is missing, unreadable or not a JSON object.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigIOError(f"Cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigIOError(f"Invalid JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigIOError(f"Config {path} must contain a JSON object")
    return raw


def preset_path(name: str) -> Path:
    return config_path("presets", f"{name}.json")


def list_presets() -> list[str]:
    return sorted(p.stem for p in config_path("presets").glob("*.json"))


def load_preset(name: str) -> dict:
    path = preset_path(name)
    if not path.exists():
        raise ConfigIOError(f"Unknown preset {name!r}; available: {list_presets()}")
    return load_config(path)


def load_params(path: str | Path | None = None) -> dict:
    """Runtime params from config/params.yaml merged over the defaults."""
    path = Path(path) if path is not None else config_path("params.yaml")
    params = json.loads(json.dumps(DEFAULT_PARAMS))
    if not path.exists():
        return params
    try:
        with open(path, encoding="utf-8") as f:
            loaded = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigIOError(f"Cannot load params {path}: {exc}") from exc
    for section, values in loaded.items():
        if isinstance(values, dict) and isinstance(params.get(section), dict):
            params[section].update(values)
        else:
            params[section] = values
    return params


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _number(
    section: dict, key: str, owner: str, errors: list[str], default: float | None = None
) -> float | None:
    value = section.get(key, default)
    if value is None:
        errors.append(f"{owner}: missing '{key}'")
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        errors.append(f"{owner}: '{key}' must be a finite number, got {value!r}")
        return None
    return float(value)


def _medium_values(medium: dict, errors: list[str]) -> dict[str, float | None]:
    has_wavelength = "wavelength_m" in medium
    has_omega = "omega_ev" in medium
    omega = None
    if has_wavelength == has_omega:
        errors.append("MediumParams.omega: give exactly one of 'wavelength_m' or 'omega_ev'")
    elif has_wavelength:
        wavelength = _number(medium, "wavelength_m", "MediumParams.omega", errors)
        if wavelength is not None:
            if wavelength <= 0:
                errors.append(f"MediumParams.omega: wavelength_m must be > 0, got {wavelength}")
            else:
                omega = wavelength_to_omega(wavelength)
    else:
        omega = _number(medium, "omega_ev", "MediumParams.omega", errors)
    g = _number(medium, "g_a_gev_inv", "MediumParams.g_a", errors)
    m_a = _number(medium, "m_a_ev", "MediumParams.m_a", errors, default=0.0)
    return {"omega": omega, "g_a": g, "m_a": m_a}


def validate_scenario(raw: dict) -> tuple[bool, list[str]]:
    """
    Check a raw scenario dict against every invariant of the types it builds.

    Returns
    -------
    tuple[bool, list[str]]
        ``(ok, findings)``; each finding names the offending type field,
        e.g. ``MediumParams.omega``.
    """
    findings: list[str] = []

    # 1. Required sections
    for key in REQUIRED_SECTIONS:
        if key not in raw:
            findings.append(f"Scenario: missing section '{key}'")
    name = raw.get("name")
    if "name" in raw and name not in SCENARIO_NAMES:
        findings.append(f"Scenario.name must be one of {list(SCENARIO_NAMES)}, got {name!r}")
    medium = raw.get("medium") or {}
    field_raw = raw.get("field") or {}
    for section_name, section in (("medium", medium), ("field", field_raw)):
        if not isinstance(section, dict):
            findings.append(f"Scenario.{section_name} must be an object")
    if not isinstance(medium, dict) or not isinstance(field_raw, dict):
        return False, findings

    # 2. Medium
    m = _medium_values(medium, findings)
    model = medium.get("mixing_model", "symmetric")
    if model not in MIXING_MODELS:
        findings.append(f"Scenario.mixing_model must be one of {list(MIXING_MODELS)}, got {model!r}")
    if "medium" in raw and all(v is not None for v in m.values()):
        medium_ns = SimpleNamespace(omega=m["omega"], b_field=0.0, g_a=m["g_a"], m_a=m["m_a"])
        findings.extend(e for e in medium_findings(medium_ns) if "b_field" not in e)

    # 3. Field
    b0 = _number(field_raw, "b0_gauss", "LinearFieldProfile.b0", findings)
    b1 = _number(field_raw, "b1_gauss_per_m", "LinearFieldProfile.b1", findings)
    y0 = _number(field_raw, "y0_m", "LinearFieldProfile.y0", findings, default=0.0)
    y_min = _number(field_raw, "y_min_m", "LinearFieldProfile.y_min", findings, default=-1.0)
    y_max = _number(field_raw, "y_max_m", "LinearFieldProfile.y_max", findings, default=1.0)
    length = _number(field_raw, "length_m", "CavityConfig.pass_length", findings)
    if None not in (b0, b1, y0, y_min, y_max):
        findings.extend(field_findings(SimpleNamespace(b0=b0, b1=b1, y0=y0, y_min=y_min, y_max=y_max)))
    if length is not None and length <= 0:
        findings.append(f"CavityConfig.pass_length (field.length_m) must be > 0, got {length}")

    # 4. Cavity
    cavity = raw.get("cavity")
    if cavity is not None:
        if not isinstance(cavity, dict):
            findings.append("Scenario.cavity must be an object")
        else:
            findings.extend(_cavity_section_findings(cavity, length))

    # 5. Beam
    beam = raw.get("beam")
    if beam is not None:
        if not isinstance(beam, dict):
            findings.append("Scenario.beam must be an object")
        else:
            sigma = _number(beam, "waist_sigma_m", "GaussianBeam.waist_sigma", findings)
            power = _number(beam, "total_power", "GaussianBeam.total_power", findings, default=1.0)
            gain = _number(beam, "modulation_gain", "ModulationReport.gain", findings, default=1.0)
            if sigma is not None and power is not None:
                findings.extend(beam_findings(SimpleNamespace(waist_sigma=sigma, total_power=power)))
            if gain is not None and gain < 1:
                findings.append(f"ModulationReport.gain must be >= 1, got {gain}")

    # 6. Preset pins
    findings.extend(_preset_findings(raw))

    return (len(findings) == 0, findings)


def _resolve_weights(choice: Any, phi: float | None) -> tuple[float, float] | None:
    if choice == "equal":
        return (0.5, 0.5)
    if choice == "mixing":
        if phi is None:
            return None
        return (math.cos(phi) ** 2, math.sin(phi) ** 2)
    if isinstance(choice, (list, tuple)) and len(choice) == 2 and all(
        isinstance(w, (int, float)) and not isinstance(w, bool) for w in choice
    ):
        return (float(choice[0]), float(choice[1]))
    raise ValueError(choice)


def _cavity_section_findings(cavity: dict, length: float | None) -> list[str]:
    errors: list[str] = []
    passes = cavity.get("passes")
    weights_spec = cavity.get("split_weights", "equal")
    try:
        weights = _resolve_weights(weights_spec, phi=None) or (0.5, 0.5)
    except ValueError:
        errors.append(
            "CavityConfig.split_weights must be 'equal', 'mixing' or [w_plus, w_minus], "
            f"got {weights_spec!r}"
        )
        weights = (0.5, 0.5)
    loss = cavity.get("axion_loss", "mixing")
    if loss == "mixing":
        loss = 0.0
    elif isinstance(loss, bool) or not isinstance(loss, (int, float)):
        errors.append(f"CavityConfig.axion_loss must be 'mixing' or a number, got {loss!r}")
        loss = 0.0
    cfg = SimpleNamespace(
        pass_length=length if length is not None and length > 0 else 1.0,
        passes=passes,
        theta_mode=0.0,
        split_weights=weights,
        axion_loss=float(loss),
    )
    errors.extend(cavity_findings(cfg))
    return errors


def _preset_findings(raw: dict) -> list[str]:
    name = raw.get("name")
    errors = []
    for section, key, expected in _PRESET_PINS.get(name, []):
        value = (raw.get(section) or {}).get(key)
        if value is None or not isinstance(value, (int, float)) or not math.isclose(value, expected, rel_tol=1e-12):
            errors.append(f"Scenario preset {name}: {section}.{key} must be {expected:g}, got {value!r}")
    if name == "magnetar":
        fld = raw.get("field") or {}
        try:
            f_g = fld["b1_gauss_per_m"] / fld["b0_gauss"] * fld["length_m"]
        except (KeyError, TypeError, ZeroDivisionError):
            f_g = None
        if f_g is None or not math.isclose(f_g, _MAGNETAR_F_G, rel_tol=1e-9):
            errors.append(f"Scenario preset magnetar: f_G must be {_MAGNETAR_F_G}, got {f_g!r}")
    return errors


# ---------------------------------------------------------------------------
# Building
# ---------------------------------------------------------------------------


def cavity_for_medium(
    cavity_raw: dict,
    medium: MediumParams,
    field_profile: LinearFieldProfile,
    length: float,
    model: str,
    passes: int,
) -> CavityConfig:
    """
    Cavity config for one medium: the deflection, and any "mixing" weights
    or loss, follow the medium's coupling.
    """
    phi = mode_solution(compute_q_terms(medium), medium.omega).phi
    angles = splitting_angle(medium, field_profile, length, model, require_geometric_factor=False)
    loss = cavity_raw.get("axion_loss", "mixing")
    return CavityConfig(
        pass_length=length,
        passes=passes,
        theta_mode=0.5 * angles.delta_theta,
        split_weights=_resolve_weights(cavity_raw.get("split_weights", "equal"), phi),
        axion_loss=math.sin(phi) ** 2 if loss == "mixing" else float(loss),
    )


def _passes_override_findings(passes: Any) -> list[str]:
    if isinstance(passes, bool) or not isinstance(passes, int) or passes < 1:
        return [f"CavityConfig.passes (cavity.passes override) must be an integer >= 1, got {passes!r}"]
    return []


def scenario_from_dict(raw: dict, passes: int | None = None) -> Scenario:
    """
    Validate a raw config and build the natural-unit Scenario.

    Parameters
    ----------
    raw : dict
        Parsed config file.
    passes : int, optional
        Override of cavity.passes. Checked on its own, since presets pin
        the configured value.

    Raises
    ------
    ScenarioValidationError
        If any invariant is violated (all findings are attached).
    PhysicsDomainError
        If deriving the cavity deflection leaves the physical domain.
    """
    _, findings = validate_scenario(raw)
    if passes is not None:
        findings.extend(_passes_override_findings(passes))
    if findings:
        raise ScenarioValidationError(findings)
    medium_raw = raw["medium"]
    field_raw = raw["field"]

    omega = (
        wavelength_to_omega(medium_raw["wavelength_m"])
        if "wavelength_m" in medium_raw
        else float(medium_raw["omega_ev"])
    )
    b0 = gauss_to_natural(field_raw["b0_gauss"])
    medium = MediumParams(
        omega=omega,
        b_field=b0,
        g_a=inverse_gev_to_inverse_ev(medium_raw["g_a_gev_inv"]),
        m_a=float(medium_raw.get("m_a_ev", 0.0)),
    )
    field_profile = LinearFieldProfile(
        b0=b0,
        b1=gradient_to_natural(field_raw["b1_gauss_per_m"]),
        y0=float(field_raw.get("y0_m", 0.0)),
        y_min=float(field_raw.get("y_min_m", -1.0)),
        y_max=float(field_raw.get("y_max_m", 1.0)),
    )
    length = float(field_raw["length_m"])
    model = medium_raw.get("mixing_model", "symmetric")

    cavity = None
    cavity_raw = raw.get("cavity")
    if cavity_raw is not None:
        n_passes = passes if passes is not None else int(cavity_raw["passes"])
        cavity = cavity_for_medium(cavity_raw, medium, field_profile, length, model, n_passes)

    beam = None
    gain = 1.0
    beam_raw = raw.get("beam")
    if beam_raw is not None:
        beam = GaussianBeam(
            waist_sigma=float(beam_raw["waist_sigma_m"]),
            total_power=float(beam_raw.get("total_power", 1.0)),
        )
        gain = float(beam_raw.get("modulation_gain", 1.0))

    return Scenario(
        name=raw["name"],
        medium=medium,
        field=field_profile,
        length=length,
        mixing_model=model,
        cavity=cavity,
        beam=beam,
        modulation_gain=gain,
        outputs=raw.get("outputs"),
        raw=raw,
    )
