"""
Scenario pipeline: mixing -> ray -> cavity -> profile, written to disk.

run_scenario is deterministic: identical configs produce byte-identical
files (sorted-key JSON, 17-significant-digit CSV, no timestamps).
"""

from __future__ import annotations

import math
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import scipy

import src
from src.cavity import (
    checkpoint_passes,
    linear_split_spread,
    propagate_moments,
)
from src.constants import (
    B_CRIT_GAUSS_QUOTED,
    DEFICIT_QUOTED,
    EFFECTIVE_SPLITTING_QUOTED_RAD,
    GROWTH_EXPONENT_AFFINE,
    GROWTH_EXPONENT_QUOTED,
    INTEGRATED_DEFICIT_QUOTED,
    INV_GEV_TO_INV_EV,
    LAB_GEOMETRIC_FACTOR_QUOTED,
    LAB_SEPARATION_QUOTED_M,
    LAB_SPLITTING_QUOTED_RAD,
    MAGNETAR_SPLITTING_QUOTED_RAD,
    SPLITTING_PER_COUPLING_QUOTED,
)
from src.field_ray import (
    RayState,
    effective_length_splitting,
    index_profiles,
    splitting_angle,
    trajectory_along_z,
)
from src.mixing import MODES, compute_q_terms, mode_solution, symmetric_beta
from src.profile import (
    BeamCenters,
    compose_intensity,
    metrics,
    modulation_report,
    waist_for_deficit,
)
from src.scenario import Scenario, load_params
from src.units import critical_field_natural, gauss_to_natural, verify_critical_field
from src.utils import config_hash, from_project_root, outputs_path, write_csv, write_json


@dataclass
class ResultBundle:
    out_dir: Path
    files: dict[str, Path] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)
    manifest: dict[str, Any] = field(default_factory=dict)


def _comparison(label: str, quoted: float | None, computed: float | None, unit: str, note: str = "") -> dict:
    ratio = None
    if quoted and computed is not None and math.isfinite(computed):
        ratio = computed / quoted
    return {
        "label": label,
        "quoted": quoted,
        "computed": computed,
        "ratio": ratio,
        "unit": unit,
        "note": note,
    }


def resolve_out_dir(scenario: Scenario, out_dir: str | Path | None, params: dict | None = None) -> Path:
    """
    Output directory for a run.

    An explicit ``out_dir`` (the --out flag) is used as given. Otherwise the
    scenario's ``outputs`` entry, or ``<outputs.directory>/<name>`` from the
    runtime params, is resolved against the project root.
    """
    if out_dir is not None:
        return Path(out_dir)
    if scenario.outputs:
        return from_project_root(scenario.outputs)
    params = params or load_params()
    directory = params.get("outputs", {}).get("directory", "outputs")
    return outputs_path(scenario.name, directory=directory)


def run_scenario(
    scenario: Scenario,
    out_dir: str | Path | None = None,
    params: dict | None = None,
) -> ResultBundle:
    """
    Execute every stage the scenario enables and write the result files.

    Always writes indices.json, trajectories.csv and manifest.json; the
    cavity adds lattice.csv and spread.json; the beam adds profile.csv
    and metrics.json.

    Raises
    ------
    PhysicsDomainError
        Propagated from any stage.
    """
    params = params or load_params()
    numerics = params.get("numerics", {})
    n_samples = int(numerics.get("trajectory_samples", 201))
    per_decade = int(numerics.get("checkpoints_per_decade", 8))

    out = resolve_out_dir(scenario, out_dir, params)
    out.mkdir(parents=True, exist_ok=True)
    bundle = ResultBundle(out_dir=out)
    b_crit_deviation = verify_critical_field()

    # --- Mixing ----------------------------------------------------------------
    medium = scenario.medium
    q = compute_q_terms(medium)
    solution = mode_solution(q, medium.omega)
    beta = symmetric_beta(medium)
    profiles = index_profiles(medium, scenario.field, scenario.mixing_model)
    indices = {
        "omega_ev": medium.omega,
        "b_field_ev2": medium.b_field,
        "g_a_ev_inv": medium.g_a,
        "m_a_ev": medium.m_a,
        "q_terms": {"q_gamma_ev2": q.q_gamma, "q_a_ev2": q.q_a, "q_m_ev2": q.q_m},
        "mode_solution": solution.to_dict(),
        "beta": beta,
        "symmetric_indices": {"n_plus": 1.0 + beta, "n_minus": 1.0 - beta},
        "mixing_model": scenario.mixing_model,
        "index_profiles": {
            m: {"n0": p.n0, "dn0": p.dn0, "b_per_m": p.b} for m, p in profiles.items()
        },
    }
    bundle.files["indices"] = write_json(indices, out / "indices.json")

    # --- Rays --------------------------------------------------------------------
    angles = splitting_angle(
        medium, scenario.field, scenario.length, scenario.mixing_model, require_geometric_factor=False
    )
    trajectories = [
        trajectory_along_z(profiles[m], RayState(y=scenario.field.y0, z=0.0, l_y=0.0, mode=m), scenario.length, n_samples)
        for m in MODES
    ]
    frame = pd.concat([t.to_frame() for t in trajectories], ignore_index=True)
    bundle.files["trajectories"] = write_csv(frame, out / "trajectories.csv")
    exit_y = {t.mode: float(t.y[-1]) for t in trajectories}

    # --- Cavity ------------------------------------------------------------------
    lattice = report = control = None
    if scenario.cavity is not None:
        cavity = scenario.cavity
        checkpoints = checkpoint_passes(cavity.passes, per_decade)
        lattice, report = propagate_moments(cavity, checkpoints)
        control = linear_split_spread(cavity, checkpoints)
        bundle.files["lattice"] = write_csv(lattice.to_frame(), out / "lattice.csv")
        spread = {
            "bifurcating": report.to_dict(),
            "linear_control": control.to_dict(),
            "exponent_references": {
                "quoted_sqrt2": GROWTH_EXPONENT_QUOTED,
                "affine_walk": GROWTH_EXPONENT_AFFINE,
            },
            "theta_mode_rad": cavity.theta_mode,
            "split_weights": list(cavity.split_weights),
            "axion_loss": cavity.axion_loss,
        }
        bundle.files["spread"] = write_json(spread, out / "spread.json")

    # --- Profile -----------------------------------------------------------------
    profile_metrics = modulation = None
    waist_needed = None
    if scenario.beam is not None:
        if lattice is not None:
            centers = BeamCenters.from_lattice(lattice)
        else:
            weights = [0.5, 0.5]
            centers = BeamCenters(np.array([exit_y["plus"], exit_y["minus"]]), np.array(weights), 0.0)
        composite = compose_intensity(scenario.beam, centers)
        profile_metrics = metrics(composite, scenario.beam)
        modulation = modulation_report(profile_metrics.central_deficit, scenario.modulation_gain)
        if centers.second_moment > 0:
            waist_needed = waist_for_deficit(centers.second_moment, DEFICIT_QUOTED)
        bundle.files["profile"] = write_csv(composite.to_frame(), out / "profile.csv")
        bundle.files["metrics"] = write_json(
            {
                "metrics": profile_metrics.to_dict(),
                "modulation": modulation.to_dict(),
                "waist_sigma_m": scenario.beam.waist_sigma,
                "waist_sigma_for_quoted_deficit_m": waist_needed,
                "center_rms_m": centers.spread,
            },
            out / "metrics.json",
        )

    # --- Manifest ----------------------------------------------------------------
    comparisons = [
        _comparison(
            "critical field B_crit (eV^2)",
            gauss_to_natural(B_CRIT_GAUSS_QUOTED),
            critical_field_natural(),
            "eV^2",
            f"relative deviation {b_crit_deviation:.3e}",
        )
    ]
    if scenario.name == "magnetar":
        comparisons.append(
            _comparison("splitting angle", MAGNETAR_SPLITTING_QUOTED_RAD, angles.delta_theta, "rad", "order of magnitude")
        )
    else:
        comparisons.append(_comparison("splitting angle", LAB_SPLITTING_QUOTED_RAD, angles.delta_theta, "rad"))
        comparisons.append(
            _comparison(
                "splitting per unit coupling",
                SPLITTING_PER_COUPLING_QUOTED,
                angles.delta_theta / (medium.g_a / INV_GEV_TO_INV_EV) if medium.g_a > 0 else None,
                "rad per GeV^-1",
            )
        )
        comparisons.append(_comparison("geometric factor f_G", LAB_GEOMETRIC_FACTOR_QUOTED, angles.f_G, "", "quoted for the upper end of the field range"))
        comparisons.append(
            _comparison(
                "splitting over effective path",
                EFFECTIVE_SPLITTING_QUOTED_RAD,
                effective_length_splitting(angles.delta_theta, scenario.length),
                "rad",
                "per-pass angle accumulated over 1e5 m without re-splitting",
            )
        )
    if report is not None:
        comparisons.append(_comparison("weighted separation", LAB_SEPARATION_QUOTED_M, report.weighted_separation, "m"))
        comparisons.append(_comparison("spread std_y vs affine-walk formula", report.analytic_std, report.std_y, "m"))
        comparisons.append(_comparison("growth exponent vs sqrt(2)", GROWTH_EXPONENT_QUOTED, report.fitted_exponent, ""))
        comparisons.append(_comparison("growth exponent vs 3/2", GROWTH_EXPONENT_AFFINE, report.fitted_exponent, ""))
        comparisons.append(_comparison("linear control exponent", 1.0, control.fitted_exponent, ""))
    if profile_metrics is not None:
        comparisons.append(_comparison("central intensity deficit", DEFICIT_QUOTED, profile_metrics.central_deficit, ""))
        comparisons.append(
            _comparison(
                "integrated deficit",
                INTEGRATED_DEFICIT_QUOTED,
                modulation.reported,
                "",
                f"modulation gain {modulation.gain:g}: {modulation.gain_provenance}",
            )
        )
        comparisons.append(
            _comparison("waist for quoted 1e-9 deficit", None, waist_needed, "m", "waist is not stated in the source")
        )

    intermediates = {
        "q_gamma_ev2": q.q_gamma,
        "q_a_ev2": q.q_a,
        "q_m_ev2": q.q_m,
        "phi_rad": solution.phi,
        "beta": beta,
        "theta_plus_rad": angles.theta_plus,
        "theta_minus_rad": angles.theta_minus,
        "delta_theta_rad": angles.delta_theta,
        "f_G": angles.f_G,
        "index_gradient_plus_per_m": profiles["plus"].b,
        "index_gradient_minus_per_m": profiles["minus"].b,
        "exit_y_plus_m": exit_y["plus"],
        "exit_y_minus_m": exit_y["minus"],
    }
    if scenario.cavity is not None:
        intermediates["theta_mode_rad"] = scenario.cavity.theta_mode
        intermediates["passes"] = scenario.cavity.passes
    manifest = {
        "scenario": scenario.name,
        "config_hash": config_hash(scenario.raw),
        "versions": {
            "package": src.__version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
        },
        "intermediates": intermediates,
        "reference_comparisons": comparisons,
        "files": sorted([p.name for p in bundle.files.values()] + ["manifest.json"]),
    }
    bundle.files["manifest"] = write_json(manifest, out / "manifest.json")
    bundle.manifest = manifest

    bundle.summary = {
        "delta_theta_rad": angles.delta_theta,
        "f_G": angles.f_G,
        "phi_rad": solution.phi,
    }
    if report is not None:
        bundle.summary.update(
            {
                "std_y_m": report.std_y,
                "weighted_separation_m": report.weighted_separation,
                "fitted_exponent": report.fitted_exponent,
            }
        )
    if profile_metrics is not None:
        bundle.summary.update(
            {
                "central_deficit": profile_metrics.central_deficit,
                "reported_deficit": modulation.reported,
            }
        )
    return bundle
