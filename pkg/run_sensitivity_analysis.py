#!/usr/bin/env python3
"""
Run sensitivity analysis over the axion-photon coupling and the cavity
pass count, using the same scenario loading and physics as run.py.

Sweep grids come from the `sensitivity` section of config/params.yaml.
Outputs go to outputs/sensitivity/.
"""

import argparse
import sys
from pathlib import Path

import pandas as pd

# Add project root for imports
sys.path.insert(0, str(Path(__file__).resolve().parent))

from src.errors import ConfigIOError, PhysicsDomainError, ScenarioValidationError
from src.scenario import load_config, load_params, load_preset, scenario_from_dict
from src.sensitivity import (
    format_coupling_table,
    format_passes_table,
    run_coupling_sweep,
    run_passes_sweep,
)
from src.utils import outputs_path, write_csv, write_json


def run_sensitivity(raw: dict, sweep: dict, passes: int | None = None) -> dict:
    """
    Run both sweeps for one scenario.

    Returns dict: scenario, coupling_sensitivity, passes_sensitivity.
    """
    scenario = scenario_from_dict(raw, passes=passes)
    results = {
        "scenario": scenario.name,
        "coupling_sensitivity": run_coupling_sweep(
            scenario, couplings=sweep.get("couplings_gev_inv"), passes=passes
        ),
        "passes_sensitivity": [],
    }
    if scenario.cavity is not None:
        results["passes_sensitivity"] = run_passes_sweep(scenario, sweep.get("pass_counts"))
    return results


def format_sensitivity_summary(results: dict) -> str:
    """Generate text summary of sensitivity results."""
    lines = ["=" * 80]
    lines.append(f"SENSITIVITY ANALYSIS: {results['scenario']}")
    lines.append("=" * 80)
    lines.append("")
    lines.append("COUPLING SENSITIVITY:")
    lines.append(format_coupling_table(results["coupling_sensitivity"]).to_string(index=False))
    lines.append("")
    if results["passes_sensitivity"]:
        lines.append("PASS COUNT SENSITIVITY:")
        lines.append(format_passes_table(results["passes_sensitivity"]).to_string(index=False))
        lines.append("")
    failed = [r for r in results["coupling_sensitivity"] if not r["feasible"]]
    for r in failed:
        lines.append(f"WARNING: g_a = {r['g_a_gev_inv']:.1e} GeV^-1: {r['error']}")
    return "\n".join(lines)


def save_results(results: dict, output_dir: Path) -> None:
    """Save sweep tables (CSV), raw results (JSON) and the text summary."""
    output_dir.mkdir(parents=True, exist_ok=True)
    path = write_csv(pd.DataFrame(results["coupling_sensitivity"]), output_dir / "coupling_sweep.csv")
    print(f"Saved coupling sensitivity to {path}")
    if results["passes_sensitivity"]:
        path = write_csv(pd.DataFrame(results["passes_sensitivity"]), output_dir / "passes_sweep.csv")
        print(f"Saved pass-count sensitivity to {path}")
    path = write_json(results, output_dir / "sensitivity_results.json")
    print(f"Saved raw results to {path}")
    summary_path = output_dir / "sensitivity_summary.txt"
    summary_path.write_text(format_sensitivity_summary(results) + "\n", encoding="utf-8")
    print(f"Saved summary to {summary_path}")


def main() -> int:
    parser = argparse.ArgumentParser(
        description="Coupling and pass-count sensitivity for a cavity scenario"
    )
    parser.add_argument("--config", type=str, default=None, help="Scenario JSON (default: preset from params.yaml)")
    parser.add_argument("--params", type=str, default=None, help="Runtime params YAML (default: config/params.yaml)")
    parser.add_argument("--passes", type=int, default=None, help="Override cavity.passes for the coupling sweep")
    parser.add_argument("--out-dir", type=str, default=None, help="Output directory (default: outputs/sensitivity)")
    args = parser.parse_args()

    try:
        params = load_params(args.params)
        sweep = params.get("sensitivity", {})
        raw = load_config(args.config) if args.config else load_preset(sweep.get("preset", "lab_cavity"))

        print("=" * 60)
        print("Sensitivity analysis")
        print(f"  Couplings: {sweep.get('couplings_gev_inv')}")
        print(f"  Pass counts: {sweep.get('pass_counts')}")
        print("=" * 60)

        results = run_sensitivity(raw, sweep, passes=args.passes)
    except ScenarioValidationError as exc:
        print(f"Validation: FAIL\n  - " + "\n  - ".join(exc.findings), file=sys.stderr)
        return 1
    except PhysicsDomainError as exc:
        print(f"Physics domain error: {exc}", file=sys.stderr)
        return 2
    except ConfigIOError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3

    print(format_sensitivity_summary(results))
    directory = params.get("outputs", {}).get("directory", "outputs")
    out_dir = Path(args.out_dir) if args.out_dir else outputs_path("sensitivity", directory=directory)
    save_results(results, out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
