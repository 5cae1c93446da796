#!/usr/bin/env python3
"""
Run a photon-axion cavity scenario: load config, compute indices, rays,
bifurcation statistics and intensity deficit, write result files.

Subcommands:
  run <config>            execute a scenario (path or preset name)
  validate <config>       report every invariant violation
  preset <name> --emit    print a shipped preset

Exit codes: 0 success, 1 validation failure, 2 physics-domain error,
3 I/O or parse error.
"""

import argparse
import sys
from pathlib import Path

# Add project root for imports
sys.path.insert(0, str(Path(__file__).resolve().parent))

from src.errors import ConfigIOError, PhysicsDomainError, ScenarioValidationError
from src.pipeline import run_scenario
from src.scenario import (
    list_presets,
    load_config,
    load_params,
    load_preset,
    preset_path,
    scenario_from_dict,
    validate_scenario,
)
from src.utils import canonical_json

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PHYSICS = 2
EXIT_IO = 3


def load_scenario_source(source: str) -> dict:
    """Config from a file path, or from a preset when the path does not exist."""
    path = Path(source)
    if path.exists():
        return load_config(path)
    if source in list_presets():
        return load_preset(source)
    raise ConfigIOError(f"No config file {source} and no preset named {source!r}")


def _printer(quiet: bool):
    if quiet:
        return lambda *args, **kwargs: None
    return print


def cmd_run(args: argparse.Namespace) -> int:
    say = _printer(args.quiet)
    raw = load_scenario_source(args.config)
    params = load_params(args.params) if args.params else load_params()
    scenario = scenario_from_dict(raw, passes=args.passes)

    say("=" * 60)
    say(f"Photon-axion cavity scenario: {scenario.name}")
    say("=" * 60)
    say(f"  omega = {scenario.medium.omega:.6g} eV")
    say(f"  B0 = {scenario.medium.b_field:.6g} eV^2, B1 = {scenario.field.b1:.6g} eV^2/m")
    say(f"  g_a = {scenario.medium.g_a:.3g} eV^-1, m_a = {scenario.medium.m_a:.3g} eV")
    say(f"  Mixing model: {scenario.mixing_model}")
    if scenario.cavity is not None:
        say(f"  Passes: {scenario.cavity.passes:,}, theta_mode = {scenario.cavity.theta_mode:.6e} rad")

    bundle = run_scenario(scenario, out_dir=args.out, params=params)

    say(f"\n{'=' * 60}")
    say("Results")
    say(f"{'=' * 60}")
    for key, value in bundle.summary.items():
        if isinstance(value, float):
            say(f"  {key}: {value:.6e}")
        else:
            say(f"  {key}: {value}")

    say("\nComparison with quoted values:")
    for row in bundle.manifest["reference_comparisons"]:
        computed = row["computed"]
        quoted = row["quoted"]
        computed_s = "-" if computed is None else f"{computed:.4e}"
        quoted_s = "-" if quoted is None else f"{quoted:.4e}"
        say(f"  {row['label']}: computed {computed_s} vs quoted {quoted_s} {row['unit']}".rstrip())
        if row["note"]:
            say(f"      ({row['note']})")

    exponent = bundle.summary.get("fitted_exponent")
    if exponent is not None and not 1.35 <= exponent <= 1.65:
        say(f"WARNING: fitted growth exponent {exponent:.4f} outside [1.35, 1.65]")

    say("")
    for name, path in sorted(bundle.files.items()):
        say(f"Saved {name} to {path}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    say = _printer(args.quiet)
    raw = load_scenario_source(args.config)
    ok, findings = validate_scenario(raw)
    say(f"Validation: {'PASS' if ok else 'FAIL'} ({len(findings)} finding(s))")
    for finding in findings:
        if args.quiet:
            print(f"  - {finding}", file=sys.stderr)
        else:
            say(f"  - {finding}")
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_preset(args: argparse.Namespace) -> int:
    raw = load_preset(args.name)
    if args.emit:
        sys.stdout.write(canonical_json(raw))
    else:
        print(f"Preset {args.name}: {preset_path(args.name)}")
        print(f"Available presets: {', '.join(list_presets())}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Photon-axion mixing in an inhomogeneous field - cavity simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="Run a scenario and write result files")
    p_run.add_argument("config", help="Scenario JSON path or preset name")
    p_run.add_argument("--out", type=str, default=None, help="Output directory (default: scenario 'outputs')")
    p_run.add_argument("--passes", type=int, default=None, help="Override cavity.passes")
    p_run.add_argument("--params", type=str, default=None, help="Runtime params YAML (default: config/params.yaml)")
    p_run.add_argument("--quiet", action="store_true", help="Only print errors")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="Validate a scenario config")
    p_val.add_argument("config", help="Scenario JSON path or preset name")
    p_val.add_argument("--quiet", action="store_true", help="Only print findings")
    p_val.set_defaults(func=cmd_validate)

    p_pre = sub.add_parser("preset", help="Show or emit a shipped preset")
    p_pre.add_argument("name", choices=list_presets())
    p_pre.add_argument("--emit", action="store_true", help="Print the preset JSON to stdout")
    p_pre.set_defaults(func=cmd_preset)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioValidationError as exc:
        print("Validation: FAIL", file=sys.stderr)
        for finding in exc.findings:
            print(f"  - {finding}", file=sys.stderr)
        return EXIT_VALIDATION
    except PhysicsDomainError as exc:
        print(f"Physics domain error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (ConfigIOError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
