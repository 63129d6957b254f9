"""Command-line interface.

Verbs:
    run <config> [--out DIR] [--format csv|json|both] [--jobs N]
    validate <config>
    list-evaluators
    constants [--units si|natural]
"""

import argparse
import sys

from .constants import (
    ARGON_MASS_SI,
    O2_MASS_SI,
    WATER_NUMBER_DENSITY_SI,
    registry,
)
from .runner import EVALUATORS, ConfigError, emit, exit_status, load_config, run


def _cmd_run(args):
    scenarios, cfg_hash = load_config(args.config)
    manifest = run(scenarios, config_hash=cfg_hash, parallelism=args.jobs)
    formats = ("csv", "json") if args.format == "both" else (args.format,)
    written = emit(manifest, args.out, formats=formats)
    for name, beta, rep in manifest.all_reports():
        print(f"[{name} beta={beta:g}] {rep.oneline()}")
    for path in written:
        print(f"wrote {path}")
    return exit_status(manifest)


def _cmd_validate(args):
    try:
        scenarios, cfg_hash = load_config(args.config)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    print(f"config OK: {len(scenarios)} scenario(s), hash {cfg_hash[:16]}")
    for s in scenarios:
        evs = ", ".join(ev["name"] for ev in s.cfg["evaluators"])
        print(f"  {s.name}: beta grid {s.cfg['grids']['beta']}, evaluators [{evs}]")
    return 0


def _cmd_list_evaluators(args):
    for name in sorted(EVALUATORS):
        print(name)
    return 0


def _cmd_constants(args):
    reg = registry(args.units)
    print(f"units: {args.units}")
    print(f"hbar = {reg.hbar!r}")
    print(f"k_B  = {reg.k_B!r}")
    if args.units == "si":
        print(f"planckian_time(300 K)        = {reg.planckian_time(300.0)!r} s")
        print(f"thermal_wavelength(O2, 300K) = "
              f"{reg.thermal_wavelength(O2_MASS_SI, 300.0)!r} m")
        print(f"n_hbar(water)                = "
              f"{reg.min_viscosity_scale(WATER_NUMBER_DENSITY_SI)!r} Pa s")
        print(f"argon mass                   = {ARGON_MASS_SI!r} kg")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="thermobound",
        description="Verify thermal uncertainty bounds on small quantum models "
                    "and classical MD, reporting lhs/rhs/margin per inequality.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--format", choices=("csv", "json", "both"), default="both")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.set_defaults(fn=_cmd_run)

    p_val = sub.add_parser("validate", help="validate a config without running")
    p_val.add_argument("config")
    p_val.set_defaults(fn=_cmd_validate)

    p_list = sub.add_parser("list-evaluators", help="list registered evaluator names")
    p_list.set_defaults(fn=_cmd_list_evaluators)

    p_const = sub.add_parser("constants", help="show the constants registry")
    p_const.add_argument("--units", choices=("si", "natural"), default="si")
    p_const.set_defaults(fn=_cmd_constants)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
