"""Command-line interface.

Subcommands: solve (one scene, dumps fields + summary), sweep (observables
CSV over the configured cross product), serf (transverse response scan or
detuning optimization), estimate (closed-form scalings as JSON), and
dump-constants (effective coefficient table).
"""

import argparse
import dataclasses
import json
import math
import sys

from .config import RunConfig, load_config
from .estimates import (absorption_length, depolarization_length, gamma_wall,
                        ratio_estimate)
from .grid import WallMode
from .harness import GHZ, build_medium, run_serf, run_solve, run_sweep
from .media import lineshape


def _parse_grid(text):
    try:
        nz, nr = text.lower().split("x")
        return int(nz), int(nr)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected NZxNR (e.g. 101x51), got {text!r}") from exc


def _add_common(sub):
    sub.add_argument("--config", help="TOML run configuration file")
    sub.add_argument("--out", help="output directory (default from config)")
    sub.add_argument("--grid", type=_parse_grid, metavar="NZxNR",
                     help="override grid size, e.g. 101x51")
    sub.add_argument("--walls",
                     choices=["depolarizing", "nondepolarizing", "both"],
                     help="override wall modes")


def _add_scene_overrides(sub):
    sub.add_argument("--delta-ghz", type=float, help="pump detuning in GHz")
    sub.add_argument("--power-mw", type=float, help="beam power in mW")
    sub.add_argument("--pressure-torr", type=float, help="N2 fill pressure")
    sub.add_argument("--beam-radius-mm", type=float, help="illuminated radius")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pumpcell",
        description="Steady-state optical pumping in small cylindrical cells")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one scene, dump fields")
    _add_common(p_solve)
    _add_scene_overrides(p_solve)
    p_solve.add_argument("--serf", action="store_true",
                         help="also solve the transverse response")
    p_solve.add_argument("--no-fields", action="store_true",
                         help="skip the field CSV dumps")

    p_sweep = sub.add_parser("sweep", help="solve the configured cross product")
    _add_common(p_sweep)
    p_sweep.add_argument("--workers", type=int, default=1,
                         help="parallel worker processes")
    p_sweep.add_argument("--serf", action="store_true",
                         help="add the transverse response column")

    p_serf = sub.add_parser("serf", help="transverse response run")
    _add_common(p_serf)
    p_serf.add_argument("--workers", type=int, default=1)

    p_est = sub.add_parser("estimate", help="closed-form scalings as JSON")
    _add_common(p_est)
    _add_scene_overrides(p_est)

    p_dump = sub.add_parser("dump-constants",
                            help="print the effective constants table")
    p_dump.add_argument("--config", help="TOML run configuration file")
    return parser


def _load(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    updates = {}
    if getattr(args, "grid", None):
        updates["nz"], updates["nr"] = args.grid
    walls = getattr(args, "walls", None)
    if walls == "both":
        updates["wall_modes"] = (WallMode.DEPOLARIZING,
                                 WallMode.NONDEPOLARIZING)
    elif walls:
        updates["wall_modes"] = (WallMode(walls),)
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
    return cfg


def _out_dir(args, cfg):
    return args.out if args.out else cfg.output_dir


def _cmd_solve(args):
    cfg = _load(args)
    sol, _ = run_solve(cfg, _out_dir(args, cfg), delta_ghz=args.delta_ghz,
                       power_mw=args.power_mw,
                       pressure_torr=args.pressure_torr,
                       r_l_mm=args.beam_radius_mm, with_serf=args.serf,
                       dump_fields=not args.no_fields)
    if not sol.converged:
        print(f"solve failed: {sol.message}", file=sys.stderr)
        return 2
    print(f"converged in {sol.iterations} outer iterations "
          f"(residual {sol.residual:.3e})", file=sys.stderr)
    return 0


def _cmd_sweep(args):
    cfg = _load(args)
    path, n_failed = run_sweep(cfg, _out_dir(args, cfg), workers=args.workers,
                               with_serf=args.serf)
    print(f"wrote {path}", file=sys.stderr)
    if n_failed:
        print(f"{n_failed} scenes failed (see status column)", file=sys.stderr)
        return 3
    return 0


def _cmd_serf(args):
    cfg = _load(args)
    path, n_failed = run_serf(cfg, _out_dir(args, cfg), workers=args.workers)
    print(f"wrote {path}", file=sys.stderr)
    if n_failed:
        print(f"{n_failed} cells failed (see status column)", file=sys.stderr)
        return 3
    return 0


def _cmd_estimate(args):
    cfg = _load(args)
    delta_ghz = cfg.detunings_ghz[0] if args.delta_ghz is None else args.delta_ghz
    power = cfg.powers_mw[0] if args.power_mw is None else args.power_mw
    pressure = (cfg.pressures_torr[0] if args.pressure_torr is None
                else args.pressure_torr)
    r_l = (cfg.beam_radii_mm[0] if args.beam_radius_mm is None
           else args.beam_radius_mm)
    med = build_medium(cfg, pressure)
    delta = delta_ghz * GHZ
    i0 = power / (math.pi * r_l ** 2)
    rop0 = med.g_p * lineshape(delta, med) * i0
    lam_d = depolarization_length(med.d_mm2_s, med.gamma_rel_s, rop0)
    lam_l = absorption_length(delta, med)
    ratio = ratio_estimate(lam_d, lam_l, cfg.length_mm, cfg.radius_mm)
    out = {
        "conditions": {"delta_ghz": delta_ghz, "power_mw": power,
                       "pressure_torr": pressure, "r_l_mm": r_l,
                       "temperature_c": cfg.temperature_c},
        "medium": {"d_mm2_s": med.d_mm2_s, "gamma_rel_s": med.gamma_rel_s,
                   "gamma_l_ghz": med.gamma_l_rad_s / GHZ,
                   "n_a_mm3": med.n_a_mm3},
        "rop0_s": rop0,
        "lambda_d_mm": lam_d,
        "lambda_l_mm": lam_l,
        "ratio_estimate": None if not ratio.valid else ratio.value,
        "ratio_valid": ratio.valid,
        "gamma_wall_s": gamma_wall(med.d_mm2_s, cfg.length_mm, cfg.radius_mm),
    }
    json.dump(out, sys.stdout, indent=2)
    print()
    return 0


def _cmd_dump_constants(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    for key, value in cfg.constants.as_dict().items():
        print(f"{key} = {value!r}")
    print(f"# sha256 {cfg.constants.table_hash()}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {"solve": _cmd_solve, "sweep": _cmd_sweep, "serf": _cmd_serf,
                "estimate": _cmd_estimate, "dump-constants": _cmd_dump_constants}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
