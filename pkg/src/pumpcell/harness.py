"""Run orchestration: builds scene matrices from a RunConfig, executes them
serially or across worker processes, and writes deterministic CSV/JSON
outputs (floats at 9 significant digits, fixed lexicographic row order,
constants hash embedded in every file).
"""

import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, kernels
from .estimates import absorption_length, depolarization_length, ratio_estimate, serf_bound
from .grid import CellGeometry, Grid, WallMode, field_to_csv
from .media import lineshape, medium_from_conditions
from .observables import compute_observables
from .serf import (OptimalDetuning, SerfSettings, average_transverse,
                   default_detuning_grid, optimize_detuning, solve_transverse)
from .solver import Scene, solve_steady

GHZ = 2.0 * math.pi * 1e9  # rad/s per GHz

SWEEP_COLUMNS = ("delta_ghz", "power_mw", "pressure_torr", "r_l_mm",
                 "wall_mode", "transmission", "p_ave", "eta_loss",
                 "balance_residual", "p_x_ave", "lambda_d_mm", "lambda_l_mm",
                 "ratio_estimate", "status")
OPTIMAL_COLUMNS = ("power_mw", "pressure_torr", "r_l_mm", "wall_mode",
                   "delta_opt_ghz", "px_ave_opt", "p_ave_at_opt",
                   "serf_bound", "n_detunings", "at_edge", "failures",
                   "status")


def build_medium(cfg, pressure_torr):
    return medium_from_conditions(cfg.temperature_k, pressure_torr,
                                  cfg.constants)


def build_scene(cfg, delta_ghz, power_mw, pressure_torr, r_l_mm, wall_mode):
    geometry = CellGeometry(length_mm=cfg.length_mm, radius_mm=cfg.radius_mm,
                            beam_radius_mm=r_l_mm)
    grid = Grid.from_geometry(geometry, cfg.nz, cfg.nr)
    medium = build_medium(cfg, pressure_torr)
    return Scene(geometry=geometry, medium=medium,
                 detuning_rad_s=delta_ghz * GHZ, power_mw=power_mw,
                 wall_mode=WallMode(wall_mode), grid=grid)


def scene_rows(cfg):
    """Lexicographic cross product of the sweep axes."""
    return list(itertools.product(cfg.detunings_ghz, cfg.powers_mw,
                                  cfg.pressures_torr, cfg.beam_radii_mm,
                                  cfg.wall_modes))


def _estimate_columns(scene):
    med = scene.medium
    rop0 = med.g_p * lineshape(scene.detuning_rad_s, med) * scene.incident_intensity
    lam_d = depolarization_length(med.d_mm2_s, med.gamma_rel_s, rop0)
    lam_l = absorption_length(scene.detuning_rad_s, med)
    ratio = ratio_estimate(lam_d, lam_l, scene.geometry.length_mm,
                           scene.geometry.radius_mm)
    return lam_d, lam_l, ratio.value


def _sweep_worker(payload):
    cfg, row, with_serf = payload
    delta_ghz, power, pressure, r_l, mode = row
    out = {"delta_ghz": delta_ghz, "power_mw": power,
           "pressure_torr": pressure, "r_l_mm": r_l,
           "wall_mode": WallMode(mode).value,
           "transmission": math.nan, "p_ave": math.nan,
           "eta_loss": math.nan, "balance_residual": math.nan,
           "p_x_ave": None, "lambda_d_mm": math.nan,
           "lambda_l_mm": math.nan, "ratio_estimate": math.nan,
           "status": "ok"}
    try:
        scene = build_scene(cfg, delta_ghz, power, pressure, r_l, mode)
        out["lambda_d_mm"], out["lambda_l_mm"], out["ratio_estimate"] = \
            _estimate_columns(scene)
        sol = solve_steady(scene, cfg.solver)
        if not sol.converged:
            out["status"] = f"failed: {sol.message}"
            return out
        px_ave = None
        if with_serf:
            p_x = solve_transverse(sol, scene, SerfSettings(cfg.serf_b_tesla),
                                   cfg.solver)
            px_ave = average_transverse(p_x, scene.grid)
        obs = compute_observables(sol, scene, px_ave)
        out.update(transmission=obs.transmission, p_ave=obs.p_ave,
                   eta_loss=obs.eta_loss, balance_residual=obs.balance_residual,
                   p_x_ave=obs.p_x_ave)
    except Exception as exc:  # recorded, never dropped
        out["status"] = f"failed: {exc}"
    return out


def _serf_grid(cfg, medium):
    if cfg.serf_detunings_ghz is not None:
        return np.asarray(cfg.serf_detunings_ghz, dtype=float) * GHZ
    return default_detuning_grid(medium)


def _optimal_worker(payload):
    cfg, row = payload
    power, pressure, r_l, mode = row
    out = {"power_mw": power, "pressure_torr": pressure, "r_l_mm": r_l,
           "wall_mode": WallMode(mode).value, "delta_opt_ghz": math.nan,
           "px_ave_opt": math.nan, "p_ave_at_opt": math.nan,
           "serf_bound": math.nan, "n_detunings": 0, "at_edge": 0,
           "failures": 0, "status": "ok"}
    try:
        base = build_scene(cfg, 0.0, power, pressure, r_l, mode)
        deltas = _serf_grid(cfg, base.medium)
        settings = SerfSettings(cfg.serf_b_tesla)
        best = optimize_detuning(base, deltas, settings, cfg.solver)
        med = base.medium
        rop0 = med.g_p * lineshape(deltas, med) * base.incident_intensity
        lam_d = np.sqrt(5.0 * med.d_mm2_s / (med.gamma_rel_s + rop0))
        ratios = np.array([ratio_estimate(ld, absorption_length(dd, med),
                                          cfg.length_mm, cfg.radius_mm).value
                           for ld, dd in zip(lam_d, deltas)])
        bound = serf_bound(ratios, rop0, med.gamma_rel_s,
                           med.gamma_e_rad_s_t * cfg.serf_b_tesla)
        out.update(delta_opt_ghz=best.delta_rad_s / GHZ,
                   px_ave_opt=best.px_ave,
                   p_ave_at_opt=best.p_ave_curve[best.index],
                   serf_bound=bound, n_detunings=len(deltas),
                   at_edge=int(best.at_edge), failures=best.failures)
    except Exception as exc:
        out["status"] = f"failed: {exc}"
    return out


def _format_value(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.9g}"


def write_csv(path, columns, rows, constants_hash):
    with open(path, "w", newline="") as fh:
        fh.write(f"# constants_sha256={constants_hash}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(row[c]) for c in columns) + "\n")


def write_metadata(path, cfg, extra=None):
    meta = {
        "pumpcell_version": __version__,
        "kernel_backend": kernels.BACKEND,
        "constants_sha256": cfg.constants.table_hash(),
        "constants": cfg.constants.as_dict(),
        "config": cfg.echo(),
    }
    if extra:
        meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _execute(worker, payloads, workers):
    n = len(payloads)
    step = max(1, n // 20)
    results = []
    if workers <= 1:
        for k, payload in enumerate(payloads, 1):
            results.append(worker(payload))
            if k % step == 0 or k == n:
                print(f"  {k}/{n} scenes done", file=sys.stderr)
        return results
    # children inherit the parent's kernel backend choice
    os.environ["PUMPCELL_BACKEND"] = kernels.BACKEND
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for k, result in enumerate(pool.map(worker, payloads, chunksize=1), 1):
            results.append(result)
            if k % step == 0 or k == n:
                print(f"  {k}/{n} scenes done", file=sys.stderr)
    return results


def run_sweep(cfg, out_dir, workers=1, with_serf=False, filename="sweep.csv"):
    """Solve the full scene matrix and write one observables row per scene."""
    os.makedirs(out_dir, exist_ok=True)
    rows = scene_rows(cfg)
    print(f"sweep: {len(rows)} scenes "
          f"({len(cfg.detunings_ghz)} detunings x {len(cfg.powers_mw)} powers "
          f"x {len(cfg.pressures_torr)} pressures x {len(cfg.beam_radii_mm)} "
          f"radii x {len(cfg.wall_modes)} wall modes)", file=sys.stderr)
    payloads = [(cfg, row, with_serf) for row in rows]
    results = _execute(_sweep_worker, payloads, workers)
    csv_path = os.path.join(out_dir, filename)
    write_csv(csv_path, SWEEP_COLUMNS, results, cfg.constants.table_hash())
    write_metadata(csv_path.replace(".csv", ".meta.json"), cfg,
                   {"n_scenes": len(rows), "workers": workers,
                    "with_serf": with_serf})
    n_failed = sum(1 for r in results if r["status"] != "ok")
    return csv_path, n_failed


def run_serf(cfg, out_dir, workers=1):
    """Transverse-response run: per-detuning scan, or detuning optimization
    per (power, pressure, radius, wall mode) cell when serf.optimize is set."""
    if not cfg.serf_optimize:
        return run_sweep(cfg, out_dir, workers, with_serf=True,
                         filename="serf.csv")
    os.makedirs(out_dir, exist_ok=True)
    rows = list(itertools.product(cfg.powers_mw, cfg.pressures_torr,
                                  cfg.beam_radii_mm, cfg.wall_modes))
    print(f"serf optimize: {len(rows)} cells", file=sys.stderr)
    payloads = [(cfg, row) for row in rows]
    results = _execute(_optimal_worker, payloads, workers)
    csv_path = os.path.join(out_dir, "serf_optimal.csv")
    write_csv(csv_path, OPTIMAL_COLUMNS, results, cfg.constants.table_hash())
    write_metadata(csv_path.replace(".csv", ".meta.json"), cfg,
                   {"n_cells": len(rows), "workers": workers})
    n_failed = sum(1 for r in results if r["status"] != "ok")
    return csv_path, n_failed


def run_solve(cfg, out_dir, delta_ghz=None, power_mw=None, pressure_torr=None,
              r_l_mm=None, wall_mode=None, with_serf=False, dump_fields=True):
    """Solve a single scene (defaults: first entry of each sweep axis),
    write the polarization and intensity fields plus a JSON summary."""
    os.makedirs(out_dir, exist_ok=True)
    delta_ghz = cfg.detunings_ghz[0] if delta_ghz is None else delta_ghz
    power_mw = cfg.powers_mw[0] if power_mw is None else power_mw
    pressure_torr = (cfg.pressures_torr[0] if pressure_torr is None
                     else pressure_torr)
    r_l_mm = cfg.beam_radii_mm[0] if r_l_mm is None else r_l_mm
    wall_mode = cfg.wall_modes[0] if wall_mode is None else WallMode(wall_mode)

    scene = build_scene(cfg, delta_ghz, power_mw, pressure_torr, r_l_mm,
                        wall_mode)
    sol = solve_steady(scene, cfg.solver)
    px_ave = None
    if with_serf and sol.converged:
        p_x = solve_transverse(sol, scene, SerfSettings(cfg.serf_b_tesla),
                               cfg.solver)
        px_ave = average_transverse(p_x, scene.grid)
        if dump_fields:
            field_to_csv(p_x, scene.grid, os.path.join(out_dir, "p_x.csv"))
    if dump_fields:
        field_to_csv(sol.p_e, scene.grid, os.path.join(out_dir, "p_e.csv"))
        field_to_csv(sol.intensity, scene.grid,
                     os.path.join(out_dir, "intensity.csv"))
    obs = (compute_observables(sol, scene, px_ave) if sol.converged else None)
    summary = {
        "scene": {"delta_ghz": delta_ghz, "power_mw": power_mw,
                  "pressure_torr": pressure_torr, "r_l_mm": r_l_mm,
                  "wall_mode": WallMode(wall_mode).value,
                  "temperature_c": cfg.temperature_c,
                  "nz": cfg.nz, "nr": cfg.nr},
        "converged": sol.converged,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "inner_sweeps": sol.inner_sweeps,
        "message": sol.message,
        "observables": None if obs is None else {
            "transmission": obs.transmission, "p_ave": obs.p_ave,
            "eta_loss": obs.eta_loss,
            "balance_residual": obs.balance_residual,
            "p_x_ave": obs.p_x_ave},
        "constants_sha256": cfg.constants.table_hash(),
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_metadata(os.path.join(out_dir, "solve.meta.json"), cfg)
    return sol, scene
