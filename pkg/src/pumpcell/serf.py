"""Linear transverse spin response to a weak magnetic field (SERF regime).

Given a converged longitudinal steady state, the transverse polarization
P_x obeys the linearized equation

    D Lap[v] - (R_op + Gamma_rel) v / q(P_e) + gamma_e B P_e = 0,

with v = q(P_e) P_x and the slow-down factor frozen at the longitudinal
solution.  The response is exactly linear in B in this model.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .grid import WallMode, volume_average
from .media import lineshape, slow_down
from .solver import (SolverParams, Solution, _auto_omega, _deflate_constant,
                     _interior_residual, solve_steady)


@dataclass(frozen=True)
class SerfSettings:
    """Transverse drive settings; b_tesla is the static field along y."""

    b_tesla: float = 1.0e-9


def solve_transverse(solution, scene, serf=None, params=None):
    """Transverse polarization field P_x for a solved scene.

    One linear Helmholtz relaxation with the slow-down factor frozen at
    q(P_e); the residual is normalized by gamma_e B max(P_e).  Warns when
    gamma_e B exceeds 10% of Gamma_rel (the linearization is then a
    formal extrapolation; the result still scales exactly linearly in B).
    """
    if serf is None:
        serf = SerfSettings()
    if params is None:
        params = SolverParams()
    med = scene.medium
    g = scene.grid
    gamma_b = med.gamma_e_rad_s_t * serf.b_tesla
    if gamma_b > 0.1 * med.gamma_rel_s:
        warnings.warn("gamma_e*B exceeds 0.1*Gamma_rel; linear response is "
                      "outside its validity window", stacklevel=2)
    p_e = np.asarray(solution.p_e, dtype=float)
    if serf.b_tesla == 0.0 or not np.any(p_e > 0.0):
        return np.zeros(g.shape)

    rop = med.g_p * lineshape(scene.detuning_rad_s, med) * np.asarray(
        solution.intensity, dtype=float)
    gam = med.gamma_rel_s
    qv = slow_down(p_e)
    coeff = (rop + gam) / qv
    source = gamma_b * p_e
    if med.d_mm2_s == 0.0:
        return source / (rop + gam)

    scale = gamma_b * float(p_e.max())
    dir_d = scene.wall_mode is WallMode.DEPOLARIZING
    omega = params.sor_omega if params.sor_omega is not None else _auto_omega(
        med.d_mm2_s, float(coeff.min()), g, dir_d, dir_d)
    v = source / coeff
    # same roundoff floor as the longitudinal relaxation: the residual is a
    # cancellation of stencil terms ~ diag * v, so tolerances below that
    # level are unreachable noise
    diag0 = med.d_mm2_s * (2.0 / g.dz ** 2 + 2.0 / g.dr ** 2) + float(coeff.max())
    tol_abs = max(params.inner_tol * scale,
                  256.0 * np.finfo(float).eps * diag0 * float(v.max()))
    # short sweep batches with the constant-mode deflation in between (see
    # the longitudinal solver): the all-Neumann near-null mode would
    # otherwise dominate the budget whenever pumping is weak
    res = math.inf
    budget = params.max_inner
    sweeps = 0
    while budget > 0 and res > tol_abs:
        if not dir_d:
            _deflate_constant(v, coeff, source, med.d_mm2_s, g)
        res, sw = kernels.helmholtz_sor_solve(
            v, coeff, source, med.d_mm2_s, g.dz, g.dr, dir_d, dir_d, omega,
            tol_abs, min(budget, 512), -1.0, params.check_every)
        sweeps += sw
        budget -= sw
    if res > tol_abs:
        raise RuntimeError(f"transverse relaxation stalled at residual "
                           f"{res / scale:.3e} after {sweeps} sweeps")
    return v / qv


def average_transverse(p_x, grid):
    """Volume-averaged transverse polarization (the magnetometer signal)."""
    return volume_average(p_x, grid)


@dataclass(frozen=True)
class OptimalDetuning:
    """Result of a detuning scan for the transverse response."""

    delta_rad_s: float
    px_ave: float
    index: int
    deltas: np.ndarray
    px_curve: np.ndarray
    p_ave_curve: np.ndarray
    at_edge: bool
    failures: int


def default_detuning_grid(medium, lo_rad_s=None, hi_rad_s=None,
                          tail_rad_s=2.0 * math.pi * 500e9, tail_points=14):
    """Detuning grid for optimization scans.

    Covers at least [-3 Delta_S, +4 Delta_S]: fine spacing 0.1 Gamma_L
    within 0.75 Gamma_L of each hyperfine component, coarse 0.5 Gamma_L
    elsewhere, plus a blue-side geometric tail out to tail_rad_s so that
    far-detuned optima at high pressure or power stay interior to the grid.
    """
    ds, dp = medium.delta_s_rad_s, medium.delta_p_rad_s
    gl = medium.gamma_l_rad_s
    lo = -3.0 * ds if lo_rad_s is None else lo_rad_s
    hi = 4.0 * ds if hi_rad_s is None else hi_rad_s
    pts = [np.arange(lo, hi + 0.25 * gl, 0.5 * gl)]
    for center in (0.0, dp, ds, ds + dp):
        pts.append(np.arange(center - 0.75 * gl, center + 0.75 * gl + 0.05 * gl,
                             0.1 * gl))
    fine_hi = max(p.max() for p in pts)
    if tail_rad_s > fine_hi:
        pts.append(np.geomspace(fine_hi, tail_rad_s, tail_points + 1)[1:])
    grid = np.unique(np.concatenate(pts))
    # collapse near-duplicates from overlapping windows
    keep = np.ones(grid.size, dtype=bool)
    keep[1:] = np.diff(grid) > 0.02 * gl
    return grid[keep]


def optimize_detuning(base_scene, deltas, serf=None, params=None):
    """Scan detunings, solve each scene, and return the transverse optimum.

    Failed solves are skipped (counted in failures); warns when the optimum
    sits on the edge of the grid.
    """
    if serf is None:
        serf = SerfSettings()
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size < 3:
        raise ValueError("need at least 3 detunings to bracket an optimum")
    px = np.full(deltas.size, np.nan)
    p_ave = np.full(deltas.size, np.nan)
    failures = 0
    for k, delta in enumerate(deltas):
        scene = replace(base_scene, detuning_rad_s=float(delta))
        sol = solve_steady(scene, params)
        if not sol.converged:
            failures += 1
            continue
        p_x = solve_transverse(sol, scene, serf, params)
        px[k] = average_transverse(p_x, scene.grid)
        p_ave[k] = volume_average(sol.p_e, scene.grid)
    if np.all(np.isnan(px)):
        raise RuntimeError("all detuning scan points failed to converge")
    best = int(np.nanargmax(px))
    at_edge = best in (0, deltas.size - 1)
    if at_edge:
        warnings.warn("transverse optimum at the edge of the detuning grid; "
                      "widen the grid", stacklevel=2)
    return OptimalDetuning(delta_rad_s=float(deltas[best]), px_ave=float(px[best]),
                           index=best, deltas=deltas, px_curve=px,
                           p_ave_curve=p_ave, at_edge=at_edge, failures=failures)
