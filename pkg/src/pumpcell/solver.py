"""Steady-state solve of the coupled spin-diffusion / light-propagation system.

The longitudinal polarization obeys

    D Lap[q(P) P] - (R_op + Gamma_rel) P + R_op = 0,   R_op = g_p L(delta) I,

while the pump intensity attenuates along z as dI/dz = -g_i L(delta) (1 - P) I.
The solver alternates an exact exponential march of I along z with a damped
relaxation of P at frozen I, using the substitution u = q(P) P to keep the
diffusion term linear; the inner Helmholtz solves run on the kernel backend.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._sor_py import _apply_walls
from .estimates import BESSEL_J0_FIRST_ZERO
from .grid import (CellGeometry, Grid, WallMode, apply_boundary,
                   cylindrical_laplacian)
from .media import (MediumParams, invert_longitudinal_spin, lineshape,
                    longitudinal_spin, slow_down)


@dataclass(frozen=True)
class Scene:
    """One fully specified steady-state problem instance."""

    geometry: CellGeometry
    medium: MediumParams
    detuning_rad_s: float
    power_mw: float
    wall_mode: WallMode
    grid: Grid

    def __post_init__(self):
        if self.power_mw < 0.0:
            raise ValueError("power must be nonnegative")
        if (abs(self.grid.length_mm - self.geometry.length_mm) > 1e-9 * self.geometry.length_mm
                or abs(self.grid.radius_mm - self.geometry.radius_mm) > 1e-9 * self.geometry.radius_mm):
            raise ValueError("grid extents do not match the cell geometry")

    @property
    def incident_intensity(self):
        """Flat-top intensity inside the beam, mW/mm^2."""
        return self.power_mw / (math.pi * self.geometry.beam_radius_mm ** 2)


@dataclass(frozen=True)
class SolverParams:
    """Tolerances and iteration limits for the steady-state solve.

    Residuals are normalized: the inner residual is scaled by
    Gamma_rel + max(R_op) (the largest local rate), the outer change
    combines max|dP| with max|dI|/I0.
    """

    outer_tol: float = 1e-8
    inner_tol: float = 1e-10
    max_outer: int = 500
    max_inner: int = 10000
    omega_outer: float = 0.5
    sor_omega: float | None = None   # None selects the auto estimate
    picard_max: int = 60
    check_every: int = 8


@dataclass(frozen=True)
class RelaxResult:
    """Outcome of one polarization relaxation at frozen intensity."""

    p_e: np.ndarray
    u: np.ndarray
    residual: float          # normalized interior residual
    sweeps: int
    rounds: int
    converged: bool


@dataclass(frozen=True)
class Solution:
    """Converged (or diagnosed) steady state."""

    p_e: np.ndarray
    intensity: np.ndarray
    iterations: int
    residual: float
    converged: bool
    inner_sweeps: int = 0
    message: str = ""


def inlet_profile(scene):
    """Discrete top-hat inlet whose 2 pi r dr trapezoid quadrature equals
    the configured beam power exactly.

    Nodes strictly inside the beam get the flat-top intensity; the one or
    two nodes straddling the beam edge get closed-form fractional weights
    chosen so the discrete radial integral reproduces power_mw to roundoff
    (so a fully polarized cell transmits exactly 1 in the discrete model).
    """
    g = scene.grid
    i0 = scene.incident_intensity
    prof = np.zeros(g.nr)
    if scene.power_mw == 0.0:
        return prof
    r_l = scene.geometry.beam_radius_mm
    radius = scene.geometry.radius_mm
    if r_l >= radius * (1.0 - 1e-12):
        prof[:] = i0
        return prof
    s = r_l / g.dr
    k = int(math.floor(s + 1e-12))
    theta = s - k
    if k == 0:
        prof[0] = i0
        prof[1] = 0.5 * theta ** 2 * i0
        return prof
    prof[:k] = i0
    if theta <= 0.5:
        prof[k] = (0.5 + theta + theta ** 2 / (2.0 * k)) * i0
    else:
        prof[k] = i0
        prof[k + 1] = (2.0 * k * theta + theta ** 2 - k) / (2.0 * (k + 1)) * i0
    return prof


def march_light(p_e, scene):
    """Propagate the pump intensity down the cell at frozen polarization.

    Per-cell exact exponential step with the midpoint polarization:
        I[i+1] = I[i] * exp(-g_i L(delta) (1 - (P[i]+P[i+1])/2) dz)
    evaluated as a cumulative product along z (same arithmetic order as a
    sequential loop, so results are bit-reproducible).
    """
    g = scene.grid
    p = np.asarray(p_e, dtype=float)
    kappa = scene.medium.g_i * lineshape(scene.detuning_rad_s, scene.medium)
    pbar = 0.5 * (p[:-1, :] + p[1:, :])
    factors = np.exp(-kappa * g.dz * (1.0 - pbar))
    out = np.empty(g.shape)
    out[0, :] = inlet_profile(scene)
    out[1:, :] = out[0, :][None, :] * np.cumprod(factors, axis=0)
    return out


def _interior_residual(u, coeff, source, diff, grid):
    """Max abs residual of diff*Lap(u) - coeff*u + source on interior+axis,
    using the same stencil as the relaxation kernel."""
    inv_dz2 = 1.0 / grid.dz ** 2
    inv_dr2 = 1.0 / grid.dr ** 2
    jj = np.arange(1, grid.nr - 1)
    w_in = (1.0 - 0.5 / jj) * inv_dr2
    w_out = (1.0 + 0.5 / jj) * inv_dr2
    diag_int = diff * (2.0 * inv_dz2 + 2.0 * inv_dr2) + coeff[1:-1, 1:-1]
    diag_ax = diff * (2.0 * inv_dz2 + 4.0 * inv_dr2) + coeff[1:-1, 0]
    num_int = (diff * ((u[:-2, 1:-1] + u[2:, 1:-1]) * inv_dz2
                       + u[1:-1, :-2] * w_in + u[1:-1, 2:] * w_out)
               + source[1:-1, 1:-1])
    num_ax = (diff * ((u[:-2, 0] + u[2:, 0]) * inv_dz2
                      + 4.0 * inv_dr2 * u[1:-1, 1])
              + source[1:-1, 0])
    res = np.abs(num_int - diag_int * u[1:-1, 1:-1]).max()
    res_ax = np.abs(num_ax - diag_ax * u[1:-1, 0]).max()
    return max(res, res_ax)


def _deflate_constant(u, coeff, source, diff, grid):
    """Uniform shift of u that zeroes the volume-summed residual.

    All-Neumann problems have a near-null mode in the constant direction
    (its eigenvalue is ~ the smallest reaction coefficient, orders of
    magnitude below the stencil diagonal), and point relaxation reduces it
    painfully slowly when pumping is weak.  Since the stencil row sums
    vanish on a constant, the shift delta = sum(r)/sum(coeff) removes that
    component of the residual exactly, leaving only fast modes for the
    sweeps.  Shifting the whole array keeps mirrored wall rows consistent.
    """
    lap = cylindrical_laplacian(u, grid)
    r = (diff * lap[1:-1, :-1] - coeff[1:-1, :-1] * u[1:-1, :-1]
         + source[1:-1, :-1])
    u += float(r.sum()) / float(coeff[1:-1, :-1].sum())


def _auto_omega(diff, c_min, grid, dirichlet_z, dirichlet_r):
    """Over-relaxation factor from the smallest-eigenvalue estimate of the
    discrete operator (Dirichlet fundamental mode per pinned direction)."""
    diag = diff * (2.0 / grid.dz ** 2 + 2.0 / grid.dr ** 2) + c_min
    lam = 0.0
    if dirichlet_z:
        lam += (math.pi / grid.length_mm) ** 2
    if dirichlet_r:
        lam += (BESSEL_J0_FIRST_ZERO / grid.radius_mm) ** 2
    mu = 1.0 - (diff * lam + c_min) / diag
    mu = min(max(mu, 0.0), 1.0 - 1e-12)
    omega = 2.0 / (1.0 + math.sqrt(1.0 - mu * mu))
    # cap below 2: the radial weights make the operator mildly nonsymmetric
    # (axis row especially), and in practice omega beyond ~1.95 destabilizes
    # the near-singular all-Neumann scenes instead of accelerating them
    return min(max(omega, 1.0), 1.95)


def relax_polarization(intensity, scene, params=None, u0=None, frozen_q=None,
                       axial_dirichlet=None, lateral_dirichlet=None):
    """Solve the polarization equation at frozen intensity.

    Picard iteration on u = q(P) P: each round freezes the slow-down factor
    in the loss coefficient c = (R_op + Gamma_rel)/q(P) and relaxes the
    linear Helmholtz system D Lap(u) - c u + R_op = 0 on the kernel backend,
    clipping u into [0, 4].  With frozen_q the equation is linear and a
    single relaxation applies (no clipping); axial/lateral boundary types
    default to the scene wall mode but can be overridden independently.

    D = 0 returns the pointwise algebraic solution P = R_op/(R_op + Gamma)
    (no wall values imposed; the zero-diffusion limit has no boundary layer).
    """
    if params is None:
        params = SolverParams()
    med = scene.medium
    g = scene.grid
    rop = med.g_p * lineshape(scene.detuning_rad_s, med) * np.asarray(intensity, dtype=float)
    gam = med.gamma_rel_s
    scale = gam + float(rop.max())
    dir_z = (scene.wall_mode is WallMode.DEPOLARIZING
             if axial_dirichlet is None else bool(axial_dirichlet))
    dir_r = (scene.wall_mode is WallMode.DEPOLARIZING
             if lateral_dirichlet is None else bool(lateral_dirichlet))

    if med.d_mm2_s == 0.0:
        p = rop / (rop + gam)
        u = frozen_q * p if frozen_q is not None else longitudinal_spin(p)
        return RelaxResult(p_e=p, u=u, residual=0.0, sweeps=0, rounds=0,
                           converged=True)

    if u0 is None:
        p_init = rop / (rop + gam)
        u = frozen_q * p_init if frozen_q is not None else longitudinal_spin(p_init)
    else:
        u = np.array(u0, dtype=float, copy=True)
    # make the walls consistent before any residual is trusted; an initial
    # guess that satisfies the interior equation but not the boundary (e.g.
    # the algebraic solution under uniform light) must not short-circuit
    _apply_walls(u, dir_z, dir_r)

    c_floor = gam / 6.0
    omega = params.sor_omega if params.sor_omega is not None else _auto_omega(
        med.d_mm2_s, c_floor + float(rop.min()) / 6.0, g, dir_z, dir_r)
    # the relaxation cannot push the residual below the roundoff of the
    # stencil arithmetic (a cancellation of terms ~ diag * u, amplified by
    # the over-relaxation); floor the tolerance there or weakly pumped
    # scenes (small scale, tiny tol) would stall on pure noise
    diag0 = med.d_mm2_s * (2.0 / g.dz ** 2 + 2.0 / g.dr ** 2) + scale
    tol_floor = 256.0 * np.finfo(float).eps * 6.0 * diag0
    tol_abs = max(params.inner_tol * scale, tol_floor)

    # Newton linearization of the reaction term: with N(u) = (R+Gamma) P(u),
    # each round solves D Lap(u) - N'(u_k) u + [R_op - N(u_k) + N'(u_k) u_k]
    # = 0.  A plain Picard split c = (R+Gamma)/q is marginally stable near
    # saturation (the pointwise map has derivative ~ -1 at P ~ 1), while the
    # tangent problem converges quadratically.  The bound clamp sits between
    # rounds (u < 4 strictly at the fixed point, so it is inactive there);
    # clamping inside the linear relaxation would fight it into a plateau.
    sweeps_total = 0
    rounds = 0
    converged = False
    deflate = not (dir_z or dir_r)
    res_nl = math.inf
    for rounds in range(1, params.picard_max + 1):
        if frozen_q is not None:
            coeff = (rop + gam) / frozen_q
            source = rop
        else:
            np.clip(u, 0.0, 4.0, out=u)
            p = invert_longitudinal_spin(u)
            p2 = p * p
            # dP/du, the inverse slope of u = q(P) P; in [1/6, 1/2]
            p_prime = (1.0 + p2) ** 2 / (6.0 + 2.0 * p2 * p2)
            coeff = (rop + gam) * p_prime
            source = rop - (rop + gam) * p + coeff * u
        # at the linearization point the tangent residual equals the
        # nonlinear residual, so one check serves both purposes
        res_nl = _interior_residual(u, coeff, source, med.d_mm2_s, g)
        if res_nl <= tol_abs:
            converged = True
            break
        budget = params.max_inner - sweeps_total
        if budget <= 0:
            break
        target = max(0.2 * res_nl, 0.5 * tol_abs)
        # interleave short sweep batches with the constant-mode deflation on
        # all-Neumann scenes; without it, weakly pumped problems spend the
        # whole budget crawling down their near-null mode
        res_lin = math.inf
        while budget > 0 and res_lin > target:
            if deflate:
                _deflate_constant(u, coeff, source, med.d_mm2_s, g)
            res_lin, sw = kernels.helmholtz_sor_solve(
                u, coeff, source, med.d_mm2_s, g.dz, g.dr, dir_z, dir_r,
                omega, target, min(budget, 512), -1.0, params.check_every)
            sweeps_total += sw
            budget -= sw

    if frozen_q is not None:
        p = u / frozen_q
    else:
        np.clip(u, 0.0, 4.0, out=u)
        p = invert_longitudinal_spin(u)
    return RelaxResult(p_e=p, u=u, residual=res_nl / scale, sweeps=sweeps_total,
                       rounds=rounds, converged=converged)


def solve_steady(scene, params=None):
    """Alternate march_light and relax_polarization to the coupled steady
    state, damping the polarization update by omega_outer.

    The outer change measure is max(|dP|_inf, |dI|_inf / I0).  Failure modes:
    inner stall, outer iteration limit, and a rising change over 10
    consecutive outer steps (reported with advice to lower omega_outer).
    Zero input power returns the dark state immediately.
    """
    if params is None:
        params = SolverParams()
    g = scene.grid

    if scene.power_mw == 0.0:
        zeros = np.zeros(g.shape)
        return Solution(p_e=zeros, intensity=zeros.copy(), iterations=0,
                        residual=0.0, converged=True)

    med = scene.medium
    gam = med.gamma_rel_s
    shape_l = lineshape(scene.detuning_rad_s, med)
    inlet = inlet_profile(scene)
    i_scale = float(inlet.max())

    rop0 = med.g_p * shape_l * np.tile(inlet, (g.nz, 1))
    p_cur = apply_boundary(rop0 / (rop0 + gam), scene.wall_mode)
    u_cur = longitudinal_spin(p_cur)
    i_cur = march_light(p_cur, scene)

    inner_total = 0
    change = math.inf
    prev_change = math.inf
    rising = 0
    for it in range(1, params.max_outer + 1):
        rr = relax_polarization(i_cur, scene, params, u0=u_cur)
        inner_total += rr.sweeps
        if not rr.converged:
            return Solution(p_e=p_cur, intensity=i_cur, iterations=it,
                            residual=rr.residual, converged=False,
                            inner_sweeps=inner_total,
                            message=f"inner relaxation stalled at residual "
                                    f"{rr.residual:.3e}")
        p_new = p_cur + params.omega_outer * (rr.p_e - p_cur)
        i_new = march_light(p_new, scene)
        change = max(float(np.abs(p_new - p_cur).max()),
                     float(np.abs(i_new - i_cur).max()) / i_scale)
        p_cur, i_cur = p_new, i_new
        u_cur = longitudinal_spin(p_cur)
        if change < params.outer_tol:
            return Solution(p_e=p_cur, intensity=i_cur, iterations=it,
                            residual=change, converged=True,
                            inner_sweeps=inner_total)
        if change > prev_change:
            rising += 1
            if rising >= 10:
                return Solution(p_e=p_cur, intensity=i_cur, iterations=it,
                                residual=change, converged=False,
                                inner_sweeps=inner_total,
                                message="outer iteration oscillating; retry "
                                        "with a smaller omega_outer")
        else:
            rising = 0
        prev_change = change
    return Solution(p_e=p_cur, intensity=i_cur, iterations=params.max_outer,
                    residual=change, converged=False, inner_sweeps=inner_total,
                    message="outer iteration limit reached")
