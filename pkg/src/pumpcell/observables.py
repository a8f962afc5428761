"""Scalar observables of a solved scene: transmission, averages, photon
bookkeeping, and the global balance residual used as a discretization check.
"""

import math
from dataclasses import dataclass

import numpy as np

from .grid import disc_integral, volume_average, wall_flux_integral
from .media import longitudinal_spin


@dataclass(frozen=True)
class Observables:
    transmission: float
    p_ave: float
    eta_loss: float
    balance_residual: float
    p_x_ave: float | None = None


def transmission(solution, scene):
    """Transmitted power fraction at z = L (radial trapezoid quadrature).

    Zero input power transmits 1 by convention (nothing to absorb).
    """
    if scene.power_mw == 0.0:
        return 1.0
    out = disc_integral(solution.intensity[-1, :], scene.grid)
    return out / scene.power_mw


def average_polarization(solution, scene):
    """Volume-averaged longitudinal polarization."""
    return volume_average(solution.p_e, scene.grid)


def _loss_factor(scene):
    """V Gamma_rel g_i / (P_in g_p): converts P_ave to an absorbed power
    fraction (photons spent against volume spin relaxation)."""
    geom = scene.geometry
    volume = math.pi * geom.radius_mm ** 2 * geom.length_mm
    med = scene.medium
    return volume * med.gamma_rel_s * med.g_i / (scene.power_mw * med.g_p)


def wall_loss(solution, scene):
    """Fraction of absorbed light lost to walls rather than volume relaxation:

    eta = 1 - T - (V Gamma_rel g_i / (P_in g_p)) P_ave
    """
    if scene.power_mw == 0.0:
        return 0.0
    return (1.0 - transmission(solution, scene)
            - _loss_factor(scene) * average_polarization(solution, scene))


def balance_residual(solution, scene):
    """Global photon-spin balance defect of the discrete solution.

    (1 - T) - (g_i / (P_in g_p)) [V Gamma_rel P_ave - D * boundary flux of
    q(P) P]; zero in the continuum limit, so the magnitude measures
    discretization error.  The flux uses second-order one-sided differences.
    """
    if scene.power_mw == 0.0:
        return 0.0
    med = scene.medium
    geom = scene.geometry
    volume = math.pi * geom.radius_mm ** 2 * geom.length_mm
    flux = wall_flux_integral(longitudinal_spin(solution.p_e), scene.grid)
    sink = (volume * med.gamma_rel_s * average_polarization(solution, scene)
            - med.d_mm2_s * flux)
    return (1.0 - transmission(solution, scene)
            - med.g_i / (scene.power_mw * med.g_p) * sink)


def compute_observables(solution, scene, p_x_ave=None):
    return Observables(
        transmission=transmission(solution, scene),
        p_ave=average_polarization(solution, scene),
        eta_loss=wall_loss(solution, scene),
        balance_residual=balance_residual(solution, scene),
        p_x_ave=p_x_ave,
    )
