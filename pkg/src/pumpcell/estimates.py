"""Closed-form scaling estimates for pumped cells with depolarizing walls.

These are the dimensional-analysis companions to the full solver: a
diffusion-depolarization length, an absorption length, a wall-induced
average-polarization ratio, an equivalent wall relaxation rate, an axial
profile for slab-like cells, and an upper bound on the transverse response
reachable by detuning the pump.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .media import lineshape

# first zero of the Bessel function J0, fundamental radial Dirichlet mode
BESSEL_J0_FIRST_ZERO = 2.404825557695773


def depolarization_length(d_mm2_s, gamma_rel_s, rop0_s, q=5.0):
    """lambda_D = sqrt(q D / (Gamma_rel + R_op0)), mm.

    The default q=5 is the midpoint of the slow-down range [4, 6].
    """
    rate = gamma_rel_s + rop0_s
    if rate <= 0.0:
        raise ValueError("Gamma_rel + R_op0 must be positive")
    return math.sqrt(q * d_mm2_s / rate)


def absorption_length(delta_rad_s, medium):
    """lambda_L = 1 / (g_i L(delta)), the unpolarized absorption length in mm."""
    return 1.0 / (medium.g_i * lineshape(delta_rad_s, medium))


@dataclass(frozen=True)
class RatioEstimate:
    """Estimated P_ave(depolarizing) / P_ave(nondepolarizing), with validity.

    Valid requires lambda_D < lambda_L (slow diffusion on the absorption
    scale) and lambda_D within the cell half-length and radius; outside
    that regime value is NaN and valid is False.
    """

    value: float
    valid: bool
    lambda_d_mm: float
    lambda_l_mm: float


def ratio_estimate(lambda_d_mm, lambda_l_mm, length_mm, radius_mm):
    """Wall-induced suppression of the average polarization.

    sqrt(1 - lambda_D/lambda_L) * (1 - 2 lambda_D/L) * (1 - lambda_D/R)^2
    """
    valid = (lambda_d_mm / lambda_l_mm < 1.0
             and lambda_d_mm <= 0.5 * length_mm
             and lambda_d_mm <= radius_mm)
    if not valid:
        return RatioEstimate(value=math.nan, valid=False,
                             lambda_d_mm=lambda_d_mm, lambda_l_mm=lambda_l_mm)
    value = (math.sqrt(1.0 - lambda_d_mm / lambda_l_mm)
             * (1.0 - 2.0 * lambda_d_mm / length_mm)
             * (1.0 - lambda_d_mm / radius_mm) ** 2)
    return RatioEstimate(value=value, valid=True,
                         lambda_d_mm=lambda_d_mm, lambda_l_mm=lambda_l_mm)


def gamma_wall(d_mm2_s, length_mm, radius_mm, q=6.0):
    """Equivalent homogeneous wall relaxation rate, 1/s.

    q D [(pi/L)^2 + (j01/R)^2], the fundamental diffusion-mode decay rate;
    q defaults to the unpolarized slow-down factor 6.
    """
    return q * d_mm2_s * ((math.pi / length_mm) ** 2
                          + (BESSEL_J0_FIRST_ZERO / radius_mm) ** 2)


def fz_profile(z_mm, lambda_d_mm, length_mm, rop0_s, gamma_rel_s):
    """Axial polarization profile for a slab with depolarizing end walls:

    f(z) = R0/(R0+Gamma) * (1 - (e^{-z/l} + e^{-(L-z)/l}) / (1 + e^{-L/l}))
    """
    z = np.asarray(z_mm, dtype=float)
    amp = rop0_s / (rop0_s + gamma_rel_s)
    lam = lambda_d_mm
    num = np.exp(-z / lam) + np.exp(-(length_mm - z) / lam)
    den = 1.0 + math.exp(-length_mm / lam)
    out = amp * (1.0 - num / den)
    return out if out.ndim else float(out)


def serf_bound(ratio_values, rop0_values, gamma_rel_s, gamma_e_b_s):
    """Upper bound on the detuning-optimized transverse response P_x,ave.

    Combines, over the same detuning grid used for the optimization,
        r1 = ratio * gamma_e B * R0 / (R0 + Gamma)^2
        r2 = ratio * gamma_e B / (2 (R0 + Gamma))
    and returns min(max r1, max r2).  Detunings where the ratio estimate is
    invalid (NaN) do not contribute.
    """
    ratio = np.nan_to_num(np.asarray(ratio_values, dtype=float), nan=0.0)
    rop0 = np.asarray(rop0_values, dtype=float)
    if ratio.shape != rop0.shape:
        raise ValueError("ratio and R_op0 grids must match")
    if not np.any(ratio > 0.0):
        warnings.warn("serf_bound: no valid detunings in the grid")
    total = rop0 + gamma_rel_s
    r1 = ratio * gamma_e_b_s * rop0 / total ** 2
    r2 = ratio * gamma_e_b_s / (2.0 * total)
    return float(min(r1.max(), r2.max()))
