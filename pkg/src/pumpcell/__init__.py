"""Steady-state optical pumping and spin transport in small cylindrical
alkali vapor cells: coupled diffusion/light-propagation solver, transverse
(SERF) linear response, closed-form design estimates, and a sweep harness.
"""

__version__ = "0.1.0"

from .estimates import (BESSEL_J0_FIRST_ZERO, RatioEstimate, absorption_length,
                        depolarization_length, fz_profile, gamma_wall,
                        ratio_estimate, serf_bound)
from .grid import (CellGeometry, Grid, WallMode, apply_boundary,
                   cylindrical_laplacian, disc_integral, field_from_csv,
                   field_to_csv, volume_average, wall_flux_integral)
from .media import (ConstantsConfig, MediumParams, invert_longitudinal_spin,
                    lineshape, lineshape_derivative, lineshape_stationary_points,
                    longitudinal_spin, medium_from_conditions, slow_down)
from .observables import Observables, compute_observables
from .serf import (OptimalDetuning, SerfSettings, average_transverse,
                   default_detuning_grid, optimize_detuning, solve_transverse)
from .solver import (RelaxResult, Scene, Solution, SolverParams, inlet_profile,
                     march_light, relax_polarization, solve_steady)

__all__ = [
    "BESSEL_J0_FIRST_ZERO", "CellGeometry", "ConstantsConfig", "Grid",
    "MediumParams", "Observables", "OptimalDetuning", "RatioEstimate",
    "RelaxResult", "Scene", "SerfSettings", "Solution", "SolverParams",
    "WallMode", "absorption_length", "apply_boundary", "average_transverse",
    "compute_observables", "cylindrical_laplacian", "default_detuning_grid",
    "depolarization_length", "disc_integral", "field_from_csv", "field_to_csv",
    "fz_profile", "gamma_wall", "inlet_profile", "invert_longitudinal_spin",
    "lineshape", "lineshape_derivative", "lineshape_stationary_points",
    "longitudinal_spin", "march_light", "medium_from_conditions",
    "optimize_detuning", "ratio_estimate", "relax_polarization", "serf_bound",
    "slow_down", "solve_steady", "solve_transverse", "volume_average",
    "wall_flux_integral",
]
