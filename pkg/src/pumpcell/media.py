"""Vapor-cell medium properties: optical lineshape, slow-down factor, and
collision/pumping coefficients derived from a configurable constants table.

Unit conventions used across the package: length mm, time s, rates 1/s,
intensity mW/mm^2, optical power mW, detuning rad/s, temperature K,
number density 1/mm^3, diffusion mm^2/s, magnetic field T.
"""

import hashlib
import math
from dataclasses import dataclass, fields

import numpy as np
from scipy import constants as sc

# electron gyromagnetic ratio, rad/(s T); fundamental, not a config knob
GAMMA_E_RAD_S_T = sc.physical_constants["electron gyromag. ratio"][0]

_AMAGAT_REF_P_TORR = 760.0
_AMAGAT_REF_T_K = 273.15


@dataclass(frozen=True)
class ConstantsConfig:
    """Physics coefficient table.

    Every coefficient carries its unit in the field name.  Defaults are
    standard literature values for Rb-87 D1 in N2 buffer gas; any of them
    can be overridden from a flat TOML file (one key per coefficient).
    """

    d1_wavelength_nm: float = 794.979
    d1_oscillator_strength: float = 0.3421
    hyperfine_ground_split_ghz: float = 6.834683
    hyperfine_excited_split_ghz: float = 0.8145
    pressure_broadening_hwhm_ghz_per_amagat: float = 8.9
    diffusion_ref_mm2_per_s: float = 19.0
    diffusion_ref_pressure_torr: float = 760.0
    diffusion_ref_temperature_k: float = 273.15
    diffusion_temperature_exponent: float = 1.5
    sigma_rb_n2_spin_destruction_mm2: float = 1.0e-20
    sigma_rb_rb_spin_destruction_mm2: float = 9.0e-16
    vapor_log10_torr_const: float = 15.88253
    vapor_log10_torr_over_t: float = -4529.635
    vapor_log10_torr_linear_t: float = 0.00058663
    vapor_log10_torr_log10_t: float = -2.99138
    rb_mass_amu: float = 86.909180
    n2_mass_amu: float = 28.0134

    @classmethod
    def from_mapping(cls, mapping):
        """Build from a dict, rejecting unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ValueError(f"unknown constants keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in mapping.items()})

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def table_hash(self):
        """Stable sha256 of the effective coefficient table."""
        text = "\n".join(f"{k} = {v!r}" for k, v in sorted(self.as_dict().items()))
        return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True)
class MediumParams:
    """Derived per-condition medium coefficients (see module units note).

    g_p converts lineshape * intensity to a pumping rate:
        R_op = g_p * L(delta) * I   [1/s]
    g_i converts lineshape to an absorption coefficient:
        alpha = g_i * L(delta)      [1/mm]
    """

    temperature_k: float
    n2_pressure_torr: float
    d_mm2_s: float
    gamma_rel_s: float
    gamma_l_rad_s: float
    delta_s_rad_s: float
    delta_p_rad_s: float
    n_a_mm3: float
    g_p: float
    g_i: float
    gamma_e_rad_s_t: float = GAMMA_E_RAD_S_T

    def __post_init__(self):
        for name in ("temperature_k", "n2_pressure_torr", "gamma_rel_s",
                     "gamma_l_rad_s", "n_a_mm3", "g_p", "g_i"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.d_mm2_s < 0.0:
            raise ValueError("d_mm2_s must be nonnegative")


def medium_from_conditions(temperature_k, n2_pressure_torr,
                           constants=ConstantsConfig()):
    """Evaluate the coefficient table at a cell temperature and N2 fill.

    The fill pressure is quoted at the operating temperature.  Diffusion
    scales as (1/p) * T^x, pressure broadening is proportional to buffer
    density, the alkali density follows the configured vapor-pressure
    curve, and the spin-destruction rate combines Rb-N2 and Rb-Rb
    collisions at mean thermal relative speeds.
    """
    t = float(temperature_k)
    p = float(n2_pressure_torr)
    if not (t > 0.0 and p > 0.0):
        raise ValueError("temperature and pressure must be positive")
    c = constants

    n_n2_mm3 = p * sc.torr / (sc.k * t) * 1e-9
    rho_amagat = (p / _AMAGAT_REF_P_TORR) * (_AMAGAT_REF_T_K / t)

    d = (c.diffusion_ref_mm2_per_s
         * (c.diffusion_ref_pressure_torr / p)
         * (t / c.diffusion_ref_temperature_k) ** c.diffusion_temperature_exponent)

    gamma_l = 2.0 * math.pi * 1e9 * c.pressure_broadening_hwhm_ghz_per_amagat * rho_amagat

    log10_p_rb = (c.vapor_log10_torr_const
                  + c.vapor_log10_torr_over_t / t
                  + c.vapor_log10_torr_linear_t * t
                  + c.vapor_log10_torr_log10_t * math.log10(t))
    n_a_mm3 = 10.0 ** log10_p_rb * sc.torr / (sc.k * t) * 1e-9

    mu_rbn2 = (c.rb_mass_amu * c.n2_mass_amu
               / (c.rb_mass_amu + c.n2_mass_amu)) * sc.atomic_mass
    mu_rbrb = 0.5 * c.rb_mass_amu * sc.atomic_mass
    v_rbn2 = math.sqrt(8.0 * sc.k * t / (math.pi * mu_rbn2)) * 1e3  # mm/s
    v_rbrb = math.sqrt(8.0 * sc.k * t / (math.pi * mu_rbrb)) * 1e3
    gamma_rel = (n_n2_mm3 * c.sigma_rb_n2_spin_destruction_mm2 * v_rbn2
                 + n_a_mm3 * c.sigma_rb_rb_spin_destruction_mm2 * v_rbrb)

    # integrated optical cross section, mm^2 rad/s
    r_e = sc.physical_constants["classical electron radius"][0]
    sigma_int = 2.0 * math.pi * (math.pi * r_e * sc.c * c.d1_oscillator_strength) * 1e6
    omega0 = 2.0 * math.pi * sc.c / (c.d1_wavelength_nm * 1e-9)
    g_p = sigma_int / (sc.hbar * omega0) * 1e-3
    g_i = n_a_mm3 * sigma_int

    return MediumParams(
        temperature_k=t,
        n2_pressure_torr=p,
        d_mm2_s=d,
        gamma_rel_s=gamma_rel,
        gamma_l_rad_s=gamma_l,
        delta_s_rad_s=2.0 * math.pi * 1e9 * c.hyperfine_ground_split_ghz,
        delta_p_rad_s=2.0 * math.pi * 1e9 * c.hyperfine_excited_split_ghz,
        n_a_mm3=n_a_mm3,
        g_p=g_p,
        g_i=g_i,
    )


def lineshape(delta, medium):
    """Unit-area absorption profile L(delta) in s (delta in rad/s).

    Four pressure-broadened Lorentzians weighted 5:5:5:1 at the hyperfine
    transition offsets 0, Delta_S + Delta_P, Delta_S, and Delta_P.
    """
    d = np.asarray(delta, dtype=float)
    g2 = medium.gamma_l_rad_s ** 2
    ds = medium.delta_s_rad_s
    dp = medium.delta_p_rad_s
    out = (medium.gamma_l_rad_s / (16.0 * np.pi)) * (
        5.0 / (d ** 2 + g2)
        + 5.0 / ((d - ds - dp) ** 2 + g2)
        + 5.0 / ((d - ds) ** 2 + g2)
        + 1.0 / ((d - dp) ** 2 + g2)
    )
    return out if out.ndim else float(out)


def lineshape_derivative(delta, medium):
    """Analytic d L / d delta, in s per (rad/s)."""
    d = np.asarray(delta, dtype=float)
    g2 = medium.gamma_l_rad_s ** 2
    ds = medium.delta_s_rad_s
    dp = medium.delta_p_rad_s
    out = (medium.gamma_l_rad_s / (16.0 * np.pi)) * (
        -10.0 * d / (d ** 2 + g2) ** 2
        - 10.0 * (d - ds - dp) / ((d - ds - dp) ** 2 + g2) ** 2
        - 10.0 * (d - ds) / ((d - ds) ** 2 + g2) ** 2
        - 2.0 * (d - dp) / ((d - dp) ** 2 + g2) ** 2
    )
    return out if out.ndim else float(out)


def lineshape_stationary_points(medium, lo, hi, n=20001):
    """Detunings where dL/ddelta changes sign, located by bisection on a
    uniform scan of [lo, hi] (rad/s).  Returns a sorted array."""
    grid = np.linspace(lo, hi, n)
    der = lineshape_derivative(grid, medium)
    sign = np.sign(der)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = []
    for i in idx:
        a, b = grid[i], grid[i + 1]
        fa = lineshape_derivative(a, medium)
        for _ in range(80):
            m = 0.5 * (a + b)
            fm = lineshape_derivative(m, medium)
            if fa * fm <= 0:
                b = m
            else:
                a, fa = m, fm
        roots.append(0.5 * (a + b))
    return np.array(roots)


def _check_range(x, lo, hi, name):
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError(f"{name} outside [{lo}, {hi}]")


def slow_down(p):
    """Nuclear slow-down factor q(P) = (6 + 2 P^2)/(1 + P^2); maps [0,1] to [6,4]."""
    p = np.asarray(p, dtype=float)
    _check_range(p, 0.0, 1.0, "polarization")
    out = (6.0 + 2.0 * p ** 2) / (1.0 + p ** 2)
    return out if out.ndim else float(out)


def longitudinal_spin(p):
    """u = q(P) * P, the conserved diffusion variable; maps [0,1] to [0,4]."""
    p = np.asarray(p, dtype=float)
    _check_range(p, 0.0, 1.0, "polarization")
    out = (6.0 + 2.0 * p ** 2) * p / (1.0 + p ** 2)
    return out if out.ndim else float(out)


def invert_longitudinal_spin(u):
    """Recover P from u = q(P) P by Newton iteration.

    The map is strictly increasing on [0,1] (derivative (6 + 2 P^4)/(1 + P^2)^2
    >= 1.5), so the root is unique; round-trips are accurate to ~1e-13.
    """
    u_in = np.asarray(u, dtype=float)
    _check_range(u_in, 0.0, 4.0, "longitudinal spin")
    p = np.clip(u_in / 5.0, 0.0, 1.0)
    for _ in range(60):
        p2 = p * p
        h = (6.0 + 2.0 * p2) * p / (1.0 + p2) - u_in
        if np.max(np.abs(h)) < 1e-14:
            break
        hp = (6.0 + 2.0 * p2 * p2) / (1.0 + p2) ** 2
        p = np.clip(p - h / hp, 0.0, 1.0)
    return p if p.ndim else float(p)
