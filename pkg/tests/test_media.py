"""Medium coefficient table against an independently evaluated record.

The expected numbers below were produced by a scratch evaluation of the
documented formulas (scipy.constants only) and frozen before the module
was written; they pin the whole constants calibration at 150 C / 200 Torr.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import constants as sc
from scipy.integrate import quad

from pumpcell.media import (
    ConstantsConfig,
    MediumParams,
    invert_longitudinal_spin,
    lineshape,
    lineshape_derivative,
    lineshape_stationary_points,
    longitudinal_spin,
    medium_from_conditions,
    slow_down,
)

# frozen record: 150 C, 200 Torr N2, default constants table
ORACLE = {
    "d_mm2_s": 1.3921207542e+02,
    "gamma_l_rad_s": 9.4993335655e+09,
    "n_a_mm3": 8.4661155566e+10,
    "gamma_rel_s": 6.4278250697e+01,
    "g_p": 2.2830437480e+16,
    "g_i": 4.8296927300e+11,
}
ORACLE_L0 = 1.2976813864e-11
ORACLE_ROP0_HALF_MW = 4.7152252104e+04


@pytest.fixture(scope="module")
def medium():
    return medium_from_conditions(temperature_k=423.15, n2_pressure_torr=200.0)


@pytest.mark.parametrize("field,expected", sorted(ORACLE.items()))
def test_frozen_coefficients(medium, field, expected):
    assert getattr(medium, field) == pytest.approx(expected, rel=1e-9)


def test_frozen_lineshape_peak(medium):
    assert lineshape(0.0, medium) == pytest.approx(ORACLE_L0, rel=1e-9)


def test_frozen_pump_rate(medium):
    # 0.5 mW over the full 1 mm disc
    i0 = 0.5 / math.pi
    rop0 = medium.g_p * lineshape(0.0, medium) * i0
    assert rop0 == pytest.approx(ORACLE_ROP0_HALF_MW, rel=1e-9)


def test_splittings_passthrough(medium):
    assert medium.delta_s_rad_s == pytest.approx(2 * math.pi * 6.834683e9)
    assert medium.delta_p_rad_s == pytest.approx(2 * math.pi * 0.8145e9)


def test_gyromagnetic_ratio_is_codata(medium):
    codata = sc.physical_constants["electron gyromag. ratio"][0]
    assert medium.gamma_e_rad_s_t == codata


def test_diffusion_inverse_in_pressure():
    m1 = medium_from_conditions(423.15, 200.0)
    m2 = medium_from_conditions(423.15, 400.0)
    assert m2.d_mm2_s == pytest.approx(0.5 * m1.d_mm2_s, rel=1e-12)


def test_vapor_density_grows_with_temperature():
    cold = medium_from_conditions(413.15, 200.0)
    hot = medium_from_conditions(433.15, 200.0)
    assert hot.n_a_mm3 > cold.n_a_mm3 > 0.0


def test_relaxation_grows_with_pressure():
    lo = medium_from_conditions(423.15, 200.0)
    hi = medium_from_conditions(423.15, 2000.0)
    assert hi.gamma_rel_s > lo.gamma_rel_s


def test_lineshape_unit_area(medium):
    # four Lorentzians, weights 5:5:5:1, each integrating to pi/Gamma_L
    span = 3e4 * medium.gamma_l_rad_s
    area, err = quad(lambda d: lineshape(d, medium), -span, span, limit=400)
    assert area == pytest.approx(1.0, abs=2e-4)


def test_lineshape_positive_and_even_count_of_components(medium):
    deltas = np.linspace(-1e11, 1e11, 1001)
    vals = np.array([lineshape(d, medium) for d in deltas])
    assert np.all(vals > 0.0)


def test_lineshape_derivative_matches_finite_difference(medium):
    h = 1e4  # rad/s, tiny vs Gamma_L ~ 1e10
    for d in (-2e10, 0.0, 3.1e9, 4.3e10, 5e10):
        fd = (lineshape(d + h, medium) - lineshape(d - h, medium)) / (2 * h)
        assert lineshape_derivative(d, medium) == pytest.approx(fd, rel=1e-6)


def test_stationary_points_zero_the_derivative(medium):
    lo, hi = -2e10, 7e10
    pts = lineshape_stationary_points(medium, lo, hi)
    assert len(pts) >= 3  # two peaks and the valley between them at least
    assert all(lo < p < hi for p in pts)
    assert np.all(np.diff(pts) > 0)
    scale = lineshape(0.0, medium) / medium.gamma_l_rad_s
    for p in pts:
        assert abs(lineshape_derivative(p, medium)) < 1e-6 * scale


def test_slow_down_endpoints():
    assert slow_down(0.0) == 6.0
    assert slow_down(1.0) == 4.0


@given(st.floats(min_value=0.0, max_value=1.0))
def test_slow_down_range(p):
    q = slow_down(p)
    assert 4.0 <= q <= 6.0


@given(st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=0.0, max_value=1.0))
def test_slow_down_monotone_decreasing(a, b):
    lo, hi = sorted((a, b))
    assert slow_down(lo) >= slow_down(hi)


def test_longitudinal_spin_endpoints():
    assert longitudinal_spin(0.0) == 0.0
    assert longitudinal_spin(1.0) == 4.0


@given(st.floats(min_value=0.0, max_value=1.0))
def test_spin_inversion_round_trip(p):
    u = longitudinal_spin(p)
    assert invert_longitudinal_spin(u) == pytest.approx(p, abs=1e-12)


def test_spin_inversion_vectorized():
    p = np.linspace(0.0, 1.0, 257)
    u = longitudinal_spin(p)
    back = invert_longitudinal_spin(u)
    np.testing.assert_allclose(back, p, atol=1e-12)


def test_constants_from_mapping_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        ConstantsConfig.from_mapping({"d1_wavelength_nm": 795.0,
                                      "not_a_knob": 1.0})


def test_constants_round_trip_mapping():
    cfg = ConstantsConfig(d1_oscillator_strength=0.35)
    again = ConstantsConfig.from_mapping(cfg.as_dict())
    assert again == cfg


def test_table_hash_tracks_content():
    a = ConstantsConfig()
    b = ConstantsConfig(d1_oscillator_strength=0.35)
    assert a.table_hash() == ConstantsConfig().table_hash()
    assert a.table_hash() != b.table_hash()
    assert len(a.table_hash()) == 64


def test_medium_validation():
    with pytest.raises(ValueError):
        MediumParams(temperature_k=-1.0, n2_pressure_torr=200.0,
                     d_mm2_s=100.0, gamma_rel_s=60.0, gamma_l_rad_s=1e10,
                     delta_s_rad_s=4e10, delta_p_rad_s=5e9,
                     n_a_mm3=8e10, g_p=2e16, g_i=5e11)
