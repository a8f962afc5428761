"""Transverse linear response and the detuning optimizer."""

import math
import warnings

import numpy as np
import pytest

from pumpcell.grid import CellGeometry, Grid, WallMode
from pumpcell.media import medium_from_conditions
from pumpcell.serf import (
    SerfSettings,
    average_transverse,
    default_detuning_grid,
    optimize_detuning,
    solve_transverse,
)
from pumpcell.solver import Scene, solve_steady

GHZ = 2 * math.pi * 1e9


@pytest.fixture(scope="module")
def medium():
    return medium_from_conditions(temperature_k=423.15, n2_pressure_torr=200.0)


def small_scene(medium, detuning_ghz=0.0, power_mw=0.5,
                wall=WallMode.NONDEPOLARIZING):
    geo = CellGeometry(length_mm=2.0, radius_mm=1.0, beam_radius_mm=1.0)
    return Scene(geometry=geo, medium=medium,
                 detuning_rad_s=detuning_ghz * GHZ, power_mw=power_mw,
                 wall_mode=wall, grid=Grid.from_geometry(geo, nz=51, nr=26))


@pytest.fixture(scope="module")
def solved_pair(medium):
    sc = small_scene(medium)
    sol = solve_steady(sc)
    assert sol.converged
    return sol, sc


def test_linearity_in_field(solved_pair):
    sol, sc = solved_pair
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        px1 = solve_transverse(sol, sc, SerfSettings(b_tesla=1e-10))
        px2 = solve_transverse(sol, sc, SerfSettings(b_tesla=2e-10))
    assert average_transverse(px1, sc.grid) > 0.0
    np.testing.assert_allclose(px2, 2.0 * px1, rtol=1e-6)


def test_zero_field_gives_zero_response(solved_pair):
    sol, sc = solved_pair
    px = solve_transverse(sol, sc, SerfSettings(b_tesla=0.0))
    assert np.all(px == 0.0)


def test_default_field_warns_linearization(solved_pair):
    # at 1 nT and 200 Torr the Larmor rate is well past 0.1 Gamma_rel
    sol, sc = solved_pair
    with pytest.warns(UserWarning, match="0.1"):
        solve_transverse(sol, sc)


def test_response_field_is_physical(solved_pair):
    sol, sc = solved_pair
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        px = solve_transverse(sol, sc)
    assert np.all(px >= -1e-15)
    assert px.max() < 1.0
    # depolarizing transverse walls: the response vanishes there either way
    assert abs(px[0, :]).max() < px.max()


def test_depolarizing_walls_pin_transverse_response(medium):
    sc = small_scene(medium, wall=WallMode.DEPOLARIZING)
    sol = solve_steady(sc)
    assert sol.converged
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        px = solve_transverse(sol, sc)
    assert np.all(px[0, :] == 0.0)
    assert np.all(px[-1, :] == 0.0)
    assert np.all(px[:, -1] == 0.0)


def test_detuning_grid_properties(medium):
    grid = default_detuning_grid(medium)
    assert np.all(np.diff(grid) > 0.0)
    assert grid[0] <= -3.0 * medium.delta_s_rad_s
    assert grid[-1] == pytest.approx(2 * math.pi * 500e9, rel=1e-9)
    # fine sampling around each hyperfine component
    gl = medium.gamma_l_rad_s
    for center in (0.0, medium.delta_p_rad_s, medium.delta_s_rad_s,
                   medium.delta_s_rad_s + medium.delta_p_rad_s):
        near = grid[np.abs(grid - center) < 0.5 * gl]
        assert near.size >= 8
        assert np.diff(near).max() < 0.13 * gl


def test_optimize_finds_interior_optimum(medium):
    sc = small_scene(medium)
    deltas = np.array([0.0, 7.0, 30.0, 60.0, 120.0, 250.0, 500.0]) * GHZ
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        opt = optimize_detuning(sc, deltas)
    assert opt.failures == 0
    assert not opt.at_edge
    assert 0 < opt.index < deltas.size - 1
    assert opt.px_ave == np.nanmax(opt.px_curve)
    assert opt.delta_rad_s == deltas[opt.index]
    assert np.all(np.isfinite(opt.p_ave_curve))


def test_optimize_warns_at_edge(medium):
    sc = small_scene(medium)
    deltas = np.array([20.0, 40.0, 60.0]) * GHZ
    with pytest.warns(UserWarning, match="edge"):
        opt = optimize_detuning(sc, deltas)
    assert opt.at_edge


def test_optimize_needs_enough_points(medium):
    sc = small_scene(medium)
    with pytest.raises(ValueError):
        optimize_detuning(sc, np.array([0.0, 1.0]) * GHZ)
