"""Discrete geometry: Laplacian stencil, quadratures, walls, field CSV."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pumpcell.grid import (
    CellGeometry,
    Grid,
    WallMode,
    apply_boundary,
    cylindrical_laplacian,
    disc_integral,
    field_from_csv,
    field_to_csv,
    radial_weights,
    volume_average,
    wall_flux_integral,
)


def make_grid(nz=41, nr=21, length=2.0, radius=1.0):
    return Grid.from_geometry(CellGeometry(length_mm=length, radius_mm=radius),
                              nz=nz, nr=nr)


# ---------------------------------------------------------------- laplacian

def test_laplacian_exact_on_axial_quadratic():
    g = make_grid()
    z = g.z_nodes()[:, None]
    f = np.broadcast_to(z ** 2, g.shape)
    lap = cylindrical_laplacian(f, g)
    np.testing.assert_allclose(lap[1:-1, :-1], 2.0, rtol=0, atol=1e-11)


def test_laplacian_exact_on_radial_quadratic():
    # (1/r) d/dr (r d/dr) r^2 = 4, and the axis regularization gives the
    # same value at r=0
    g = make_grid()
    r = g.r_nodes()[None, :]
    f = np.broadcast_to(r ** 2, g.shape).copy()
    lap = cylindrical_laplacian(f, g)
    np.testing.assert_allclose(lap[1:-1, :-1], 4.0, rtol=0, atol=1e-11)


def test_laplacian_exact_on_parabola():
    g = make_grid()
    z = g.z_nodes()[:, None]
    f = np.broadcast_to(z * (g.length_mm - z), g.shape)
    lap = cylindrical_laplacian(f, g)
    np.testing.assert_allclose(lap[1:-1, :-1], -2.0, rtol=0, atol=1e-11)


def test_laplacian_wall_rows_are_zero():
    g = make_grid()
    rng = np.random.RandomState(7)
    f = rng.rand(*g.shape)
    lap = cylindrical_laplacian(f, g)
    assert np.all(lap[0, :] == 0.0)
    assert np.all(lap[-1, :] == 0.0)
    assert np.all(lap[:, -1] == 0.0)


def test_laplacian_shape_mismatch_raises():
    g = make_grid()
    with pytest.raises(ValueError, match="shape"):
        cylindrical_laplacian(np.zeros((g.nz, g.nr + 1)), g)


def _smooth_case(g):
    """Analytic test field sin^2(pi z / L) * exp(-r^2) and its Laplacian."""
    z = g.z_nodes()[:, None]
    r = g.r_nodes()[None, :]
    k = math.pi / g.length_mm
    f = np.sin(k * z) ** 2 * np.exp(-(r ** 2))
    d2z = 2.0 * k ** 2 * np.cos(2.0 * k * z) * np.exp(-(r ** 2))
    radial = np.sin(k * z) ** 2 * (4.0 * r ** 2 - 4.0) * np.exp(-(r ** 2))
    return f, d2z + radial


@pytest.mark.parametrize("nz,nr", [(21, 11), (41, 21), (81, 41)])
def test_laplacian_accuracy_improves(nz, nr):
    g = make_grid(nz=nz, nr=nr)
    f, exact = _smooth_case(g)
    err = np.abs(cylindrical_laplacian(f, g) - exact)[1:-1, :-1].max()
    assert err < 40.0 * max(g.dz, g.dr) ** 2


def test_laplacian_second_order_convergence():
    errs = []
    for nz, nr in [(41, 21), (81, 41), (161, 81)]:
        g = make_grid(nz=nz, nr=nr)
        f, exact = _smooth_case(g)
        errs.append(np.abs(cylindrical_laplacian(f, g) - exact)[1:-1, :-1].max())
    for coarse, fine in zip(errs, errs[1:]):
        ratio = coarse / fine
        assert 3.4 < ratio < 4.6


@given(st.floats(min_value=-5.0, max_value=5.0))
@settings(max_examples=20, deadline=None)
def test_laplacian_kills_constants(c):
    # zero up to roundoff of the 1 -+ dr/(2r) weights
    g = make_grid(nz=11, nr=7)
    lap = cylindrical_laplacian(np.full(g.shape, c), g)
    assert np.all(np.abs(lap) < 1e-12)


# --------------------------------------------------------------- quadrature

def test_radial_weights_sum_to_disc_area():
    g = make_grid()
    assert radial_weights(g).sum() == pytest.approx(math.pi, rel=1e-13)


def test_disc_integral_of_ones():
    g = make_grid(radius=1.5)
    area = disc_integral(np.ones(g.nr), g)
    assert area == pytest.approx(math.pi * 1.5 ** 2, rel=1e-13)


def test_volume_average_of_ones():
    g = make_grid()
    assert volume_average(np.ones(g.shape), g) == pytest.approx(1.0, rel=1e-13)


def test_volume_average_linear_in_z():
    g = make_grid()
    z = np.broadcast_to(g.z_nodes()[:, None], g.shape)
    assert volume_average(z, g) == pytest.approx(g.length_mm / 2.0, rel=1e-12)


def test_disc_integral_wrong_length_raises():
    g = make_grid()
    with pytest.raises(ValueError):
        disc_integral(np.ones(g.nr + 2), g)


# ---------------------------------------------------------------- wall flux

def test_wall_flux_analytic_parabola():
    # u = z(L-z) on L=2, R=1: normal derivative L at each disc, 0 on the
    # lateral face; outward flux = -2 * pi R^2 * L = -4 pi, and the one-sided
    # stencils are exact on quadratics
    g = make_grid(nz=51, nr=26, length=2.0, radius=1.0)
    z = g.z_nodes()[:, None]
    f = np.broadcast_to(z * (2.0 - z), g.shape)
    assert wall_flux_integral(f, g) == pytest.approx(-4.0 * math.pi, rel=1e-12)


def test_wall_flux_sign_for_decaying_field():
    g = make_grid()
    z = g.z_nodes()[:, None]
    r = g.r_nodes()[None, :]
    bump = np.sin(math.pi * z / g.length_mm) * np.cos(math.pi * r / 2.0)
    assert wall_flux_integral(bump, g) < 0.0


# ------------------------------------------------------------------- walls

def test_apply_boundary_depolarizing_pins_walls():
    g = make_grid(nz=7, nr=5)
    f = np.ones(g.shape)
    out = apply_boundary(f, WallMode.DEPOLARIZING)
    assert np.all(out[0, :] == 0.0)
    assert np.all(out[-1, :] == 0.0)
    assert np.all(out[:, -1] == 0.0)
    assert np.all(out[1:-1, :-1] == 1.0)
    assert np.all(f == 1.0)  # input untouched


def test_apply_boundary_nondepolarizing_mirrors():
    g = make_grid(nz=7, nr=5)
    rng = np.random.RandomState(3)
    f = rng.rand(*g.shape)
    out = apply_boundary(f, WallMode.NONDEPOLARIZING)
    np.testing.assert_array_equal(out[0, :-1], f[1, :-1])
    np.testing.assert_array_equal(out[-1, :-1], f[-2, :-1])
    np.testing.assert_array_equal(out[:, -1], out[:, -2])
    # corner picks up the diagonal interior neighbour
    assert out[0, -1] == f[1, -2]


def test_apply_boundary_leaves_axis_alone():
    g = make_grid(nz=7, nr=5)
    f = np.full(g.shape, 0.25)
    f[:, 0] = -1.0
    out = apply_boundary(f, WallMode.DEPOLARIZING)
    np.testing.assert_array_equal(out[1:-1, 0], -1.0)


@given(st.sampled_from([WallMode.DEPOLARIZING, WallMode.NONDEPOLARIZING]),
       st.integers(min_value=0, max_value=2 ** 31 - 1))
@settings(max_examples=25, deadline=None)
def test_apply_boundary_idempotent(mode, seed):
    rng = np.random.RandomState(seed)
    f = rng.rand(6, 5)
    once = apply_boundary(f, mode)
    twice = apply_boundary(once, mode)
    np.testing.assert_array_equal(once, twice)


def test_apply_boundary_rejects_unknown_mode():
    with pytest.raises(ValueError):
        apply_boundary(np.zeros((5, 5)), "reflective")


# ---------------------------------------------------------------- dataclass

def test_geometry_validation():
    with pytest.raises(ValueError):
        CellGeometry(length_mm=-1.0)
    with pytest.raises(ValueError):
        CellGeometry(beam_radius_mm=1.5, radius_mm=1.0)


def test_grid_from_geometry_spacings():
    g = Grid.from_geometry(CellGeometry(length_mm=2.0, radius_mm=1.0),
                           nz=101, nr=51)
    assert g.dz == pytest.approx(0.02)
    assert g.dr == pytest.approx(0.02)
    assert g.shape == (101, 51)
    assert g.length_mm == pytest.approx(2.0)
    assert g.radius_mm == pytest.approx(1.0)


def test_grid_minimum_size():
    with pytest.raises(ValueError):
        Grid(nz=2, nr=5, dz=0.1, dr=0.1)


# ---------------------------------------------------------------------- csv

def test_field_csv_round_trip(tmp_path):
    g = make_grid(nz=9, nr=6)
    rng = np.random.RandomState(11)
    f = rng.rand(*g.shape) * 1e-4
    path = tmp_path / "field.csv"
    field_to_csv(f, g, path)
    z, r, back = field_from_csv(path)
    np.testing.assert_allclose(z, g.z_nodes(), atol=1e-12)
    np.testing.assert_allclose(r, g.r_nodes(), atol=1e-12)
    np.testing.assert_allclose(back, f, rtol=1e-8)


def test_field_csv_is_deterministic(tmp_path):
    g = make_grid(nz=5, nr=4)
    f = np.linspace(0.0, 1.0, g.nz * g.nr).reshape(g.shape)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    field_to_csv(f, g, p1)
    field_to_csv(f, g, p2)
    assert p1.read_bytes() == p2.read_bytes()
