"""Axisymmetric cylindrical cell geometry and finite-difference grid.

Fields live on a node-centered (nz, nr) grid spanning z in [0, L] and
r in [0, R].  Index [i, j] maps to (z_i, r_j) = (i*dz, j*dr).  The r=0
column is the symmetry axis, never a wall; the walls are the two discs
z=0, z=L and the lateral face r=R.
"""

import enum
from dataclasses import dataclass

import numpy as np


class WallMode(str, enum.Enum):
    """Wall relaxation model: spins destroyed at the wall, or reflected."""

    DEPOLARIZING = "depolarizing"
    NONDEPOLARIZING = "nondepolarizing"


@dataclass(frozen=True)
class CellGeometry:
    """Cylindrical cell dimensions and illuminated beam radius (mm)."""

    length_mm: float = 2.0
    radius_mm: float = 1.0
    beam_radius_mm: float = 1.0

    def __post_init__(self):
        if not (self.length_mm > 0.0 and self.radius_mm > 0.0):
            raise ValueError("cell dimensions must be positive")
        if not (0.0 < self.beam_radius_mm <= self.radius_mm):
            raise ValueError("beam radius must satisfy 0 < r_L <= R")


@dataclass(frozen=True)
class Grid:
    """Uniform node-centered grid; spacings are derived, nodes include walls."""

    nz: int
    nr: int
    dz: float
    dr: float

    def __post_init__(self):
        if self.nz < 3 or self.nr < 3:
            raise ValueError("grid needs at least 3 nodes per direction")
        if not (self.dz > 0.0 and self.dr > 0.0):
            raise ValueError("grid spacings must be positive")

    @classmethod
    def from_geometry(cls, geometry, nz=101, nr=51):
        return cls(nz=int(nz), nr=int(nr),
                   dz=geometry.length_mm / (int(nz) - 1),
                   dr=geometry.radius_mm / (int(nr) - 1))

    @property
    def length_mm(self):
        return self.dz * (self.nz - 1)

    @property
    def radius_mm(self):
        return self.dr * (self.nr - 1)

    @property
    def shape(self):
        return (self.nz, self.nr)

    def z_nodes(self):
        return self.dz * np.arange(self.nz)

    def r_nodes(self):
        return self.dr * np.arange(self.nr)


def _check_field(field, grid):
    f = np.asarray(field, dtype=float)
    if f.shape != grid.shape:
        raise ValueError(f"field shape {f.shape} does not match grid {grid.shape}")
    return f


def cylindrical_laplacian(field, grid):
    """Second-order discrete Laplacian (1/r) d/dr(r d/dr) + d2/dz2.

    Interior nodes use the 5-point stencil with radial weights 1 -+ dr/(2r);
    the axis column uses the regularized stencil 4*(f(z,dr) - f(z,0))/dr^2
    from mirror symmetry.  Wall rows (z=0, z=L, r=R) are returned as 0 and
    belong to the caller's boundary handling.
    """
    f = _check_field(field, grid)
    out = np.zeros_like(f)
    inv_dz2 = 1.0 / grid.dz ** 2
    inv_dr2 = 1.0 / grid.dr ** 2
    a = 1.0 / (2.0 * np.arange(1, grid.nr - 1))
    out[1:-1, 1:-1] = (
        (f[:-2, 1:-1] - 2.0 * f[1:-1, 1:-1] + f[2:, 1:-1]) * inv_dz2
        + ((1.0 - a) * f[1:-1, :-2] - 2.0 * f[1:-1, 1:-1]
           + (1.0 + a) * f[1:-1, 2:]) * inv_dr2
    )
    out[1:-1, 0] = ((f[:-2, 0] - 2.0 * f[1:-1, 0] + f[2:, 0]) * inv_dz2
                    + 4.0 * (f[1:-1, 1] - f[1:-1, 0]) * inv_dr2)
    return out


def radial_weights(grid):
    """Trapezoid weights w_j for integrals over a disc, sum w_j f_j ~ int f 2 pi r dr."""
    r = grid.r_nodes()
    w = 2.0 * np.pi * r * grid.dr
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def disc_integral(values, grid):
    """Integrate a radial profile over the cell cross-section (2 pi r dr)."""
    v = np.asarray(values, dtype=float)
    if v.shape != (grid.nr,):
        raise ValueError("expected one value per radial node")
    return float(np.dot(radial_weights(grid), v))


def volume_average(field, grid):
    """Volume average over the cylinder by 2D trapezoid quadrature."""
    f = _check_field(field, grid)
    wz = np.full(grid.nz, grid.dz)
    wz[0] *= 0.5
    wz[-1] *= 0.5
    wr = radial_weights(grid)
    volume = np.pi * grid.radius_mm ** 2 * grid.length_mm
    return float(wz @ f @ wr / volume)


def wall_flux_integral(field, grid):
    """Outward flux integral of grad(field) over the three wall faces.

    Normal derivatives at the walls use second-order one-sided differences;
    the surface integrals use trapezoid quadrature.  Negative for a field
    that decays toward the walls.
    """
    f = _check_field(field, grid)
    ddz0 = (-3.0 * f[0, :] + 4.0 * f[1, :] - f[2, :]) / (2.0 * grid.dz)
    ddzl = (3.0 * f[-1, :] - 4.0 * f[-2, :] + f[-3, :]) / (2.0 * grid.dz)
    ddrr = (3.0 * f[:, -1] - 4.0 * f[:, -2] + f[:, -3]) / (2.0 * grid.dr)
    flux = disc_integral(-ddz0, grid) + disc_integral(ddzl, grid)
    wz = np.full(grid.nz, grid.dz)
    wz[0] *= 0.5
    wz[-1] *= 0.5
    flux += 2.0 * np.pi * grid.radius_mm * float(wz @ ddrr)
    return flux


def apply_boundary(field, mode):
    """Return a copy with wall values imposed for the given wall mode.

    Depolarizing walls pin the value to 0; nondepolarizing walls copy the
    adjacent interior node (discrete zero normal derivative), z faces first
    and then the lateral face, which leaves the corners mirrored diagonally.
    The axis column is interior (regularity, not a boundary condition) and
    is never assigned here.
    """
    f = np.array(field, dtype=float, copy=True)
    if f.ndim != 2 or f.shape[0] < 3 or f.shape[1] < 3:
        raise ValueError("field must be a (nz, nr) array with nz, nr >= 3")
    if mode is WallMode.DEPOLARIZING:
        f[0, :] = 0.0
        f[-1, :] = 0.0
        f[:, -1] = 0.0
    elif mode is WallMode.NONDEPOLARIZING:
        f[0, :] = f[1, :]
        f[-1, :] = f[-2, :]
        f[:, -1] = f[:, -2]
    else:
        raise ValueError(f"unknown wall mode: {mode!r}")
    return f


def field_to_csv(field, grid, path):
    """Write a field as CSV rows (z_mm, r_mm, value), z varying slowest."""
    f = _check_field(field, grid)
    z = grid.z_nodes()
    r = grid.r_nodes()
    with open(path, "w", newline="") as fh:
        fh.write("z_mm,r_mm,value\n")
        for i in range(grid.nz):
            zi = z[i]
            for j in range(grid.nr):
                fh.write(f"{zi:.9g},{r[j]:.9g},{f[i, j]:.9g}\n")


def field_from_csv(path):
    """Read a field CSV written by field_to_csv; returns (z, r, values)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    z = np.unique(data[:, 0])
    r = np.unique(data[:, 1])
    vals = data[:, 2].reshape(len(z), len(r))
    return z, r, vals
