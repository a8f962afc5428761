# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled red-black SOR relaxation for the axisymmetric Helmholtz solve.

Twin of _sor_py.helmholtz_sor_solve (same signature, same discrete system,
same sweep ordering); see that module for the full contract.
"""

import numpy as np


cdef void _apply_walls(double[:, ::1] u, bint dirichlet_z, bint dirichlet_r):
    cdef Py_ssize_t nz = u.shape[0]
    cdef Py_ssize_t nr = u.shape[1]
    cdef Py_ssize_t i, j
    if dirichlet_z:
        for j in range(nr):
            u[0, j] = 0.0
            u[nz - 1, j] = 0.0
    else:
        for j in range(nr):
            u[0, j] = u[1, j]
            u[nz - 1, j] = u[nz - 2, j]
    if dirichlet_r:
        for i in range(nz):
            u[i, nr - 1] = 0.0
    else:
        for i in range(nz):
            u[i, nr - 1] = u[i, nr - 2]


cdef double _residual(double[:, ::1] u, double[:, ::1] coeff,
                      double[:, ::1] source, double diff,
                      double inv_dz2, double inv_dr2,
                      double[::1] w_in, double[::1] w_out,
                      double diag0, double diag0_ax):
    cdef Py_ssize_t nz = u.shape[0]
    cdef Py_ssize_t nr = u.shape[1]
    cdef Py_ssize_t i, j
    cdef double res = 0.0
    cdef double num, r
    for i in range(1, nz - 1):
        num = (diff * ((u[i - 1, 0] + u[i + 1, 0]) * inv_dz2
                       + 4.0 * inv_dr2 * u[i, 1])
               + source[i, 0])
        r = num - (diag0_ax + coeff[i, 0]) * u[i, 0]
        if r < 0.0:
            r = -r
        if r > res:
            res = r
        for j in range(1, nr - 1):
            num = (diff * ((u[i - 1, j] + u[i + 1, j]) * inv_dz2
                           + u[i, j - 1] * w_in[j] + u[i, j + 1] * w_out[j])
                   + source[i, j])
            r = num - (diag0 + coeff[i, j]) * u[i, j]
            if r < 0.0:
                r = -r
            if r > res:
                res = r
    return res


def helmholtz_sor_solve(double[:, ::1] u, double[:, ::1] coeff,
                        double[:, ::1] source, double diff, double dz,
                        double dr, bint dirichlet_z, bint dirichlet_r,
                        double omega, double tol_abs, long max_sweeps,
                        double clip_max=-1.0, long check_every=8):
    """Relax diff * Lap_cyl(u) - coeff * u + source = 0 in place; returns
    (residual, sweeps).  See _sor_py.helmholtz_sor_solve."""
    cdef Py_ssize_t nz = u.shape[0]
    cdef Py_ssize_t nr = u.shape[1]
    cdef double inv_dz2 = 1.0 / (dz * dz)
    cdef double inv_dr2 = 1.0 / (dr * dr)
    cdef double diag0 = diff * (2.0 * inv_dz2 + 2.0 * inv_dr2)
    cdef double diag0_ax = diff * (2.0 * inv_dz2 + 4.0 * inv_dr2)
    cdef long sweep
    cdef int color
    cdef Py_ssize_t i, j, j0
    cdef double num, cand, res

    if check_every < 1:
        check_every = 1
    w_in_arr = np.zeros(nr)
    w_out_arr = np.zeros(nr)
    for j in range(1, nr - 1):
        w_in_arr[j] = (1.0 - 0.5 / j) * inv_dr2
        w_out_arr[j] = (1.0 + 0.5 / j) * inv_dr2
    cdef double[::1] w_in = w_in_arr
    cdef double[::1] w_out = w_out_arr

    _apply_walls(u, dirichlet_z, dirichlet_r)
    res = _residual(u, coeff, source, diff, inv_dz2, inv_dr2, w_in, w_out,
                    diag0, diag0_ax)
    if res <= tol_abs:
        return res, 0

    for sweep in range(1, max_sweeps + 1):
        for color in range(2):
            for i in range(1, nz - 1):
                if i % 2 == color:
                    num = (diff * ((u[i - 1, 0] + u[i + 1, 0]) * inv_dz2
                                   + 4.0 * inv_dr2 * u[i, 1])
                           + source[i, 0])
                    cand = num / (diag0_ax + coeff[i, 0])
                    u[i, 0] = u[i, 0] + omega * (cand - u[i, 0])
                j0 = 1 if (i + 1) % 2 == color else 2
                for j in range(j0, nr - 1, 2):
                    num = (diff * ((u[i - 1, j] + u[i + 1, j]) * inv_dz2
                                   + u[i, j - 1] * w_in[j]
                                   + u[i, j + 1] * w_out[j])
                           + source[i, j])
                    cand = num / (diag0 + coeff[i, j])
                    u[i, j] = u[i, j] + omega * (cand - u[i, j])
        _apply_walls(u, dirichlet_z, dirichlet_r)
        if clip_max > 0.0:
            for i in range(nz):
                for j in range(nr):
                    if u[i, j] < 0.0:
                        u[i, j] = 0.0
                    elif u[i, j] > clip_max:
                        u[i, j] = clip_max
        if sweep % check_every == 0 or sweep == max_sweeps:
            res = _residual(u, coeff, source, diff, inv_dz2, inv_dr2,
                            w_in, w_out, diag0, diag0_ax)
            if res <= tol_abs:
                return res, sweep
    return res, max_sweeps
