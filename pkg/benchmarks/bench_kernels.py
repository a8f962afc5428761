"""Compare the compiled relaxation kernel against the numpy fallback.

Times a fixed-sweep kernel run on production-shaped fields, then a full
steady solve per backend, and checks that both backends produce bitwise
identical iterates (they execute the same updates in the same order).

Usage: python benchmarks/bench_kernels.py [--nz 101] [--nr 51] [--sweeps 2000]
"""

import argparse
import math
import time

import numpy as np

from pumpcell import kernels
from pumpcell.grid import CellGeometry, Grid, WallMode
from pumpcell.media import lineshape, medium_from_conditions
from pumpcell.solver import Scene, solve_steady


def kernel_inputs(nz, nr):
    """Fields with the dynamic range of the resonant depolarizing solve."""
    geo = CellGeometry(length_mm=2.0, radius_mm=1.0, beam_radius_mm=1.0)
    grid = Grid.from_geometry(geo, nz=nz, nr=nr)
    med = medium_from_conditions(temperature_k=423.15, n2_pressure_torr=200.0)
    alpha = med.g_i * lineshape(0.0, med)
    z = grid.z_nodes()[:, None]
    i0 = 0.5 / (math.pi * geo.radius_mm ** 2)
    rop = med.g_p * lineshape(0.0, med) * i0 * np.exp(-alpha * z)
    coeff = np.broadcast_to(rop + med.gamma_rel_s, grid.shape).copy()
    source = np.broadcast_to(rop, grid.shape).copy()
    return grid, med.d_mm2_s, coeff, source


def bench_kernel(backend, grid, diff, coeff, source, sweeps, repeats):
    kernels.set_backend(backend)
    best = math.inf
    u_last = None
    for _ in range(repeats):
        u = np.zeros(grid.shape)
        t0 = time.perf_counter()
        kernels.helmholtz_sor_solve(u, coeff, source, diff, grid.dz, grid.dr,
                                    True, True, 1.7, 0.0, sweeps)
        best = min(best, time.perf_counter() - t0)
        u_last = u
    return best, u_last


def bench_solve(backend):
    kernels.set_backend(backend)
    geo = CellGeometry(length_mm=2.0, radius_mm=1.0, beam_radius_mm=1.0)
    med = medium_from_conditions(temperature_k=423.15, n2_pressure_torr=200.0)
    sc = Scene(geometry=geo, medium=med, detuning_rad_s=0.0, power_mw=0.5,
               wall_mode=WallMode.DEPOLARIZING,
               grid=Grid.from_geometry(geo, nz=101, nr=51))
    t0 = time.perf_counter()
    sol = solve_steady(sc)
    dt = time.perf_counter() - t0
    assert sol.converged
    return dt, sol


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nz", type=int, default=101)
    ap.add_argument("--nr", type=int, default=51)
    ap.add_argument("--sweeps", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    backends = kernels.available_backends()
    print(f"available backends: {', '.join(backends)}")
    if "compiled" not in backends:
        print("compiled kernel missing; timing the fallback only")

    grid, diff, coeff, source = kernel_inputs(args.nz, args.nr)
    times, fields = {}, {}
    for backend in backends:
        dt, u = bench_kernel(backend, grid, diff, coeff, source,
                             args.sweeps, args.repeats)
        times[backend], fields[backend] = dt, u
        print(f"  kernel {backend:9s} {args.sweeps} sweeps @ "
              f"{args.nz}x{args.nr}: {dt * 1e3:8.1f} ms "
              f"({dt / args.sweeps * 1e6:6.1f} us/sweep)")
    if len(backends) == 2:
        print(f"  kernel speedup: {times['python'] / times['compiled']:.1f}x")
        same = np.array_equal(fields["python"], fields["compiled"])
        print(f"  iterates bitwise identical: {same}")

    solves = {}
    for backend in backends:
        dt, sol = bench_solve(backend)
        solves[backend] = (dt, sol)
        print(f"  full solve {backend:9s}: {dt:6.2f} s "
              f"({sol.inner_sweeps} sweeps)")
    if len(backends) == 2:
        dt_p, sol_p = solves["python"]
        dt_c, sol_c = solves["compiled"]
        print(f"  solve speedup: {dt_p / dt_c:.1f}x")
        same = (np.array_equal(sol_p.p_e, sol_c.p_e)
                and np.array_equal(sol_p.intensity, sol_c.intensity))
        print(f"  solutions bitwise identical: {same}")

    kernels.set_backend(backends[0])


if __name__ == "__main__":
    main()
