"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_backends.py [--sizes 2000 20000] [--repeats 5]

Times ``solve_fast_1d``, one projected 2D sweep and a fixed number of 1D SOR
sweeps on each backend and prints a CSV table to stdout.
"""

from __future__ import annotations

import argparse

import numpy as np

from reynolds._backend import available_backends
from reynolds.bench import median_time
from reynolds.core import Grid1D, Grid2D, PressureField
from reynolds.discretize import CoefficientFields, build_stencil_2d, build_tridiagonal_1d
from reynolds.fast1d import solve_fast_1d, solve_sor_1d
from reynolds.solver2d import SolveOptions, pgs_sweep


def textured_1d(n, dx=0.005):
    grid = Grid1D(n, 0.0, dx)
    return build_tridiagonal_1d(CoefficientFields.from_nodal(grid, 1.0, 0.3 + np.cos(2 * np.pi * grid.x)), grid)


def textured_2d(n):
    side = max(3, int(np.sqrt(n)))
    grid = Grid2D.from_extent((0, 1), (0, 1), side, side)
    X, _ = grid.mesh()
    return build_stencil_2d(CoefficientFields.from_nodal(grid, 1.0, 0.2 + np.cos(4 * np.pi * X)), grid)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[2_000, 20_000])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--sor-sweeps", type=int, default=50)
    args = parser.parse_args(argv)

    backends = available_backends()
    if len(backends) < 2:
        print("# compiled backend not built; only timing", backends[0])
    print("kernel,N,backend,seconds,speedup_vs_python")
    for n in args.sizes:
        tri = textured_1d(n)
        stencil = textured_2d(n)
        zero2d = PressureField.zeros(stencil.grid)
        sor_opts = SolveOptions(tol=1e-300, max_iter=args.sor_sweeps, omega=1.9)
        cases = {
            "fast1d": lambda b: solve_fast_1d(tri, backend=b),
            "sor1d": lambda b: solve_sor_1d(tri, sor_opts, backend=b),
            "pgs_sweep_2d": lambda b: pgs_sweep(stencil, zero2d, 1.0, backend=b),
        }
        for name, run in cases.items():
            times = {b: median_time(lambda: run(b), args.repeats)[0] for b in backends}
            for b, t in times.items():
                print(f"{name},{n},{b},{t:.6g},{times.get('python', np.nan) / t:.3g}")


if __name__ == "__main__":
    main()
