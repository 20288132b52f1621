"""Command-line front end: ``reynolds solve|bench|verify <config.toml>``.

Exit status: 0 on success/convergence, 1 on input errors, 2 when a solver
fails to converge (``solve``) or a property check fails (``verify``).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .config import ConfigError, ProblemConfig, load_config
from .core import PressureField, ReynoldsError
from .discretize import CoefficientGrid2D, Tridiag1D, strip_from_tridiagonal
from .fast1d import FastSolveStats, solve_fast_1d, solve_sor_1d
from .oracle import (
    check_discrete_hopf,
    check_maximality,
    check_union_closure,
    enumerate_active_sets,
    random_problem,
)
from .solver2d import SolveOptions, complementarity_residual, solve_projected

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED = 0, 1, 2


def write_pressure_csv(path: Path, field: PressureField) -> None:
    grid = field.grid
    active = field.active_set().mask
    lines = []
    if grid.ndim == 1:
        lines.append("index_i,x,p,active")
        for i, (x, p, a) in enumerate(zip(grid.x.tolist(), field.values.tolist(), active.tolist())):
            lines.append(f"{i},{x!r},{p!r},{str(a).lower()}")
    else:
        lines.append("index_i,index_j,x,y,p,active")
        xs, ys = grid.x.tolist(), grid.y.tolist()
        values, flags = field.values.tolist(), active.tolist()
        for i in range(grid.nx):
            for j in range(grid.ny):
                lines.append(f"{i},{j},{xs[i]!r},{ys[j]!r},{values[i][j]!r},{str(flags[i][j]).lower()}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def _solve(cfg: ProblemConfig):
    """Run the configured solver; returns (field, converged, iterations, extra summary lines)."""
    coeffs = cfg.build()
    extra = []
    if cfg.solver == "fast1d":
        stats = FastSolveStats()
        field, segs = solve_fast_1d(coeffs, backend=cfg.backend, stats=stats)
        extra += [f"segments: {len(segs)}", f"segment_moves: {stats.moves}", f"boundary_tests: {stats.tests}"]
        return coeffs, field, True, 0, extra
    if cfg.solver == "sor1d":
        field, rep = solve_sor_1d(coeffs, cfg.options, backend=cfg.backend)
        extra.append(f"final_change: {rep.final_change!r}")
        return coeffs, field, rep.converged, rep.iterations, extra
    if cfg.solver == "oracle":
        result = enumerate_active_sets(coeffs)
        extra.append(f"subsets_checked: {result.subsets_checked}")
        extra.append(f"positive_family_size: {len(result.positive_solution_family)}")
        return coeffs, result.solution, True, 0, extra
    stencil = strip_from_tridiagonal(coeffs) if isinstance(coeffs, Tridiag1D) else coeffs
    field, _, rep = solve_projected(stencil, opts=cfg.options, backend=cfg.backend)
    if isinstance(coeffs, Tridiag1D):
        field = PressureField(coeffs.grid, field.values[:, 1])
    extra.append(f"final_change: {rep.final_change!r}")
    return coeffs, field, rep.converged, rep.iterations, extra


def cmd_solve(cfg: ProblemConfig) -> int:
    t0 = time.perf_counter()
    coeffs, field, converged, iterations, extra = _solve(cfg)
    elapsed = time.perf_counter() - t0
    eq, slack = complementarity_residual(coeffs, field)
    pressure_path = cfg.output_path("pressure", "pressure.csv")
    write_pressure_csv(pressure_path, field)
    summary = [
        f"solver: {cfg.solver}",
        f"converged: {str(converged).lower()}",
        f"iterations: {iterations}",
        f"eq_residual: {eq!r}",
        f"slack_violation: {slack!r}",
        f"active_nodes: {field.active_set().count}",
        f"max_pressure: {float(field.values.max())!r}",
        f"wall_time_s: {elapsed:.6f}",
        *extra,
    ]
    summary_path = cfg.output_path("summary", "summary.txt")
    summary_path.write_text("\n".join(summary) + "\n")
    print(f"wrote {pressure_path} and {summary_path}")
    if not converged:
        print("solver did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_bench(cfg: ProblemConfig) -> int:
    if cfg.dimension != 1:
        raise ConfigError("bench needs a 1D problem", path=cfg.path)
    spec = cfg.bench
    if spec is None:
        raise ConfigError("bench needs a [bench] section listing sizes", path=cfg.path)
    small = [n for n in spec.sizes if n < bench_mod.MIN_BENCH_NODES]
    if small:
        raise ConfigError(f"bench sizes below {bench_mod.MIN_BENCH_NODES} nodes are too noisy to time: {small}",
                          path=cfg.path)
    rows = bench_mod.run_benchmark(
        cfg.build, spec.sizes, spec.dx, spec.repeats, spec.omega, spec.max_iter,
        backend=cfg.backend, log=print,
    )
    out = cfg.output_path("bench", "bench.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(bench_mod.format_rows(rows))
    print(f"wrote {out}")
    return EXIT_OK


def _verify_one(coeffs, rng, label, report) -> None:
    result = enumerate_active_sets(coeffs, require_unique=False)
    report(f"{label}: unique fixed point", len(result.fixed_point_sets) == 1)
    if len(result.fixed_point_sets) != 1:
        return
    report(f"{label}: fixed point is greatest element", check_maximality(result))
    report(f"{label}: fixed point equals union of positive family", result.family_union() == result.fixed_point)
    stencil = strip_from_tridiagonal(coeffs) if isinstance(coeffs, Tridiag1D) else coeffs
    p, _, rep = solve_projected(stencil, opts=SolveOptions(tol=1e-13, max_iter=1_000_000))
    values = p.values[:, 1] if isinstance(coeffs, Tridiag1D) else p.values
    report(f"{label}: projected solver matches oracle",
           rep.converged and np.abs(values - result.solution.values).max() <= 1e-9)
    if isinstance(coeffs, Tridiag1D):
        pf, _ = solve_fast_1d(coeffs)
        report(f"{label}: fast1d matches oracle", np.abs(pf.values - result.solution.values).max() <= 1e-9)
    fam = result.positive_solution_family
    pairs = [(fam[int(rng.integers(len(fam)))], fam[int(rng.integers(len(fam)))]) for _ in range(10)]
    report(f"{label}: union closure on sampled pairs", all(check_union_closure(coeffs, a, b) for a, b in pairs))


def _hopf_problem(coeffs, rng):
    interior = np.argwhere(~coeffs.grid.boundary_mask())
    hot = tuple(int(v) for v in interior[int(rng.integers(len(interior)))])
    src = np.zeros(coeffs.grid.shape)
    src[hot] = -float(rng.uniform(0.1, 4.0))
    if isinstance(coeffs, Tridiag1D):
        return Tridiag1D(coeffs.grid, coeffs.A, coeffs.B, src), hot
    return CoefficientGrid2D(coeffs.grid, coeffs.k1, coeffs.k2, coeffs.k3, coeffs.k4, src), hot


def cmd_verify(cfg: ProblemConfig) -> int:
    seed = int(os.environ.get("REYNOLDS_SEED", "0"))
    rng = np.random.default_rng(seed)
    n_random = int(cfg.verify.get("problems", 20))
    max_interior = int(cfg.verify.get("max_interior", 12))
    failures = 0

    def report(name, ok):
        nonlocal failures
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}")

    coeffs = cfg.build()
    n_interior = int((~coeffs.grid.boundary_mask()).sum())
    if n_interior <= 16:
        _verify_one(coeffs, rng, "config problem", report)
    else:
        print(f"SKIP  config problem ({n_interior} interior nodes > 16)")
    print(f"random problems: {n_random}, seed {seed}")
    for k in range(n_random):
        prob = random_problem(rng, max_interior)
        _verify_one(prob, rng, f"random #{k}", report)
        hopf, hot = _hopf_problem(prob, rng)
        report(f"random #{k}: discrete Hopf at {hot}", check_discrete_hopf(hopf, hot))
    print(f"{failures} failure(s)")
    return EXIT_OK if failures == 0 else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reynolds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("solve", "solve a problem and write pressure CSV + summary"),
                       ("bench", "time fast1d against projected SOR"),
                       ("verify", "run the brute-force oracle and property checks")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", type=Path)
        p.add_argument("--tol", type=float)
        p.add_argument("--omega", type=float)
        p.add_argument("--max-iter", dest="max_iter", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"tol": args.tol, "omega": args.omega, "max_iter": args.max_iter}
    try:
        cfg = load_config(args.config, overrides)
        return {"solve": cmd_solve, "bench": cmd_bench, "verify": cmd_verify}[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ReynoldsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
