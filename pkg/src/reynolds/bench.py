"""Timing of the segment-expansion solver against projected SOR."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Callable, Optional

from .core import Grid1D
from .discretize import Tridiag1D
from .fast1d import solve_fast_1d, solve_sor_1d
from .solver2d import SolveOptions, complementarity_residual

MIN_BENCH_NODES = 64
# SOR must reach at least this residual even when fast1d sits at rounding level
RESIDUAL_FLOOR = 1e-9


def median_time(fn: Callable[[], object], repeats: int = 5) -> tuple[float, object]:
    """Median wall time of ``repeats`` calls after one discarded warmup call."""
    result = fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def residual(tri: Tridiag1D, p) -> float:
    return max(complementarity_residual(tri, p))


@dataclass
class BenchRow:
    N: int
    t_fast: float
    t_sor: float
    residual_fast: float
    residual_sor: float
    sor_iterations: int = 0
    sor_converged: bool = True

    @property
    def speedup(self) -> float:
        return self.t_sor / self.t_fast


def time_fast(tri: Tridiag1D, repeats: int = 5, backend: Optional[str] = None) -> tuple[float, float]:
    t, (p, _) = median_time(lambda: solve_fast_1d(tri, backend=backend), repeats)
    return t, residual(tri, p)


def time_sor_matched(
    tri: Tridiag1D,
    target: float,
    omega: float = 1.9,
    repeats: int = 5,
    max_iter: int = 2_000_000,
    backend: Optional[str] = None,
) -> tuple[float, float, int, bool]:
    """Time projected SOR at the loosest change tolerance whose residual meets ``target``.

    The tolerance starts at ``target / max(K)`` and tightens by 10x until the
    complementarity residual is at or below ``target``; only the final setting
    is timed.
    """
    K_max = float((tri.A + tri.B).max())
    tol = target / K_max
    while True:
        opts = SolveOptions(tol=tol, omega=omega, max_iter=max_iter)
        p, rep = solve_sor_1d(tri, opts, backend=backend)
        res = residual(tri, p)
        if res <= target or tol < 1e-300 or not rep.converged:
            break
        tol /= 10
    t, (p, rep) = median_time(lambda: solve_sor_1d(tri, opts, backend=backend), repeats)
    return t, residual(tri, p), rep.iterations, rep.converged


def run_benchmark(build: Callable[[Grid1D], Tridiag1D], sizes, dx: float, repeats: int = 5,
                  omega: float = 1.9, max_iter: int = 2_000_000, backend: Optional[str] = None,
                  sor: bool = True, log: Optional[Callable[[str], None]] = None) -> list:
    rows = []
    for N in sizes:
        if N < MIN_BENCH_NODES:
            raise ValueError(f"benchmark sizes must be >= {MIN_BENCH_NODES} nodes, got {N}")
        tri = build(Grid1D(int(N), 0.0, dx))
        t_fast, r_fast = time_fast(tri, repeats, backend)
        if sor:
            t_sor, r_sor, iters, conv = time_sor_matched(
                tri, max(r_fast, RESIDUAL_FLOOR), omega, repeats, max_iter, backend)
        else:
            t_sor, r_sor, iters, conv = float("nan"), float("nan"), 0, False
        row = BenchRow(int(N), t_fast, t_sor, r_fast, r_sor, iters, conv)
        rows.append(row)
        if log:
            log(f"N={N}: fast {t_fast:.4g}s, sor {t_sor:.4g}s ({iters} sweeps), speedup {row.speedup:.3g}")
    return rows


def format_rows(rows) -> str:
    lines = ["N,t_fast,t_sor,speedup,residual_fast,residual_sor"]
    for r in rows:
        lines.append(f"{r.N},{r.t_fast!r},{r.t_sor!r},{r.speedup!r},{r.residual_fast!r},{r.residual_sor!r}")
    return "\n".join(lines) + "\n"
