"""Brute-force verification on small grids.

``enumerate_active_sets`` solves the stencil system on every subset of
interior nodes with dense linear algebra, independently of the iterative
solvers, and classifies each subset:

* a member of the positive-solution family when the constrained solution is
  nonnegative (``>= -NONNEG_TOL``);
* a complementarity fixed point when, in addition, it is strictly positive
  on the subset and the clamped update candidate is ``<= SLACK_TOL`` on every
  other interior node.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .core import ActiveSet, DomainError, Grid1D, Grid2D, PressureField, ReynoldsError, is_subset
from .discretize import CoefficientFields, CoefficientGrid2D, Tridiag1D, build_stencil_2d, build_tridiagonal_1d
from .solver2d import assemble_operator, solve_on_active_set

NONNEG_TOL = 1e-12
SLACK_TOL = 1e-10
CLOSURE_TOL = 1e-10
DEFAULT_LIMIT = 16

Coefficients = Union[CoefficientGrid2D, Tridiag1D]


class OracleCapacityError(ReynoldsError):
    pass


class UniquenessError(ReynoldsError):
    pass


@dataclass
class OracleResult:
    fixed_point_sets: list
    solutions: list
    positive_solution_family: list
    family_solutions: list = field(repr=False, default_factory=list)
    subsets_checked: int = 0

    @property
    def fixed_point(self) -> ActiveSet:
        if len(self.fixed_point_sets) != 1:
            raise UniquenessError(f"{len(self.fixed_point_sets)} fixed points")
        return self.fixed_point_sets[0]

    @property
    def solution(self) -> PressureField:
        self.fixed_point
        return self.solutions[0]

    def family_union(self) -> ActiveSet:
        grid = self.fixed_point_sets[0].grid if self.fixed_point_sets else self.positive_solution_family[0].grid
        mask = np.zeros(grid.shape, dtype=bool)
        for s in self.positive_solution_family:
            mask |= s.mask
        return ActiveSet(grid, mask)


def _dense_system(coeffs: Coefficients):
    M, rhs, flat = assemble_operator(coeffs)
    M = M.toarray()
    K = -np.diag(M).copy()
    off = M + np.diag(K)
    return M, off, K, rhs, flat


def _subset_order(n: int):
    for k in range(n + 1):
        yield k, list(itertools.combinations(range(n), k))


def enumerate_active_sets(
    coeffs: Coefficients, limit: int = DEFAULT_LIMIT, require_unique: bool = True
) -> OracleResult:
    """Classify every subset of interior nodes, ordered by size then lexicographically."""
    grid = coeffs.grid
    M, off, K, rhs, flat = _dense_system(coeffs)
    n = rhs.size
    if n > limit:
        raise OracleCapacityError(f"{n} interior nodes exceeds the enumeration limit {limit}")

    result = OracleResult([], [], [])
    for k, combos in _subset_order(n):
        if not combos:
            continue
        idx = np.array(combos, dtype=np.int64).reshape(len(combos), k)
        X = np.zeros((len(combos), n))
        ok = np.ones(len(combos), dtype=bool)
        if k:
            sub = M[idx[:, :, None], idx[:, None, :]]
            b = rhs[idx]
            try:
                X_sub = np.linalg.solve(sub, b[..., None])[..., 0]
            except np.linalg.LinAlgError:
                X_sub = np.zeros_like(b)
                for r in range(len(combos)):
                    try:
                        X_sub[r] = np.linalg.solve(sub[r], b[r])
                    except np.linalg.LinAlgError:
                        ok[r] = False
            ok &= np.all(np.isfinite(X_sub), axis=1)
            np.put_along_axis(X, idx, np.where(np.isfinite(X_sub), X_sub, 0.0), axis=1)
        active = np.zeros((len(combos), n), dtype=bool)
        if k:
            np.put_along_axis(active, idx, True, axis=1)
        nonneg = ok & np.all(X >= -NONNEG_TOL, axis=1)
        cand = (X @ off.T - rhs) / K
        slack_ok = np.all(np.where(active, True, cand <= SLACK_TOL), axis=1)
        positive = np.all(np.where(active, X > 0, True), axis=1)
        fixed = nonneg & slack_ok & positive
        for r in np.flatnonzero(nonneg):
            aset, pfield = _to_grid(grid, flat, active[r], X[r])
            result.positive_solution_family.append(aset)
            result.family_solutions.append(pfield)
            if fixed[r]:
                result.fixed_point_sets.append(aset)
                result.solutions.append(pfield)
        result.subsets_checked += len(combos)
    if require_unique and len(result.fixed_point_sets) != 1:
        raise UniquenessError(f"found {len(result.fixed_point_sets)} complementarity fixed points")
    return result


def _to_grid(grid, flat, active_row, x_row):
    mask = np.zeros(grid.size, dtype=bool)
    mask[flat] = active_row
    values = np.zeros(grid.size)
    values[flat] = x_row
    return ActiveSet(grid, mask.reshape(grid.shape)), PressureField(grid, values.reshape(grid.shape))


def _source(coeffs: Coefficients) -> np.ndarray:
    return coeffs.C if isinstance(coeffs, Tridiag1D) else coeffs.D


def check_discrete_hopf(coeffs: Coefficients, hot_node) -> bool:
    """Full-interior solve with a single negative source must be positive everywhere inside."""
    D = _source(coeffs)
    interior = ~coeffs.grid.boundary_mask()
    hot = np.zeros(coeffs.grid.shape, dtype=bool)
    hot[hot_node] = True
    if not interior[hot_node]:
        raise DomainError("hot node must be an interior node")
    if not (D[hot_node] < 0 and np.all(D[interior & ~hot] == 0)):
        raise DomainError("need D < 0 at the hot node and D = 0 at every other interior node")
    p = solve_on_active_set(coeffs, ActiveSet.full(coeffs.grid))
    return bool(np.all(p.values[interior] > 0))


def check_union_closure(coeffs: Coefficients, a: ActiveSet, b: ActiveSet) -> bool:
    """Whether the solution on ``a | b`` dominates both constrained solutions."""
    pa = solve_on_active_set(coeffs, a).values
    pb = solve_on_active_set(coeffs, b).values
    if np.any(pa < -NONNEG_TOL) or np.any(pb < -NONNEG_TOL):
        raise DomainError("both active sets must carry nonnegative solutions")
    pab = solve_on_active_set(coeffs, a | b).values
    return bool(np.all(pab >= np.maximum(pa, pb) - CLOSURE_TOL))


def check_maximality(result: OracleResult) -> bool:
    """Whether the unique fixed point is the greatest element of the positive-solution family."""
    if len(result.fixed_point_sets) != 1:
        return False
    top = result.fixed_point_sets[0]
    members = result.positive_solution_family
    return any(top == s for s in members) and all(is_subset(s, top) for s in members)


def random_problem_1d(rng: np.random.Generator, n_interior: int, negative_fraction: float = 0.5) -> Tridiag1D:
    """Random positive diffusivities and a sign-changing source on a 1D grid."""
    grid = Grid1D(n_interior + 2, 0.0, 1.0)
    f1 = rng.uniform(0.5, 2.0, size=grid.n_nodes - 1)
    f3 = np.where(rng.random(grid.n_nodes) < negative_fraction, -1.0, 1.0) * rng.uniform(0.1, 1.0, grid.n_nodes)
    return build_tridiagonal_1d(CoefficientFields(f1, f3), grid)


def random_problem_2d(
    rng: np.random.Generator, nx_interior: int, ny_interior: int, negative_fraction: float = 0.5
) -> CoefficientGrid2D:
    grid = Grid2D(nx_interior + 2, ny_interior + 2)
    f1 = rng.uniform(0.5, 2.0, size=(grid.nx - 1, grid.ny))
    f2 = rng.uniform(0.5, 2.0, size=(grid.nx, grid.ny - 1))
    f3 = np.where(rng.random(grid.shape) < negative_fraction, -1.0, 1.0) * rng.uniform(0.1, 1.0, grid.shape)
    return build_stencil_2d(CoefficientFields(f1, f3, f2), grid)


def random_problem(rng: np.random.Generator, max_interior: int = DEFAULT_LIMIT) -> Coefficients:
    """A 1D or 2D problem with at most ``max_interior`` interior nodes."""
    if rng.random() < 0.5:
        return random_problem_1d(rng, int(rng.integers(3, max_interior + 1)))
    shapes = [(a, b) for a in range(1, 5) for b in range(1, 5) if 2 <= a * b <= max_interior]
    a, b = shapes[int(rng.integers(len(shapes)))]
    return random_problem_2d(rng, a, b)
