"""Projected (zero-clamping) Gauss-Seidel/SOR solver for the 2D stencil.

Each sweep visits interior nodes in row-major order and replaces ``p[i,j]`` by

    max((1 - omega) p[i,j] + omega (k1 pE + k2 pW + k3 pN + k4 pS - D) / K, 0)

The fixed point of this map is the discrete solution under cavitation
boundary conditions: the stencil equation holds where p > 0 and the clamped
candidate is nonpositive where p = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ._backend import get_kernels
from .core import ActiveSet, DimensionError, DomainError, PressureField, SingularSystemError
from .discretize import CoefficientGrid2D, Tridiag1D

DIRECT_SOLVE_LIMIT = 10_000


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-10
    max_iter: int = 100_000
    omega: float = 1.0
    record_history: bool = False
    per_node_clamp: bool = True

    def __post_init__(self):
        if not 0 < self.omega < 2:
            raise DomainError(f"omega must lie in (0, 2), got {self.omega}")
        if not self.tol > 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass
class SolveReport:
    iterations: int
    final_change: float
    converged: bool
    active_set_history: Optional[list] = field(default=None)


def _check_grid(coeffs: CoefficientGrid2D, p: PressureField):
    if p.grid != coeffs.grid:
        raise DimensionError("pressure field and coefficients live on different grids")


def pgs_sweep(
    coeffs: CoefficientGrid2D,
    p: PressureField,
    omega: float = 1.0,
    per_node_clamp: bool = True,
    backend: Optional[str] = None,
) -> PressureField:
    """One projected sweep; returns a new field, boundary ring untouched."""
    _check_grid(coeffs, p)
    values = np.array(p.values)
    get_kernels(backend).pgs_sweep_2d(
        coeffs.k1, coeffs.k2, coeffs.k3, coeffs.k4, coeffs.K, coeffs.D,
        values, float(omega), per_node_clamp,
    )
    return PressureField(p.grid, values)


def solve_projected(
    coeffs: CoefficientGrid2D,
    init: Optional[PressureField] = None,
    opts: Optional[SolveOptions] = None,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
    backend: Optional[str] = None,
) -> tuple[PressureField, ActiveSet, SolveReport]:
    """Sweep until the largest nodal change drops below ``opts.tol``.

    ``callback(iteration, values)`` is called after every sweep with a
    read-only view of the current iterate.  Running out of iterations is
    reported through ``SolveReport.converged``, not raised.
    """
    opts = opts or SolveOptions()
    grid = coeffs.grid
    init = init or PressureField.zeros(grid)
    _check_grid(coeffs, init)
    kern = get_kernels(backend)
    values = np.array(init.values)
    values[grid.boundary_mask()] = 0.0
    np.maximum(values, 0.0, out=values)
    history = [] if opts.record_history else None
    args = (coeffs.k1, coeffs.k2, coeffs.k3, coeffs.k4, coeffs.K, coeffs.D)

    change = np.inf
    it = 0
    while it < opts.max_iter:
        change = kern.pgs_sweep_2d(*args, values, opts.omega, opts.per_node_clamp)
        it += 1
        if history is not None:
            history.append(int(np.count_nonzero(values > 0)))
        if callback is not None:
            view = values.view()
            view.setflags(write=False)
            callback(it, view)
        if change < opts.tol:
            break
    field_ = PressureField(grid, values)
    report = SolveReport(it, float(change), bool(change < opts.tol), history)
    return field_, field_.active_set(), report


def _candidate_2d(coeffs: CoefficientGrid2D, v: np.ndarray):
    """Return (stencil action k.neighbours - D, K) on the interior block."""
    c = coeffs
    inner = (slice(1, -1), slice(1, -1))
    nb = (c.k1[inner] * v[2:, 1:-1] + c.k2[inner] * v[:-2, 1:-1]
          + c.k3[inner] * v[1:-1, 2:] + c.k4[inner] * v[1:-1, :-2])
    return nb - c.D[inner], c.K[inner], v[inner]


def _candidate_1d(tri: Tridiag1D, v: np.ndarray):
    A, B = tri.A[1:-1], tri.B[1:-1]
    nb = A * v[:-2] + B * v[2:]
    return nb - tri.C[1:-1], A + B, v[1:-1]


def complementarity_residual(
    coeffs: Union[CoefficientGrid2D, Tridiag1D], p: PressureField
) -> tuple[float, float]:
    """Return ``(eq_residual, slack_violation)``.

    ``eq_residual`` is the largest stencil residual over nodes with p > 0;
    ``slack_violation`` is the largest positive clamped candidate over
    interior nodes with p = 0.  Both vanish at the exact fixed point.
    Accepts 2D stencils or 1D tridiagonal systems.
    """
    if p.grid != coeffs.grid:
        raise DimensionError("pressure field and coefficients live on different grids")
    if isinstance(coeffs, Tridiag1D):
        act, K, pin = _candidate_1d(coeffs, p.values)
    else:
        act, K, pin = _candidate_2d(coeffs, p.values)
    pos = pin > 0
    eq = np.abs(act[pos] - K[pos] * pin[pos])
    slack = np.maximum(act[~pos] / K[~pos], 0.0)
    return (float(eq.max()) if eq.size else 0.0, float(slack.max()) if slack.size else 0.0)


def assemble_operator(coeffs: Union[CoefficientGrid2D, Tridiag1D]) -> tuple[sp.csr_matrix, np.ndarray, np.ndarray]:
    """Sparse matrix of the stencil over interior nodes.

    Returns ``(M, rhs, flat_index)`` where ``M p = rhs`` is the interior
    system (diagonal ``-K``) and ``flat_index`` maps interior rows to
    row-major node indices.
    """
    grid = coeffs.grid
    interior = ~grid.boundary_mask()
    flat = np.flatnonzero(interior.ravel())
    pos = -np.ones(grid.size, dtype=np.int64)
    pos[flat] = np.arange(flat.size)
    rows, cols, vals = [np.arange(flat.size)], [np.arange(flat.size)], []
    if isinstance(coeffs, Tridiag1D):
        vals.append(-(coeffs.A + coeffs.B)[flat])
        neighbours = ((coeffs.A, -1), (coeffs.B, 1))
        rhs = coeffs.C[flat]
    else:
        ny = grid.ny
        vals.append(-coeffs.K.ravel()[flat])
        neighbours = ((coeffs.k1, ny), (coeffs.k2, -ny), (coeffs.k3, 1), (coeffs.k4, -1))
        rhs = coeffs.D.ravel()[flat]
    for weight, offset in neighbours:
        target = pos[flat + offset]
        keep = target >= 0
        rows.append(np.arange(flat.size)[keep])
        cols.append(target[keep])
        vals.append(weight.ravel()[flat][keep])
    M = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(flat.size, flat.size),
    )
    return M, rhs, flat


def solve_on_active_set(
    coeffs: Union[CoefficientGrid2D, Tridiag1D], active: ActiveSet
) -> PressureField:
    """Enforce the stencil equation on active nodes and p = 0 elsewhere.

    The result is not clamped; negative entries mean ``active`` does not
    carry a positive solution.
    """
    grid = coeffs.grid
    if active.grid != grid:
        raise DimensionError("active set and coefficients live on different grids")
    values = np.zeros(grid.size)
    idx = np.flatnonzero(active.mask.ravel())
    if idx.size == 0:
        return PressureField(grid, values.reshape(grid.shape))
    M, rhs, flat = assemble_operator(coeffs)
    pos = np.searchsorted(flat, idx)
    sub = M[pos][:, pos].tocsc()
    b = rhs[pos]
    if idx.size <= DIRECT_SOLVE_LIMIT:
        try:
            lu = spla.splu(sub)
        except RuntimeError as exc:  # exactly singular
            raise SingularSystemError(str(exc)) from exc
        x = lu.solve(b)
        # one step of iterative refinement
        x += lu.solve(b - sub @ x)
    else:
        x, info = spla.bicgstab(sub, b, rtol=1e-14, maxiter=20 * idx.size)
        if info != 0:
            raise SingularSystemError(f"iterative active-set solve failed (info={info})")
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("active-set subsystem is singular")
    values[idx] = x
    return PressureField(grid, values.reshape(grid.shape))
