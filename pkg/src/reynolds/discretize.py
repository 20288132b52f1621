"""Coefficient builders for the lubrication equation

    d/dx(f1 dp/dx) + d/dy(f2 dp/dy) = f3,     f1, f2 >= 0

and its five-point (2D) and three-point (1D) finite-difference stencils.

Sign convention for every stencil in the package: off-diagonal weights are
nonnegative, the diagonal is minus their sum, and the right-hand side is f3.
At an interior node this reads

    k1*p[i+1,j] + k2*p[i-1,j] + k3*p[i,j+1] + k4*p[i,j-1] - K*p[i,j] = D
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import DimensionError, DomainError, Grid1D, Grid2D, SingularStencilError


@dataclass(frozen=True, eq=False)
class PhysicalFields:
    """Nodal lubrication inputs.  Velocities may be scalars or nodal arrays."""

    h: np.ndarray
    rho: np.ndarray
    eta: np.ndarray
    Vx: Union[float, np.ndarray] = 0.0
    Vy: Union[float, np.ndarray] = 0.0
    d_rho_h_dt: Union[float, np.ndarray] = 0.0

    def __post_init__(self):
        for name in ("h", "rho", "eta"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if np.any(~(arr > 0)):
                raise DomainError(f"{name} must be > 0 at every node")
            object.__setattr__(self, name, arr)


@dataclass(frozen=True, eq=False)
class CoefficientFields:
    """Diffusivities at half-node midpoints and the source at nodes.

    In 2D, ``f1`` has shape ``(nx-1, ny)`` (entry ``[i, j]`` sits at
    ``(i+1/2, j)``) and ``f2`` has shape ``(nx, ny-1)``.  In 1D ``f1`` has
    length ``n-1`` and ``f2`` is None.
    """

    f1: np.ndarray
    f3: np.ndarray
    f2: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("f1", "f2", "f3"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, np.asarray(val, dtype=float))
        if np.any(~(self.f1 >= 0)) or (self.f2 is not None and np.any(~(self.f2 >= 0))):
            raise DomainError("diffusivities f1, f2 must be >= 0")

    @classmethod
    def from_nodal(cls, grid, f1, f3, f2=None) -> "CoefficientFields":
        """Build from nodal values (scalars broadcast); midpoints are arithmetic means."""
        f1 = np.broadcast_to(np.asarray(f1, dtype=float), grid.shape)
        f3 = np.broadcast_to(np.asarray(f3, dtype=float), grid.shape).copy()
        f1_mid = 0.5 * (f1[1:] + f1[:-1])
        if grid.ndim == 1:
            return cls(f1_mid, f3)
        f2 = f1 if f2 is None else np.broadcast_to(np.asarray(f2, dtype=float), grid.shape)
        f2_mid = 0.5 * (f2[:, 1:] + f2[:, :-1])
        return cls(f1_mid, f3, f2_mid)


@dataclass(frozen=True, eq=False)
class CoefficientGrid2D:
    """Five-point stencil weights on a 2D grid.

    All arrays have the grid's shape; entries on the boundary ring are zero
    and never read by the solvers.
    """

    grid: Grid2D
    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    k4: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        interior = ~self.grid.boundary_mask()
        for name in ("k1", "k2", "k3", "k4", "D"):
            arr = np.array(np.broadcast_to(getattr(self, name), self.grid.shape), dtype=float)
            arr[~interior] = 0.0
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if any(np.any(~(k >= 0)) for k in (self.k1, self.k2, self.k3, self.k4)):
            raise DomainError("stencil weights must be >= 0")
        K = self.k1 + self.k2 + self.k3 + self.k4
        K.setflags(write=False)
        object.__setattr__(self, "K", K)
        if np.any(K[interior] <= 0):
            bad = np.argwhere((K <= 0) & interior)[0]
            raise SingularStencilError(f"zero diagonal at interior node {tuple(bad)}")


@dataclass(frozen=True, eq=False)
class Tridiag1D:
    """Three-point stencil ``A[i] p[i-1] + B[i] p[i+1] - (A[i]+B[i]) p[i] = C[i]``.

    Arrays span all nodes; boundary entries are zero.
    """

    grid: Grid1D
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        n = self.grid.n_nodes
        for name in ("A", "B", "C"):
            arr = np.array(np.broadcast_to(getattr(self, name), (n,)), dtype=float)
            arr[[0, -1]] = 0.0
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(~(self.A[1:-1] > 0)) or np.any(~(self.B[1:-1] > 0)):
            raise SingularStencilError("A and B must be > 0 at every interior node")

    @property
    def n_nodes(self) -> int:
        return self.grid.n_nodes

    @property
    def diagonal(self) -> np.ndarray:
        return -(self.A + self.B)


def diffusivity(phys: PhysicalFields, exponent: float = 2.0, divisor: float = 1.0) -> np.ndarray:
    """Nodal ``rho * h**exponent / (divisor * eta)``.

    The defaults give ``rho h^2 / eta``; classical lubrication theory uses
    ``exponent=3, divisor=12``.
    """
    return phys.rho * phys.h**exponent / (divisor * phys.eta)


def build_reynolds_coefficients(
    phys: PhysicalFields, grid, exponent: float = 2.0, divisor: float = 1.0
) -> CoefficientFields:
    """Map physical inputs to ``(f1, f2, f3)`` on a 1D or 2D grid.

    ``f3 = 6 (Vx d(rho h)/dx + Vy d(rho h)/dy + 2 d(rho h)/dt)`` with central
    differences at interior nodes and one-sided differences on the boundary.
    """
    shape = grid.shape
    for name in ("h", "rho", "eta"):
        if getattr(phys, name).shape != shape:
            raise DimensionError(f"{name} shape {getattr(phys, name).shape} != grid {shape}")
    rho_h = phys.rho * phys.h
    dt_term = np.broadcast_to(np.asarray(phys.d_rho_h_dt, dtype=float), shape)
    if grid.ndim == 1:
        src = np.asarray(phys.Vx) * np.gradient(rho_h, grid.dx)
    else:
        ddx, ddy = np.gradient(rho_h, grid.dx, grid.dy)
        src = np.asarray(phys.Vx) * ddx + np.asarray(phys.Vy) * ddy
    f3 = 6.0 * (src + 2.0 * dt_term)
    g = diffusivity(phys, exponent, divisor)
    return CoefficientFields.from_nodal(grid, g, f3)


def build_stencil_2d(coef: CoefficientFields, grid: Grid2D) -> CoefficientGrid2D:
    nx, ny = grid.shape
    if coef.f2 is None:
        raise DimensionError("2D stencil needs f2")
    if coef.f1.shape != (nx - 1, ny) or coef.f2.shape != (nx, ny - 1) or coef.f3.shape != (nx, ny):
        raise DimensionError("coefficient field shapes do not match grid")
    k1 = np.zeros(grid.shape)
    k2 = np.zeros(grid.shape)
    k3 = np.zeros(grid.shape)
    k4 = np.zeros(grid.shape)
    k1[1:-1, 1:-1] = coef.f1[1:, 1:-1] / grid.dx**2
    k2[1:-1, 1:-1] = coef.f1[:-1, 1:-1] / grid.dx**2
    k3[1:-1, 1:-1] = coef.f2[1:-1, 1:] / grid.dy**2
    k4[1:-1, 1:-1] = coef.f2[1:-1, :-1] / grid.dy**2
    return CoefficientGrid2D(grid, k1, k2, k3, k4, coef.f3)


def build_tridiagonal_1d(coef: CoefficientFields, grid: Grid1D) -> Tridiag1D:
    n = grid.n_nodes
    if coef.f1.shape != (n - 1,) or coef.f3.shape != (n,):
        raise DimensionError("coefficient field shapes do not match grid")
    mid = coef.f1
    if np.any(~(mid > 0)):
        raise SingularStencilError("zero midpoint diffusivity")
    A = np.zeros(n)
    B = np.zeros(n)
    A[1:-1] = mid[:-1] / grid.dx**2
    B[1:-1] = mid[1:] / grid.dx**2
    return Tridiag1D(grid, A, B, coef.f3)


def strip_from_tridiagonal(tri: Tridiag1D) -> CoefficientGrid2D:
    """Embed a 1D problem as the middle row of an ``n x 3`` grid with no y-coupling."""
    g = tri.grid
    grid = Grid2D(g.n_nodes, 3, g.x0, -1.0, g.dx, 1.0)
    k1 = np.zeros(grid.shape)
    k2 = np.zeros(grid.shape)
    D = np.zeros(grid.shape)
    k1[:, 1] = tri.B
    k2[:, 1] = tri.A
    D[:, 1] = tri.C
    return CoefficientGrid2D(grid, k1, k2, 0.0, 0.0, D)
