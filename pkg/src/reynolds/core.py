"""Grid geometry, pressure containers and the active-set algebra."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np


class ReynoldsError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(ReynoldsError, ValueError):
    pass


class DomainError(ReynoldsError, ValueError):
    pass


class SingularStencilError(ReynoldsError):
    pass


class SingularSystemError(ReynoldsError):
    pass


@dataclass(frozen=True)
class Grid1D:
    n_nodes: int
    x0: float = 0.0
    dx: float = 1.0

    def __post_init__(self):
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 3:
            raise DomainError(f"Grid1D needs n_nodes >= 3, got {self.n_nodes}")
        if not self.dx > 0:
            raise DomainError(f"Grid1D needs dx > 0, got {self.dx}")

    @classmethod
    def from_extent(cls, x_min: float, x_max: float, n_nodes: int) -> "Grid1D":
        return cls(n_nodes, x_min, (x_max - x_min) / (n_nodes - 1))

    @property
    def shape(self) -> tuple[int]:
        return (self.n_nodes,)

    @property
    def size(self) -> int:
        return self.n_nodes

    @property
    def ndim(self) -> int:
        return 1

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n_nodes)

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[[0, -1]] = True
        return mask


@dataclass(frozen=True)
class Grid2D:
    """Node-centred rectangular grid.

    Arrays living on the grid have shape ``(nx, ny)``; node ``(i, j)`` sits at
    ``(x0 + i*dx, y0 + j*dy)``.  Row-major flattening gives ``i*ny + j``.
    """

    nx: int
    ny: int
    x0: float = 0.0
    y0: float = 0.0
    dx: float = 1.0
    dy: float = 1.0

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise DomainError(f"Grid2D needs nx, ny >= 3, got {self.nx}x{self.ny}")
        if not (self.dx > 0 and self.dy > 0):
            raise DomainError("Grid2D needs dx > 0 and dy > 0")

    @classmethod
    def from_extent(cls, x_range, y_range, nx: int, ny: int) -> "Grid2D":
        (xa, xb), (ya, yb) = x_range, y_range
        return cls(nx, ny, xa, ya, (xb - xa) / (nx - 1), (yb - ya) / (ny - 1))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def ndim(self) -> int:
        return 2

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.y0 + self.dy * np.arange(self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    def boundary_mask(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        mask[1:-1, 1:-1] = False
        return mask


Grid = Union[Grid1D, Grid2D]


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise DimensionError(f"grid mismatch: {a.grid} vs {b.grid}")


@dataclass(frozen=True, eq=False)
class PressureField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise DimensionError(
                f"values shape {values.shape} does not match grid {self.grid.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Grid) -> "PressureField":
        return cls(grid, np.zeros(grid.shape))

    def active_set(self) -> "ActiveSet":
        mask = self.values > 0
        mask[self.grid.boundary_mask()] = False
        return ActiveSet(self.grid, mask)

    def check_solution_invariants(self) -> None:
        """Raise ``DomainError`` unless p >= 0 everywhere and p = 0 on the boundary ring."""
        if np.any(self.values < 0):
            raise DomainError(f"negative pressure {self.values.min():.3e}")
        if np.any(self.values[self.grid.boundary_mask()] != 0):
            raise DomainError("nonzero pressure on boundary ring")


@dataclass(frozen=True, eq=False)
class ActiveSet:
    """Nodes asserted to carry strictly positive pressure.

    The boundary ring is never active.  Ordering is set inclusion: ``a <= b``
    means every active node of ``a`` is active in ``b``.
    """

    grid: Grid
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != self.grid.shape:
            raise DimensionError(
                f"mask shape {mask.shape} does not match grid {self.grid.shape}"
            )
        if np.any(mask[self.grid.boundary_mask()]):
            raise DomainError("boundary-ring nodes cannot be active")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def empty(cls, grid: Grid) -> "ActiveSet":
        return cls(grid, np.zeros(grid.shape, dtype=bool))

    @classmethod
    def full(cls, grid: Grid) -> "ActiveSet":
        return cls(grid, ~grid.boundary_mask())

    @classmethod
    def from_predicate(cls, grid: Grid, predicate) -> "ActiveSet":
        """Activate interior nodes whose coordinates satisfy ``predicate``."""
        if grid.ndim == 1:
            mask = np.asarray(predicate(grid.x), dtype=bool)
        else:
            mask = np.asarray(predicate(*grid.mesh()), dtype=bool)
        return cls(grid, mask & ~grid.boundary_mask())

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def __eq__(self, other):
        if not isinstance(other, ActiveSet):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.grid, self.mask.tobytes()))

    def __or__(self, other: "ActiveSet") -> "ActiveSet":
        return union(self, other)

    def __le__(self, other: "ActiveSet") -> bool:
        return is_subset(self, other)

    def __ge__(self, other: "ActiveSet") -> bool:
        return is_subset(other, self)


def union(a: ActiveSet, b: ActiveSet) -> ActiveSet:
    _check_same_grid(a, b)
    return ActiveSet(a.grid, a.mask | b.mask)


def is_subset(a: ActiveSet, b: ActiveSet) -> bool:
    _check_same_grid(a, b)
    return not np.any(a.mask & ~b.mask)
