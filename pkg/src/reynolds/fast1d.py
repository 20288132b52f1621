"""Linear-time 1D solver by segment expansion.

Any solution of the unconstrained three-point recurrence can be written as
``p[i] = m[i] p1 + n[i] p2 + c[i]``.  With the basis precomputed, the pressure
inside a candidate segment held at zero on two anchor nodes costs O(1) to
evaluate, so pressurized segments can be grown one node at a time from the
nodes where the source is negative until no boundary test succeeds.

Because the stencil rows sum to zero, ``m = 1 - n`` identically and the
anchor solve is done in difference form, which avoids the cancellation of a
2x2 Cramer solve far from the seed nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ._backend import KernelError, get_kernels
from .core import PressureField, ReynoldsError
from .discretize import Tridiag1D
from .solver2d import SolveOptions, SolveReport, complementarity_residual

BASIS_LIMIT = 1e150
NEGATIVE_CLAMP = 1e-8


class BasisOverflowError(ReynoldsError, OverflowError):
    pass


class DegenerateAnchorError(ReynoldsError):
    pass


class ExpansionError(ReynoldsError, RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SuperpositionBasis:
    m: np.ndarray
    n: np.ndarray
    c: np.ndarray


@dataclass(frozen=True, order=True)
class Segment:
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"segment start {self.start} > end {self.end}")


class SegmentList(tuple):
    """Sorted, disjoint segments separated by at least one inactive node."""

    def __new__(cls, segments: Iterable = ()):
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in segments)
        for a, b in zip(segs, segs[1:]):
            if b.start <= a.end + 1:
                raise ValueError(f"segments {a} and {b} overlap or touch")
        return super().__new__(cls, segs)

    def as_pairs(self) -> list:
        return [(s.start, s.end) for s in self]

    def mask(self, n_nodes: int) -> np.ndarray:
        out = np.zeros(n_nodes, dtype=bool)
        for s in self:
            out[s.start:s.end + 1] = True
        return out

    def __repr__(self):
        return f"SegmentList({self.as_pairs()})"


def compute_basis(tri: Tridiag1D, backend: Optional[str] = None) -> SuperpositionBasis:
    """Basis seeded at nodes 1 and 2 and extended by the recurrence to both ends."""
    size = tri.n_nodes
    m, n, c = np.zeros(size), np.zeros(size), np.zeros(size)
    big = get_kernels(backend).compute_basis(tri.A, tri.B, tri.C, m, n, c)
    if not big <= BASIS_LIMIT:
        raise BasisOverflowError(f"basis magnitude {big:.3e} exceeds {BASIS_LIMIT:.0e}")
    return SuperpositionBasis(m, n, c)


def eval_segment(basis: SuperpositionBasis, left_anchor: int, right_anchor: int, query: int) -> float:
    """Pressure at ``query`` for the solution vanishing at both anchors."""
    if not left_anchor < query < right_anchor:
        raise ValueError("need left_anchor < query < right_anchor")
    try:
        return float(get_kernels("python").basis_eval(basis.n, basis.c, left_anchor, right_anchor, query))
    except KernelError as exc:
        raise DegenerateAnchorError(str(exc)) from exc


def _negative_runs(C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    neg = np.zeros(C.size + 1, dtype=np.int8)
    neg[1:-2] = C[1:-1] < 0
    edges = np.diff(neg, prepend=0)
    return np.flatnonzero(edges == 1), np.flatnonzero(edges == -1) - 1


def initial_segments(tri: Tridiag1D) -> SegmentList:
    """Maximal runs of interior nodes with C < 0."""
    starts, ends = _negative_runs(tri.C)
    return SegmentList(zip(starts.tolist(), ends.tolist()))


def _expand_arrays(tri, basis, segs, backend, use_basis):
    kern = get_kernels(backend)
    size = tri.n_nodes
    if isinstance(segs, tuple) and len(segs) == 2 and isinstance(segs[0], np.ndarray):
        starts, ends = (np.array(a, dtype=np.int64) for a in segs)
    else:
        starts = np.array([s.start for s in segs], dtype=np.int64)
        ends = np.array([s.end for s in segs], dtype=np.int64)
    if starts.size == 0:
        return starts, ends, 0, 0
    out, work = np.zeros(size), np.zeros(size)
    n = basis.n if basis is not None else out
    c = basis.c if basis is not None else out
    try:
        nseg, moves, tests = kern.expand_segments(
            tri.A, tri.B, tri.C, n, c, starts, ends, starts.size, use_basis, out, work
        )
    except KernelError as exc:
        if "budget" in str(exc):
            raise ExpansionError(str(exc)) from exc
        raise DegenerateAnchorError(str(exc)) from exc
    return starts[:nseg], ends[:nseg], moves, tests


def expand_segments(
    tri: Tridiag1D,
    basis: Optional[SuperpositionBasis],
    segs: SegmentList,
    backend: Optional[str] = None,
) -> SegmentList:
    """Alternate forward/backward growth passes until nothing moves.

    Forward pass: for a segment ``[s, e]`` the trial node ``j = e + 1`` is
    accepted when the solution anchored at ``s - 1`` and ``j + 1`` is
    positive at ``j``.  If ``j + 1`` starts the next segment, the trial is
    evaluated on the merged interval and acceptance merges the two.  The
    backward pass mirrors this on segment starts.  Passing ``basis=None``
    evaluates each trial by a direct tridiagonal solve instead.
    """
    starts, ends, _, _ = _expand_arrays(tri, basis, segs, backend, basis is not None)
    return SegmentList(zip(starts.tolist(), ends.tolist()))


def _segment_pressures(tri, starts, ends, kern) -> np.ndarray:
    p = np.zeros(tri.n_nodes)
    work = np.zeros(tri.n_nodes)
    for s, e in zip(starts.tolist(), ends.tolist()):
        kern.thomas_segment(tri.A, tri.B, tri.C, s, e, p, work)
    return p


def _violations(tri: Tridiag1D, p: np.ndarray) -> bool:
    inner = p[1:-1]
    if np.any(inner < 0):
        return True
    A, B = tri.A[1:-1], tri.B[1:-1]
    cand = (A * p[:-2] + B * p[2:] - tri.C[1:-1]) / (A + B)
    floor = 64 * np.finfo(float).eps * max(1.0, float(np.max(p)))
    return bool(np.any((inner == 0) & (cand > floor)))


@dataclass
class FastSolveStats:
    moves: int = 0
    tests: int = 0
    used_basis: bool = True
    polish_rounds: int = 0
    drop_rounds: int = 0


def solve_fast_1d(
    tri: Tridiag1D, backend: Optional[str] = None, stats: Optional[FastSolveStats] = None
) -> tuple[PressureField, SegmentList]:
    """Exact complementarity solution of a 1D problem in O(N).

    Final pressures come from a direct tridiagonal solve on each segment.
    Should rounding in the basis evaluation leave a neighbour whose clamped
    candidate is positive, expansion resumes with direct trial solves.
    """
    kern = get_kernels(backend)
    stats = stats if stats is not None else FastSolveStats()
    segs = _negative_runs(tri.C)
    try:
        basis = compute_basis(tri, backend)
    except BasisOverflowError:
        basis = None
    stats.used_basis = basis is not None
    try:
        starts, ends, moves, tests = _expand_arrays(tri, basis, segs, backend, basis is not None)
    except DegenerateAnchorError:
        stats.used_basis = False
        starts, ends, moves, tests = _expand_arrays(tri, None, segs, backend, False)
    stats.moves += moves
    stats.tests += tests
    p = _segment_pressures(tri, starts, ends, kern)
    if _violations(tri, p):
        stats.polish_rounds += 1
        starts, ends, moves, tests = _expand_arrays(tri, None, (starts, ends), backend, False)
        stats.moves += moves
        stats.tests += tests
        p = _segment_pressures(tri, starts, ends, kern)
    # sources whose full-film pressure just touches zero leave rounding-level
    # negatives; drop those nodes from their segment and re-solve the pieces
    floor = NEGATIVE_CLAMP * max(1.0, float(np.max(np.abs(p))))
    if np.any(p < -floor):
        raise ExpansionError("negative pressure inside an accepted segment")
    for _ in range(tri.n_nodes):
        if not np.any(p < 0):
            break
        stats.drop_rounds += 1
        keep = np.zeros(tri.n_nodes, dtype=bool)
        for s, e in zip(starts.tolist(), ends.tolist()):
            keep[s:e + 1] = True
        keep &= p > 0
        run = np.diff(keep.astype(np.int8), prepend=0, append=0)
        starts, ends = np.flatnonzero(run == 1), np.flatnonzero(run == -1) - 1
        p = _segment_pressures(tri, starts, ends, kern)
    np.maximum(p, 0.0, out=p)
    return PressureField(tri.grid, p), SegmentList(zip(starts.tolist(), ends.tolist()))


def solve_sor_1d(
    tri: Tridiag1D,
    opts: Optional[SolveOptions] = None,
    init: Optional[PressureField] = None,
    backend: Optional[str] = None,
) -> tuple[PressureField, SolveReport]:
    """Projected SOR on the tridiagonal system, the iterative baseline."""
    opts = opts or SolveOptions()
    p = np.zeros(tri.n_nodes) if init is None else np.maximum(np.array(init.values), 0.0)
    p[[0, -1]] = 0.0
    it, change = get_kernels(backend).pgs_solve_1d(
        tri.A, tri.B, tri.C, p, float(opts.omega), float(opts.tol), int(opts.max_iter)
    )
    report = SolveReport(int(it), float(change), bool(change < opts.tol))
    return PressureField(tri.grid, p), report


def residual_1d(tri: Tridiag1D, p: PressureField) -> tuple[float, float]:
    return complementarity_residual(tri, p)
