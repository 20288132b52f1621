import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import unit_laplacian
from reynolds.core import ActiveSet, DomainError, Grid1D
from reynolds.discretize import CoefficientFields, CoefficientGrid2D, build_tridiagonal_1d
from reynolds.oracle import (
    OracleCapacityError,
    check_discrete_hopf,
    check_maximality,
    check_union_closure,
    enumerate_active_sets,
    random_problem,
    random_problem_1d,
    random_problem_2d,
)
from reynolds.solver2d import solve_on_active_set


def coarse_worked_problem():
    grid = Grid1D.from_extent(-3, 3, 7)
    return build_tridiagonal_1d(CoefficientFields.from_nodal(grid, 1.0, -2.0), grid)


def test_coarse_worked_example():
    tri = coarse_worked_problem()
    res = enumerate_active_sets(tri)
    assert res.fixed_point == ActiveSet.full(tri.grid)
    np.testing.assert_allclose(res.solution.values, [0, 5, 8, 9, 8, 5, 0], atol=1e-12)
    assert res.subsets_checked == 2**5
    assert check_maximality(res)
    assert res.family_union() == res.fixed_point


def test_nonnegative_source_fixed_point_is_empty():
    c = unit_laplacian(5, 4, D=0.3)
    res = enumerate_active_sets(c)
    assert res.fixed_point.count == 0
    assert not res.solution.values.any()
    assert res.positive_solution_family == [ActiveSet.empty(c.grid)]
    assert check_maximality(res)


def test_capacity_limit():
    with pytest.raises(OracleCapacityError):
        enumerate_active_sets(unit_laplacian(7, 5), limit=14)


def test_random_3x3_have_one_fixed_point():
    rng = np.random.default_rng(3)
    for _ in range(20):
        res = enumerate_active_sets(random_problem_2d(rng, 3, 3), require_unique=False)
        assert len(res.fixed_point_sets) == 1
        assert check_maximality(res)


def test_fixed_point_has_zero_residual():
    from reynolds.solver2d import complementarity_residual

    c = random_problem_2d(np.random.default_rng(8), 3, 4)
    eq, slack = complementarity_residual(c, enumerate_active_sets(c).solution)
    assert eq < 1e-12 and slack == 0.0


def test_hopf_corner_adjacent():
    c = unit_laplacian(6, 6)
    D = np.zeros((6, 6))
    D[1, 1] = -4.0
    assert check_discrete_hopf(CoefficientGrid2D(c.grid, c.k1, c.k2, c.k3, c.k4, D), (1, 1))


def test_hopf_preconditions():
    c = unit_laplacian(5, 5)
    with pytest.raises(DomainError):
        check_discrete_hopf(c, (2, 2))
    D = np.zeros((5, 5))
    D[2, 2], D[1, 3] = -1.0, -1.0
    with pytest.raises(DomainError):
        check_discrete_hopf(CoefficientGrid2D(c.grid, c.k1, c.k2, c.k3, c.k4, D), (2, 2))
    with pytest.raises(DomainError):
        check_discrete_hopf(c, (0, 2))


def test_closure_trivial_and_precondition():
    tri = coarse_worked_problem()
    a = ActiveSet(tri.grid, [0, 1, 1, 0, 0, 0, 0])
    assert check_union_closure(tri, a, a)
    c = unit_laplacian(5, 5, D=1.0)
    with pytest.raises(DomainError):
        check_union_closure(c, ActiveSet.full(c.grid), ActiveSet.empty(c.grid))


def test_closure_on_family_pairs():
    rng = np.random.default_rng(4)
    for _ in range(5):
        c = random_problem_2d(rng, 3, 3)
        res = enumerate_active_sets(c)
        sol = {s: p.values for s, p in zip(res.positive_solution_family, res.family_solutions)}
        for a in sol:
            for b in sol:
                assert a | b in sol
                assert np.all(sol[a | b] >= np.maximum(sol[a], sol[b]) - 1e-10)
        fam = res.positive_solution_family
        for _ in range(20):
            a, b = fam[int(rng.integers(len(fam)))], fam[int(rng.integers(len(fam)))]
            assert check_union_closure(c, a, b)


def test_random_problem_sizes():
    rng = np.random.default_rng(0)
    for _ in range(50):
        c = random_problem(rng, 16)
        assert 2 <= int((~c.grid.boundary_mask()).sum()) <= 16


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_uniqueness_and_maximality(seed):
    rng = np.random.default_rng(seed)
    res = enumerate_active_sets(random_problem(rng, 10), require_unique=False)
    assert len(res.fixed_point_sets) == 1
    assert check_maximality(res)
    assert res.family_union() == res.fixed_point


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_union_of_family_members_is_a_member(seed):
    rng = np.random.default_rng(seed)
    c = random_problem(rng, 9)
    fam = enumerate_active_sets(c).positive_solution_family
    a, b = fam[int(rng.integers(len(fam)))], fam[int(rng.integers(len(fam)))]
    assert a | b in fam
    assert check_union_closure(c, a, b)


@settings(max_examples=50, deadline=None)
@given(seeds, st.booleans())
def test_hopf_random(seed, two_d):
    rng = np.random.default_rng(seed)
    base = random_problem_2d(rng, 4, 3) if two_d else random_problem_1d(rng, 12)
    interior = np.argwhere(~base.grid.boundary_mask())
    hot = tuple(int(v) for v in interior[int(rng.integers(len(interior)))])
    src = np.zeros(base.grid.shape)
    src[hot] = -rng.uniform(0.01, 5.0)
    if two_d:
        prob = CoefficientGrid2D(base.grid, base.k1, base.k2, base.k3, base.k4, src)
    else:
        from reynolds.discretize import Tridiag1D
        prob = Tridiag1D(base.grid, base.A, base.B, src)
    assert check_discrete_hopf(prob, hot)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_family_solutions_are_nonnegative(seed):
    c = random_problem(np.random.default_rng(seed), 8)
    res = enumerate_active_sets(c)
    for s, p in zip(res.positive_solution_family, res.family_solutions):
        np.testing.assert_allclose(solve_on_active_set(c, s).values, p.values, atol=1e-10)
        assert np.all(p.values >= -1e-12)
