import numpy as np
import pytest
from hypothesis import given, strategies as st

from reynolds.core import (
    ActiveSet,
    DimensionError,
    DomainError,
    Grid1D,
    Grid2D,
    PressureField,
    is_subset,
    union,
)


def test_grid_invariants():
    with pytest.raises(DomainError):
        Grid1D(2)
    with pytest.raises(DomainError):
        Grid1D(5, 0.0, 0.0)
    with pytest.raises(DomainError):
        Grid2D(3, 2)
    g = Grid1D.from_extent(-3, 3, 7)
    np.testing.assert_allclose(g.x, [-3, -2, -1, 0, 1, 2, 3])


def test_active_set_rejects_boundary_nodes():
    g = Grid1D(5)
    with pytest.raises(DomainError):
        ActiveSet(g, [True, False, False, False, False])
    g2 = Grid2D(4, 4)
    mask = np.zeros((4, 4), dtype=bool)
    mask[0, 2] = True
    with pytest.raises(DomainError):
        ActiveSet(g2, mask)


def test_union_identity_and_idempotence():
    g = Grid1D(9)
    a = ActiveSet(g, [0, 1, 0, 1, 1, 0, 0, 1, 0])
    assert union(a, a) == a
    assert union(a, ActiveSet.empty(g)) == a
    assert a | a == a


def test_worked_example_sets():
    g = Grid1D.from_extent(-3, 3, 61)
    A = ActiveSet.from_predicate(g, lambda x: (x > -3) & (x < 1 - 1e-9))
    B = ActiveSet.from_predicate(g, lambda x: (x > -1 + 1e-9) & (x < 3))
    full = ActiveSet.from_predicate(g, lambda x: (x > -3) & (x < 3))
    assert union(A, B) == full
    assert not is_subset(A, B)
    assert not is_subset(B, A)
    assert is_subset(A, union(A, B)) and is_subset(B, union(A, B))


def test_subset_basics():
    g = Grid1D(6)
    a = ActiveSet(g, [0, 1, 1, 0, 1, 0])
    assert is_subset(ActiveSet.empty(g), a)
    assert is_subset(a, a)
    assert a <= ActiveSet.full(g)
    assert ActiveSet.full(g) >= a


def test_grid_mismatch():
    a = ActiveSet.empty(Grid1D(5))
    b = ActiveSet.empty(Grid1D(6))
    with pytest.raises(DimensionError):
        union(a, b)
    with pytest.raises(DimensionError):
        is_subset(a, b)


def test_pressure_field_invariants():
    g = Grid1D(5)
    with pytest.raises(DimensionError):
        PressureField(g, np.zeros(4))
    p = PressureField(g, [0, 1, 2, 0, 0])
    p.check_solution_invariants()
    assert p.active_set() == ActiveSet(g, [0, 1, 1, 0, 0])
    with pytest.raises(ValueError):
        p.values[1] = 3.0
    with pytest.raises(DomainError):
        PressureField(g, [0, -1, 2, 0, 0]).check_solution_invariants()
    with pytest.raises(DomainError):
        PressureField(g, [1, 1, 2, 0, 0]).check_solution_invariants()


GRID = Grid2D(5, 6)
N_INTERIOR = 3 * 4
masks = st.lists(st.booleans(), min_size=N_INTERIOR, max_size=N_INTERIOR).map(
    lambda bits: _embed(np.array(bits))
)


def _embed(bits):
    mask = np.zeros(GRID.shape, dtype=bool)
    mask[1:-1, 1:-1] = bits.reshape(3, 4)
    return ActiveSet(GRID, mask)


@given(masks, masks, masks)
def test_partial_order_laws(a, b, c):
    assert is_subset(a, a)
    if is_subset(a, b) and is_subset(b, a):
        assert a == b
    if is_subset(a, b) and is_subset(b, c):
        assert is_subset(a, c)


@given(masks, masks, masks)
def test_union_laws(a, b, c):
    assert union(a, b) == union(b, a)
    assert union(union(a, b), c) == union(a, union(b, c))
    assert union(a, a) == a
    assert is_subset(a, union(a, b))
    np.testing.assert_array_equal(union(a, b).mask, a.mask | b.mask)
