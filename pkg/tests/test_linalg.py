from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gmexp.linalg import (
    SparseMatrixQ,
    cokernel_dim_on,
    nullspace,
    rank,
    rank_with_extension,
    solve,
)
from gmexp.rational import Q


def dense_rank(rows):
    """Reference rank by plain fraction Gaussian elimination."""
    rows = [[Fraction(int(v.numerator), int(v.denominator)) for v in row] for row in rows]
    rk = 0
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        rk += 1
    return rk


def from_dense(rows):
    m = SparseMatrixQ(len(rows), len(rows[0]) if rows else 0)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            m.set(i, j, v)
    return m


matrices = st.lists(
    st.lists(st.builds(Q, st.integers(-5, 5), st.integers(1, 3)), min_size=1, max_size=6),
    min_size=1,
    max_size=6,
).filter(lambda rows: len({len(r) for r in rows}) == 1)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_rank_matches_dense_oracle(rows):
    m = from_dense(rows)
    assert rank(m) == dense_rank(rows)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_rank_transpose_invariant(rows):
    m = from_dense(rows)
    assert rank(m) == rank(m.transpose())


@settings(max_examples=100, deadline=None)
@given(matrices, st.data())
def test_solve_consistency(rows, data):
    m = from_dense(rows)
    x = [
        data.draw(st.builds(Q, st.integers(-3, 3), st.integers(1, 2)))
        for _ in range(m.ncols)
    ]
    b = [sum((m.get(r, c) * x[c] for c in range(m.ncols)), Q(0)) for r in range(m.nrows)]
    sol = solve(m, b)
    assert sol is not None
    for r in range(m.nrows):
        assert sum((m.get(r, c) * sol[c] for c in range(m.ncols)), Q(0)) == b[r]


def test_solve_inconsistent():
    m = from_dense([[1, 0], [0, 0]])
    assert solve(m, [Q(1), Q(1)]) is None
    assert solve(m, [Q(1), Q(0)]) == [Q(1), Q(0)]


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_nullspace_rank_nullity(rows):
    m = from_dense(rows)
    basis = nullspace(m)
    assert len(basis) == m.ncols - rank(m)
    for vec in basis:
        for r in range(m.nrows):
            assert sum((m.get(r, c) * v for c, v in vec.items()), Q(0)) == 0


def test_rank_with_extension_orders_pivots():
    # extension columns must not steal pivots from the base matrix
    a = from_dense([[1], [1]])
    base, extra = rank_with_extension(a, [{0: Q(1)}, {1: Q(1)}])
    assert (base, extra) == (1, 1)


def test_cokernel_examples():
    # zero map: everything survives
    z = SparseMatrixQ(3, 2)
    assert cokernel_dim_on(z, [0, 1, 2]) == 3
    # identity: nothing survives
    i3 = from_dense([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert cokernel_dim_on(i3, [0, 1, 2]) == 0
    # rank-1 projection, target the dead row
    m = from_dense([[1, 0], [0, 0]])
    assert cokernel_dim_on(m, [1]) == 1
    assert cokernel_dim_on(m, [0]) == 0
    with pytest.raises(IndexError):
        cokernel_dim_on(m, [5])


def test_dump_triplets_roundtrip():
    m = from_dense([[Q(1, 2), 0], [0, Q(-3)]])
    text = m.dump_triplets()
    lines = text.splitlines()
    assert lines[0] == "2 2"
    assert "0 0 1/2" in lines and "1 1 -3" in lines


def test_determinism():
    rows = [[Q(1), Q(2), Q(0)], [Q(2), Q(4), Q(1)], [Q(0), Q(1), Q(1)]]
    m = from_dense(rows)
    assert rank(m) == rank(from_dense(rows)) == 3
    assert solve(m, [Q(1), Q(2), Q(3)]) == solve(from_dense(rows), [Q(1), Q(2), Q(3)])
