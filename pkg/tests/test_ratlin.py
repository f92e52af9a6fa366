from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fatlab.errors import NoSolution, NonSquare, NotInvertible
from fatlab.ratlin import (Matrix, inverse, kernel_basis, rank, rational_from_str,
                           rational_to_str, solve)


def mat(rows):
    return Matrix.from_rows(rows)


dims = st.integers(min_value=0, max_value=6)
entry = st.integers(min_value=-5, max_value=5)


@st.composite
def matrices(draw, max_dim=6):
    n = draw(st.integers(0, max_dim))
    m = draw(st.integers(0, max_dim))
    data = [[draw(entry) for _ in range(m)] for _ in range(n)]
    return Matrix(n, m, data)


def test_rank_frozen_examples():
    assert rank(Matrix.identity(2)) == 2
    assert rank(Matrix.zeros(2, 2)) == 0
    # hand elimination: second row is twice the first
    assert rank(mat([[1, 2], [2, 4]])) == 1


def test_kernel_frozen_examples():
    assert kernel_basis(Matrix.identity(3)) == []
    zero = Matrix.zeros(3, 3)
    basis = kernel_basis(zero)
    assert len(basis) == 3
    span = Matrix.zeros(3, 0)
    for b in basis:
        span = span.hstack(b)
    assert rank(span) == 3
    # x + y = 0 has the line through (1, -1)
    (b,) = kernel_basis(mat([[1, 1]]))
    assert b.data[0][0] == -b.data[1][0] != 0


def test_inverse_frozen_examples():
    assert inverse(Matrix.identity(4)) == Matrix.identity(4)
    assert inverse(mat([[2]])) == mat([[Fraction(1, 2)]])
    assert inverse(mat([[1, 1], [0, 1]])) == mat([[1, -1], [0, 1]])
    with pytest.raises(NotInvertible):
        inverse(mat([[1, 2], [2, 4]]))
    with pytest.raises(NonSquare):
        inverse(mat([[1, 2]]))


def test_solve_frozen_examples():
    x, unique = solve(Matrix.identity(2), Matrix.column([3, -7]))
    assert x == Matrix.column([3, -7]) and unique
    x, unique = solve(mat([[1, 1]]), Matrix.column([2]))
    assert x == Matrix.column([2, 0]) and not unique
    with pytest.raises(NoSolution):
        solve(mat([[0]]), Matrix.column([1]))


def test_empty_matrices_are_first_class():
    e = Matrix.zeros(0, 3)
    assert rank(e) == 0
    assert len(kernel_basis(e)) == 3
    e2 = Matrix.zeros(3, 0)
    assert rank(e2) == 0
    assert kernel_basis(e2) == []
    assert inverse(Matrix.zeros(0, 0)) == Matrix.zeros(0, 0)
    assert (Matrix.zeros(2, 0) * Matrix.zeros(0, 3)) == Matrix.zeros(2, 3)


@given(matrices())
@settings(max_examples=120, deadline=None)
def test_rank_nullity(a):
    assert rank(a) + len(kernel_basis(a)) == a.cols
    for b in kernel_basis(a):
        assert (a * b).is_zero()


@given(matrices(max_dim=5))
@settings(max_examples=80, deadline=None)
def test_inverse_left_and_right(a):
    if not a.is_square():
        return
    try:
        ai = inverse(a)
    except NotInvertible:
        assert rank(a) < a.rows
        return
    assert ai * a == Matrix.identity(a.rows)
    assert a * ai == Matrix.identity(a.rows)


@given(matrices(max_dim=5), st.lists(entry, min_size=0, max_size=5))
@settings(max_examples=80, deadline=None)
def test_solve_produces_solutions(a, v):
    b = Matrix.column((v + [0] * a.rows)[: a.rows])
    try:
        x, unique = solve(a, b)
    except NoSolution:
        assert rank(a.hstack(b)) > rank(a)
        return
    assert a * x == b
    assert unique == (len(kernel_basis(a)) == 0)


def test_rational_serialization_is_canonical():
    assert rational_to_str(Fraction(2, 4)) == "1/2"
    assert rational_to_str(Fraction(-2, 4)) == "-1/2"
    assert rational_to_str(Fraction(3)) == "3"
    assert rational_from_str("6/4") == Fraction(3, 2)
    m = mat([[Fraction(1, 3), 2], [0, Fraction(-5, 7)]])
    assert Matrix.from_json(m.to_json()) == m
