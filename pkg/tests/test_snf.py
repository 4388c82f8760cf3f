"""Tests for the integer linear algebra core.

sympy serves as the independent oracle for ranks and invariant factors; our
implementation must agree with it on randomized inputs, and additionally
produce valid unimodular transforms (which sympy does not expose).
"""

from __future__ import annotations

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import invariant_factors

from plcoin.snf import IntMatrix, integer_inverse, smith_normal_form, solve, vec_sub

matrices = st.integers(1, 6).flatmap(
    lambda n: st.integers(1, 6).flatmap(
        lambda m: st.lists(
            st.lists(st.integers(-9, 9), min_size=m, max_size=m),
            min_size=n,
            max_size=n,
        )
    )
)


def sympy_invariant_factors(dense):
    factors = invariant_factors(sympy.Matrix(dense))
    return sorted(abs(int(f)) for f in factors if f != 0)


def test_known_small_form():
    A = IntMatrix.from_dense([[2, 4], [6, 8]])
    f = smith_normal_form(A, verify=True)
    assert f.diag == [2, 4]


def test_zero_matrix():
    A = IntMatrix(3, 2)
    f = smith_normal_form(A, verify=True)
    assert f.diag == [0, 0]
    assert f.rank == 0
    assert len(f.kernel_basis()) == 2


def test_identity_passthrough():
    f = smith_normal_form(IntMatrix.identity(4), verify=True)
    assert f.diag == [1, 1, 1, 1]


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_randomized_against_sympy(dense):
    A = IntMatrix.from_dense(dense)
    f = smith_normal_form(A, verify=True)
    assert sorted(d for d in f.diag if d) == sympy_invariant_factors(dense)
    assert f.rank == sympy.Matrix(dense).rank()


@settings(max_examples=100, deadline=None)
@given(matrices, st.data())
def test_solve_recovers_a_solution(dense, data):
    A = IntMatrix.from_dense(dense)
    x0 = {
        j: data.draw(st.integers(-5, 5), label=f"x{j}") for j in range(A.ncols)
    }
    b = A.matvec(x0)
    x = smith_normal_form(A).solve(b)
    assert x is not None
    assert A.matvec(x) == b


def test_solve_detects_unsolvable():
    A = IntMatrix.from_dense([[2]])
    assert solve(A, {0: 1}) is None
    assert solve(A, {0: 4}) == {0: 2}
    # inconsistent overdetermined system
    B = IntMatrix.from_dense([[1], [1]])
    assert solve(B, {0: 1, 1: 2}) is None


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_kernel_basis_spans_kernel(dense):
    A = IntMatrix.from_dense(dense)
    f = smith_normal_form(A)
    basis = f.kernel_basis()
    for v in basis:
        assert A.matvec(v) == {}
    assert len(basis) == A.ncols - sympy.Matrix(dense).rank()


def test_kernel_saturation():
    # The kernel basis must generate the full integer kernel, not a finite-
    # index subgroup: for [[2, -2]] the kernel is generated by (1, 1).
    A = IntMatrix.from_dense([[2, -2]])
    (v,) = smith_normal_form(A).kernel_basis()
    assert v in ({0: 1, 1: 1}, {0: -1, 1: -1})


def test_integer_inverse_round_trip():
    A = IntMatrix.from_dense([[1, 2, 0], [0, 1, 3], [0, 0, 1]])
    B = integer_inverse(A)
    assert A.matmul(B) == IntMatrix.identity(3)
    assert B.matmul(A) == IntMatrix.identity(3)


def test_matrix_utilities():
    A = IntMatrix.from_dense([[1, 2], [3, 4]])
    B = IntMatrix.from_dense([[5], [6]])
    H = IntMatrix.hstack([A, B])
    assert H.to_dense() == [[1, 2, 5], [3, 4, 6]]
    V = IntMatrix.vstack([A, A])
    assert V.nrows == 4 and V.column(0) == {0: 1, 1: 3, 2: 1, 3: 3}
    assert A.transpose().to_dense() == [[1, 3], [2, 4]]
    x = A.matvec({0: 1, 1: 1})
    assert x == {0: 3, 1: 7}
    assert vec_sub(x, x) == {}
