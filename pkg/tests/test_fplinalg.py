import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adamsext.fplinalg import (DenseSolver, FpError, FpScalar, SparseMatrix, check_prime, inv, kernel_basis,
                               rank_of, rref, rref_array, row_space, solve)


def matrices(p, max_rows=6, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r)))


def brute_rank(rows, p):
    """log_p of the size of the row space, by enumeration."""
    span = set()
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        v = tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % p for j in range(len(rows[0])))
        span.add(v)
    n, k = len(span), 0
    while n > 1:
        n //= p
        k += 1
    return k


def test_check_prime():
    assert check_prime(5) == 5
    for bad in (2, 4, 9, 1, 0, -3):
        with pytest.raises(FpError):
            check_prime(bad)


def test_inverse_and_scalar():
    for p in (3, 5, 7, 11):
        for a in range(1, p):
            assert a * inv(a, p) % p == 1
    x = FpScalar(3, 5)
    assert int(x * x.inverse()) == 1
    with pytest.raises((FpError, ZeroDivisionError)):
        inv(0, 5)


@settings(max_examples=60, deadline=None)
@given(matrices(3, 4, 4))
def test_rank_matches_enumeration(rows):
    a = np.array(rows, dtype=np.int64)
    assert rank_of(a, 3) == brute_rank(rows, 3)


@settings(max_examples=80, deadline=None)
@given(matrices(5))
def test_rank_transpose(rows):
    a = np.array(rows, dtype=np.int64)
    assert rank_of(a, 5) == rank_of(a.T.copy(), 5)


@settings(max_examples=80, deadline=None)
@given(matrices(7))
def test_rref_is_reduced(rows):
    a = np.ascontiguousarray(np.array(rows, dtype=np.int64))
    piv = rref_array(a, 7)
    for i, c in enumerate(piv):
        assert a[i, c] == 1
        col = a[:, c].copy()
        col[i] = 0
        assert not col.any()
        assert not a[i, :c].any()
    assert not a[len(piv):].any()


@settings(max_examples=60, deadline=None)
@given(matrices(5))
def test_kernel_basis(rows):
    m = SparseMatrix.from_dense(np.array(rows, dtype=np.int64), 5)
    k = kernel_basis(m)
    _, rank = rref(m)
    assert k.dim == m.ncols - rank
    dense = m.to_dense()
    for v in k.vectors():
        assert not ((dense @ np.array(v)) % 5).any()


@settings(max_examples=60, deadline=None)
@given(matrices(5), st.lists(st.integers(0, 4), min_size=6, max_size=6))
def test_solve_consistency(rows, xs):
    a = np.array(rows, dtype=np.int64)
    x = np.array(xs[: a.shape[1]])
    b = (a @ x) % 5
    m = SparseMatrix.from_dense(a, 5)
    sol = solve(m, b.tolist())
    assert sol is not None
    assert ((a @ np.array(sol)) % 5 == b).all()


@settings(max_examples=60, deadline=None)
@given(matrices(5), st.lists(st.integers(0, 4), min_size=6, max_size=6))
def test_dense_solver_row_layout(rows, xs):
    a = np.array(rows, dtype=np.int64)
    x = np.array(xs[: a.shape[0]])
    y = (x @ a) % 5
    s = DenseSolver(a, 5)
    got = s.solve(y)
    assert got is not None
    assert ((got @ a) % 5 == y).all()


def test_dense_solver_inconsistent():
    a = np.array([[1, 0, 0]], dtype=np.int64)
    assert DenseSolver(a, 5).solve([0, 1, 0]) is None
    m = SparseMatrix.from_dense(np.array([[1, 1], [2, 2]]), 5)
    assert solve(m, [1, 0]) is None


def test_sparse_path_agrees_with_dense():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 5, size=(30, 90)) * (rng.random((30, 90)) < 0.1)
    m = SparseMatrix.from_dense(a, 5)
    _, rank = rref(m)
    assert rank == rank_of(a, 5)
    rs = row_space(m)
    for r in a:
        assert rs.contains(r.tolist())
