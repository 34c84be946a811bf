from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremal import linalg as la
from extremal.gf import build_field

F9 = build_field(3, 1)


def matrices(n, m, s=9):
    return st.lists(st.lists(st.integers(0, s - 1), min_size=m, max_size=m), min_size=n, max_size=n)


def brute_rank(F, M):
    """Dimension of the row space by enumerating every combination (tiny matrices only)."""
    n = len(M[0])
    span = set()
    for coeffs in itertools.product(range(F.s), repeat=len(M)):
        v = [0] * n
        for c, r in zip(coeffs, M):
            v = [F.add(a, F.mul(c, b)) for a, b in zip(v, r)]
        span.add(tuple(v))
    k = 0
    while F.s**k < len(span):
        k += 1
    return k


@settings(max_examples=40, deadline=None)
@given(matrices(3, 3))
def test_rank_against_span_size(M):
    assert la.rank(F9, M) == brute_rank(F9, M)


@settings(max_examples=60, deadline=None)
@given(matrices(3, 4))
def test_nullspace(M):
    ker = la.nullspace(F9, M, 4)
    assert len(ker) == 4 - la.rank(F9, M)
    for v in ker:
        assert not any(la.matvec(F9, M, v))


@settings(max_examples=60, deadline=None)
@given(matrices(4, 4))
def test_inverse_and_det(M):
    if la.det(F9, M) == 0:
        assert la.rank(F9, M) < 4
        with pytest.raises(ValueError):
            la.inverse(F9, M)
        return
    assert la.matmul(F9, M, la.inverse(F9, M)) == la.identity(4)


@settings(max_examples=40, deadline=None)
@given(matrices(2, 2), matrices(2, 2))
def test_det_multiplicative(A, B):
    assert la.det(F9, la.matmul(F9, A, B)) == F9.mul(la.det(F9, A), la.det(F9, B))


def test_rref_and_normalize():
    row = [0, 2, 4]
    R, piv = la.rref(F9, [row, la.scale(F9, 7, row), [0, 0, 0]])
    assert piv == [1] and R[0][1] == 1 and len(R) == 1
    assert la.normalize(F9, [0, 5, 3])[1] == 1
    with pytest.raises(ValueError):
        la.normalize(F9, [0, 0, 0])
    assert la.scalar_multiple(F9, [[1, 2], [3, 4]], [[2, F9.mul(2, 2)], [F9.mul(2, 3), F9.mul(2, 4)]])


def test_left_nullspace_and_frob():
    M = [[1, 0], [0, 0]]
    left = la.left_nullspace(F9, M)
    assert left == [[0, 1]]
    v = [3, 5]
    assert la.frob_vec(F9, la.frob_vec(F9, v)) == v
    assert la.frob_mat(F9, [[3]]) == [[F9.frobq(3)]]
    assert la.transpose([[1, 2], [3, 4]]) == [[1, 3], [2, 4]]
    assert la.is_zero([[0, 0]]) and not la.is_zero(np.array([[0, 1]]))
