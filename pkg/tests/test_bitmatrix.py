from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from combbmm.bitmatrix import (BoolMatrix, TripartiteGraph, bool_product, col_degree,
                               count_product, density, index_set, row_degree, submatrix,
                               transpose, zero_rectangle)

from strategies import bool_arrays, matrices


def test_pack_layout_frozen():
    M = BoolMatrix.from_entries(2, 70, [(0, 0), (0, 65), (1, 63)])
    assert M.words.shape == (2, 2)
    assert int(M.words[0, 0]) == 1 and int(M.words[0, 1]) == 2
    assert int(M.words[1, 0]) == 1 << 63
    assert M.nnz() == 3 and M[0, 65] and not M[1, 64]
    assert M.row_int(0) == 1 | (1 << 65)


def test_padding_bits_rejected():
    with pytest.raises(ValueError):
        BoolMatrix(np.array([[1 << 5]], dtype=np.uint64), 1, 3)


def test_small_oracles():
    M = BoolMatrix.from_dense([[1, 1, 0], [1, 0, 0]])
    assert density(M) == Fraction(1, 2)
    assert row_degree(M, 0) == Fraction(2, 3)
    assert col_degree(M, 0) == Fraction(1)
    P = bool_product(M, BoolMatrix.from_dense([[0, 1], [1, 0], [1, 1]]))
    assert P.dense.tolist() == [[True, True], [False, True]]
    C = count_product(M, BoolMatrix.from_dense([[0, 1], [1, 0], [1, 1]]))
    assert C.tolist() == [[1, 1], [0, 1]]


def test_empty_density_raises():
    with pytest.raises(ValueError):
        density(BoolMatrix.zeros(0, 3))


def test_labels_compose_through_submatrix():
    M = BoolMatrix.from_dense(np.ones((5, 4), bool), row_labels=[10, 11, 12, 13, 14])
    S = submatrix(M, [1, 3], [0, 2])
    assert S.global_rows().tolist() == [11, 13]
    assert S.global_cols().tolist() == [0, 2]
    T = submatrix(S, [1], None)
    assert T.global_rows().tolist() == [13]


def test_index_set_validation():
    with pytest.raises(ValueError):
        index_set([2, 1])
    with pytest.raises(IndexError):
        index_set([0, 5], size=5)


def test_tripartite_shape_check():
    with pytest.raises(ValueError):
        TripartiteGraph(BoolMatrix.zeros(2, 3), BoolMatrix.zeros(2, 2), BoolMatrix.zeros(2, 2))


@given(bool_arrays(max_side=130))
def test_dense_roundtrip(D):
    M = BoolMatrix.from_dense(D)
    again = BoolMatrix(M.words.copy(), M.rows, M.cols)
    assert np.array_equal(again.dense, D)
    assert M.nnz() == int(D.sum())
    assert M.row_counts().tolist() == D.sum(axis=1).tolist()


@given(matrices(), matrices())
def test_products_match_numpy(A, B):
    B = BoolMatrix.from_dense(np.resize(B.dense, (A.cols, B.cols)))
    ref = A.dense.astype(int) @ B.dense.astype(int)
    assert np.array_equal(count_product(A, B), ref)
    assert np.array_equal(bool_product(A, B).dense, ref > 0)


@given(matrices())
def test_transpose_involution_and_zero_rectangle(M):
    assert transpose(transpose(M)) == M
    Z = zero_rectangle(M, [0], None)
    assert not Z.dense[0].any()
    assert np.array_equal(Z.dense[1:], M.dense[1:])


def test_equality_ignores_labels_and_hash_consistent():
    D = np.eye(3, dtype=bool)
    a = BoolMatrix.from_dense(D)
    b = BoolMatrix.from_dense(D, row_labels=[4, 5, 6])
    assert a == b and hash(a) == hash(b)
