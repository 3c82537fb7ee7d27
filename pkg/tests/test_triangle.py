import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from combbmm.bitmatrix import BoolMatrix, TripartiteGraph, bool_product
from combbmm.decompose import ab_decomposition
from combbmm.triangle import (CASES, FourRussiansParams, ListingParams, ListingStats, Triangle,
                              as_triangles, bmm_via_triangle, brute_force_triangles,
                              brute_force_triangles_scalar, count_triangles_exact,
                              default_step_budget, detect_triangle, enum_next, enum_preprocess,
                              four_russians_detect, four_russians_list, four_russians_product,
                              list_triangles, naive_detect_scalar, sparse_detect, sparse_list)

from strategies import graph_from, graphs, matrices, mixed_graph

COVER = ListingParams(Fraction(3, 4), Fraction(3, 4), Fraction(3, 4), 4, 1)

HAND = graph_from(
    [[1, 0], [1, 1]],          # A: X x Y
    [[0, 1, 1], [1, 0, 0]],    # B: Y x Z
    [[0, 1, 0], [1, 0, 1]],    # C: X x Z
)
HAND_TRIANGLES = [[0, 0, 1], [1, 0, 2], [1, 1, 0]]


def as_set(tri):
    return set(map(tuple, np.asarray(tri).tolist()))


# -- oracles -----------------------------------------------------------------


def test_hand_graph_frozen():
    assert brute_force_triangles(HAND).tolist() == HAND_TRIANGLES
    assert brute_force_triangles_scalar(HAND).tolist() == HAND_TRIANGLES
    assert count_triangles_exact(HAND) == 3
    assert as_triangles(brute_force_triangles(HAND))[0] == Triangle(0, 0, 1)


def test_complete_graph_count():
    G = TripartiteGraph.complete(2, 3, 4)
    assert brute_force_triangles(G).shape == (24, 3)
    assert count_triangles_exact(G) == 24


@given(graphs())
def test_oracles_agree(G):
    ref = brute_force_triangles_scalar(G)
    assert np.array_equal(brute_force_triangles(G), ref)
    assert count_triangles_exact(G) == ref.shape[0]
    assert np.array_equal(sparse_list(G), ref)
    w = sparse_detect(G)
    assert (w is not None) == (ref.shape[0] > 0)
    if w is not None:
        assert tuple(w) in as_set(ref)


def test_empty_parts():
    G = TripartiteGraph(BoolMatrix.zeros(0, 3), BoolMatrix.ones(3, 2), BoolMatrix.zeros(0, 2))
    assert brute_force_triangles(G).shape == (0, 3)
    assert not detect_triangle(G).found
    assert list_triangles(G).shape == (0, 3)
    assert list(enum_preprocess(G)) == []


# -- detection ---------------------------------------------------------------


@given(graphs(max_side=12), st.integers(2, 4), st.booleans())
def test_detect_matches_oracle(G, d, witness):
    res = detect_triangle(G, d=d, witness=witness)
    assert res.found == (brute_force_triangles(G).shape[0] > 0)
    assert not res.dense_shortcut
    if res.found and witness:
        x, y, z = res.witness
        assert G.A[x, y] and G.B[y, z] and G.C[x, z]


def test_dense_shortcut_when_premise_holds():
    G = TripartiteGraph.complete(6, 6, 6)
    res = detect_triangle(G, Fraction(1, 100), 200, witness=True)
    assert res.found and res.dense_shortcut
    x, y, z = res.witness
    assert G.A[x, y] and G.B[y, z] and G.C[x, z]


def test_precomputed_decomposition(rng):
    G = TripartiteGraph.random(10, 9, 8, 0.3, rng)
    dec = ab_decomposition(G.A, G.B, Fraction(1, 160), 3)
    assert detect_triangle(G, decomposition=dec).found == detect_triangle(G).found


def test_bmm_via_triangle(rng):
    for p in (0.05, 0.3, 0.8):
        A = BoolMatrix.random(11, 13, p, rng)
        B = BoolMatrix.random(13, 7, p, rng)
        st_ = {}
        assert bmm_via_triangle(A, B, stats=st_) == bool_product(A, B)
        assert st_["detections"] >= bool_product(A, B).nnz()
    with pytest.raises(ValueError):
        bmm_via_triangle(BoolMatrix.ones(2, 3), BoolMatrix.ones(2, 2))


@given(matrices(max_side=9), matrices(max_side=9), st.integers(1, 5))
def test_bmm_blocks_property(A, B, block):
    B = BoolMatrix.from_dense(np.resize(B.dense, (A.cols, B.cols)))
    assert bmm_via_triangle(A, B, block=block) == bool_product(A, B)


# -- Four-Russians -------------------------------------------------------------


@given(graphs(max_side=14), st.sampled_from([(1, 1), (4, 2), (8, 3), (16, 4), (5, 5)]))
def test_four_russians_list(G, sr):
    assert np.array_equal(four_russians_list(G, FourRussiansParams(*sr)), brute_force_triangles(G))


@given(matrices(max_side=70), matrices(max_side=70), st.integers(1, 9))
def test_four_russians_product(A, B, r):
    B = BoolMatrix.from_dense(np.resize(B.dense, (A.cols, B.cols)))
    assert four_russians_product(A, B, r) == bool_product(A, B)


@given(graphs(max_side=12))
def test_four_russians_and_scalar_detect(G):
    ref = as_set(brute_force_triangles(G))
    res = four_russians_detect(G)
    assert res.found == bool(ref)
    if res.found:
        assert tuple(res.witness) in ref
    w = naive_detect_scalar(G)
    assert (w is not None) == bool(ref)
    if w is not None:
        assert tuple(w) == min(ref)


def test_four_russians_params():
    assert FourRussiansParams.default(10) == FourRussiansParams(10, 8)
    assert FourRussiansParams.default(1000) == FourRussiansParams(64, 8)
    with pytest.raises(ValueError):
        FourRussiansParams(2, 3)


# -- listing -------------------------------------------------------------------


def test_desk_defaults_frozen():
    p = ListingParams.desk_defaults(64)
    assert p.L == 1 and p.gamma == Fraction(1, 200)
    # (log2 6)^2 / (36 / 200)
    assert abs(float(p.delta) - math.log2(6) ** 2 * 200 / 36) < 1e-5
    assert p.delta > 1
    assert ListingParams.gamma_for(Fraction(3, 4), 4) == Fraction(1, 8 * 2 * 36)


@given(graphs(max_side=12))
def test_list_desk_defaults(G):
    assert np.array_equal(list_triangles(G), brute_force_triangles(G))


@given(graphs(max_side=12), st.sampled_from([Fraction(1, 4), Fraction(3, 4)]), st.integers(1, 4),
       st.integers(0, 2))
def test_list_other_params(G, eps, d, H):
    params = ListingParams(eps, Fraction(3, 4), Fraction(3, 4), d, H, FourRussiansParams(4, 2))
    assert np.array_equal(list_triangles(G, params), brute_force_triangles(G))


def test_all_cases_reached():
    rng = np.random.default_rng(7)
    seen = Counter()
    for _ in range(3):
        G = mixed_graph(40, 0.95, 0.65, 0.6, 0.9, 0.1, rng)
        stats = ListingStats()
        assert np.array_equal(list_triangles(G, COVER, stats), brute_force_triangles(G))
        seen.update(stats.cases)
        assert stats.max_depth <= COVER.H
    G = TripartiteGraph.random(40, 40, 40, 0.5, rng)
    stats = ListingStats()
    assert np.array_equal(list_triangles(G, stats=stats), brute_force_triangles(G))
    seen.update(stats.cases)
    assert all(seen[c] > 0 for c in CASES), seen


def test_listing_param_validation():
    with pytest.raises(ValueError):
        ListingParams(Fraction(1), Fraction(1, 2), Fraction(1, 2), 3, 1)
    with pytest.raises(ValueError):
        ListingParams(Fraction(1, 2), Fraction(0), Fraction(1, 2), 3, 1)
    with pytest.raises(ValueError):
        ListingParams(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), 0, 1)


# -- enumeration ---------------------------------------------------------------


def test_default_budget_frozen():
    assert default_step_budget(4) == 17
    assert default_step_budget(Fraction(1, 2)) == 3


def _drain(e):
    out = []
    while (t := enum_next(e)) is not None:
        out.append(tuple(t))
        assert e.steps_last <= e.budget
    return out


@pytest.mark.parametrize("n,p", [(20, 0.3), (30, 0.9), (27, 0.6), (16, 1.0)])
def test_enumeration_exact_counting(n, p):
    rng = np.random.default_rng(n)
    G = TripartiteGraph.random(n, n, n, p, rng)
    e = enum_preprocess(G)
    out = _drain(e)
    assert Counter(out) == Counter(map(tuple, brute_force_triangles(G).tolist()))
    assert e.max_steps <= e.budget and e.overruns == 0
    assert enum_next(e) is None


def test_enumeration_heavy_streaming_uses_steps():
    G = TripartiteGraph.complete(30, 30, 30)
    e = enum_preprocess(G)
    assert len(e.heavy) > 1
    _drain(e)
    assert 0 < e.max_steps <= e.budget


def test_enumeration_sampled_counting_complete():
    rng = np.random.default_rng(3)
    G = TripartiteGraph.random(30, 30, 30, 0.8, rng)
    e = enum_preprocess(G, counting="sampled", samples=16, seed=2)
    assert sorted(_drain(e)) == sorted(map(tuple, brute_force_triangles(G).tolist()))


def test_enumeration_budget_validation():
    G = mixed_graph(36, 1.0, 1.0, 0.5, 1.0, 0.3, np.random.default_rng(0))
    with pytest.raises(ValueError, match="step budget"):
        enum_preprocess(G, budget=1, f=16)
    with pytest.raises(ValueError):
        enum_preprocess(G, counting="guess")
    with pytest.raises(ValueError):
        enum_preprocess(G, f=0)


def test_enumerator_iterates():
    assert sorted(tuple(t) for t in enum_preprocess(HAND)) == [tuple(t) for t in HAND_TRIANGLES]
