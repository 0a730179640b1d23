import numpy as np
import pytest
import scipy.sparse as sp

from fairad import (CoarseningConfig, SparseGraph, build_hierarchy, coarsen_level,
                    galerkin_coarse_affinity, interpolation_matrix, volume_ordering)
from fairad.coarsening import galerkin_product
from fairad.errors import StructuralError
from fairad.msbm import MsbmConfig, msbm_generate

from conftest import path_graph, random_graph


def test_select_all_when_alpha_large():
    g = random_graph(15, seed=1)
    assert sorted(coarsen_level(g, np.arange(15), 1.0).tolist()) == list(range(15))


def test_select_first_only_alpha_zero():
    tri = SparseGraph.from_edges(3, [0, 1, 2], [1, 2, 0])
    assert coarsen_level(tri, np.array([2, 0, 1]), 0.0).tolist() == [2]


def test_four_path_hand_trace():
    assert coarsen_level(path_graph(4), np.arange(4), 0.4).tolist() == [0, 2]


def test_four_path_interpolation():
    P = interpolation_matrix(path_graph(4), np.array([0, 2])).toarray()
    assert np.array_equal(P, [[1, 0], [0.5, 0.5], [0, 1], [0, 1]])


def test_interpolation_identity():
    g = random_graph(7, seed=2)
    P = interpolation_matrix(g, np.arange(7))
    assert (P != sp.identity(7)).nnz == 0


def test_interpolation_orphan():
    g = SparseGraph.from_edges(4, [0, 2], [1, 3])
    with pytest.raises(StructuralError):
        interpolation_matrix(g, np.array([0]))


def test_galerkin_four_path():
    g = path_graph(4)
    P = interpolation_matrix(g, np.array([0, 2]))
    dense = P.toarray().T @ g.W.toarray() @ P.toarray()
    Wc, total = galerkin_coarse_affinity(g, P, return_total=True)
    assert Wc.W[0, 1] == pytest.approx(dense[0, 1], rel=1e-15)
    assert Wc.W.diagonal().sum() == 0
    assert total == pytest.approx(dense.sum(), rel=1e-15)


def test_galerkin_identity_and_symmetry():
    g = random_graph(12, seed=3)
    assert (galerkin_coarse_affinity(g, sp.identity(12, format="csr")).W != g.W).nnz == 0
    P = interpolation_matrix(g, coarsen_level(g, volume_ordering(np.ones(12)), 0.1))
    Wc = galerkin_coarse_affinity(g, P).W
    assert abs(Wc - Wc.T).max() == 0


def test_volume_ordering():
    assert volume_ordering(np.ones(4)).tolist() == [0, 1, 2, 3]
    assert volume_ordering([1, 3, 2]).tolist() == [1, 2, 0]
    P = interpolation_matrix(path_graph(4), np.array([0, 2]))
    nu = np.ones(4) @ P.toarray()
    assert np.allclose(nu, [1.5, 2.5])
    assert volume_ordering(nu).tolist() == [1, 0]


def test_two_node_hierarchy():
    h = build_hierarchy(SparseGraph.from_edges(2, [0], [1]))
    assert h.sizes == [2, 1] and h.kappa == 1


def test_alpha_one_no_progress():
    h = build_hierarchy(random_graph(10, seed=4), CoarseningConfig(alpha=1.0))
    assert h.kappa == 0 and h.sizes == [10]


def check_hierarchy(h):
    sizes = h.sizes
    assert all(a > b for a, b in zip(sizes, sizes[1:]))
    for i in range(1, len(h)):
        prev, lv = h[i - 1], h[i]
        assert len(np.unique(lv.nodes)) == lv.size and lv.nodes.max() < prev.size
        P = lv.P
        assert np.allclose(np.asarray(P.sum(1)).ravel(), 1.0, rtol=0, atol=1e-12)
        assert (P.data >= 0).all()
        assert np.array_equal(P[lv.nodes].toarray(), np.eye(lv.size))
        before = float(prev.graph.W.sum())
        assert abs(lv.total_weight_galerkin - before) <= 1e-8 * before
        assert np.allclose(lv.volumes, np.asarray(prev.volumes @ P).ravel())
    ids = h.original_ids(len(h) - 1)
    assert len(np.unique(ids)) == len(ids)


@pytest.mark.parametrize("seed", range(8))
def test_hierarchy_invariants(seed):
    g = random_graph(60, p=0.08, seed=seed)
    check_hierarchy(build_hierarchy(g, CoarseningConfig(alpha=0.05)))


def test_hierarchy_deterministic():
    g = random_graph(80, p=0.1, seed=3)
    a, b = build_hierarchy(g, CoarseningConfig(alpha=0.05)), build_hierarchy(g, CoarseningConfig(alpha=0.05))
    assert a.sizes == b.sizes
    for x, y in zip(a.levels[1:], b.levels[1:]):
        assert np.array_equal(x.nodes, y.nodes) and (x.graph.W != y.graph.W).nnz == 0


def test_two_block_aggregates_cover_blocks():
    inst = msbm_generate(MsbmConfig(n=64, h=1, k=2, a=0.5, b=0.5, c=0.02, d=0.02, seed=3))
    h = build_hierarchy(inst.graph, CoarseningConfig(alpha=0.05))
    check_hierarchy(h)
    level = len(h) - 1
    while h[level].size < 2:
        level -= 1
    # majority block of each aggregate, via the composed interpolation
    M = sp.identity(64, format="csr")
    for lv in h.levels[1:level + 1]:
        M = M @ lv.P
    onehot = np.eye(2)[inst.truth]
    share = (M.T @ onehot).argmax(1)
    assert set(share.tolist()) == {0, 1}


def test_galerkin_product_matches_dense():
    g = random_graph(9, seed=8)
    P = interpolation_matrix(g, coarsen_level(g, np.arange(9), 0.2))
    assert P.shape[1] < 9
    ref = P.toarray().T @ g.W.toarray() @ P.toarray()
    assert np.allclose(galerkin_product(g.W, P).toarray(), ref, rtol=1e-14)
