import numpy as np
import pytest

from fairad import ClusterAssignment, SCConfig, SparseGraph, error_rate, ncut_value, run_sc
from fairad.baseline import smallest_eigenpairs
from fairad.msbm import MsbmConfig, msbm_generate

from conftest import clique_pair, random_graph


def test_sc_separates_cliques():
    lab = run_sc(clique_pair(8, 1e-6), SCConfig(k=2)).labels
    assert len(set(lab[:8])) == 1 and len(set(lab[8:])) == 1 and lab[0] != lab[8]


def test_sc_two_block_sbm():
    errs = []
    for seed in range(10):
        inst = msbm_generate(MsbmConfig(n=100, h=1, k=2, a=0.5, b=0.01, c=0.0, d=0.0, seed=seed))
        errs.append(error_rate(run_sc(inst.graph, SCConfig(k=2, seed=seed)), inst.truth, 2))
    assert np.mean(errs) <= 0.02


def test_sc_fails_on_group_structured_msbm():
    inst = msbm_generate(MsbmConfig(n=400, h=2, k=2, seed=0))
    assert error_rate(run_sc(inst.graph, SCConfig(k=2)), inst.truth, 2) >= 0.15


def test_sc_deterministic():
    g = random_graph(50, p=0.2, seed=4)
    assert np.array_equal(run_sc(g, SCConfig(k=3, seed=1)).labels,
                          run_sc(g, SCConfig(k=3, seed=1)).labels)


def test_lanczos_matches_dense():
    inst = msbm_generate(MsbmConfig(n=700, h=2, k=2, seed=1))
    vals, vecs = smallest_eigenpairs(inst.graph, 3, tol=1e-8, seed=0)
    W = inst.graph.W.toarray()
    d = W.sum(1)
    dense = np.linalg.eigvalsh(np.eye(700) - W / np.sqrt(np.outer(d, d)))[:3]
    assert np.allclose(vals, dense, atol=1e-8)
    assert np.allclose(vecs.T @ vecs, np.eye(3), atol=1e-8)


def test_ncut_values():
    g = SparseGraph.from_edges(4, [0, 2], [1, 3])
    assert ncut_value(g, np.array([0, 0, 1, 1])) == 0.0
    k2 = SparseGraph.from_edges(2, [0], [1])
    assert ncut_value(k2, np.array([0, 1])) == 1.0
    assert ncut_value(random_graph(6), ClusterAssignment(np.zeros(6, dtype=int), 1)) == 0.0
