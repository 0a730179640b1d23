import numpy as np
import pytest

from fairad import (AnchoredSystem, FairADConfig, GroupPartition, SparseGraph, assign_labels,
                    average_balance, error_rate, run_fairad, solve_indicator)
from fairad.anchors import AnchorSet
from fairad.errors import StageError, ValidationError
from fairad.msbm import MsbmConfig, msbm_generate

from conftest import clique_pair, random_graph


def dense_indicator(system, i):
    return np.linalg.solve(system.A.toarray(), system.rhs(i))


def anchors_for(reps, labels, n, k):
    return AnchorSet(rep_nodes=np.asarray(reps), rep_labels=np.asarray(labels), n=n, k=k)


def test_clique_pair_indicator():
    g = clique_pair(6, 1e-9)
    system = AnchoredSystem(g, anchors_for([0, 11], [0, 1], 12, 2), 1e9)
    v = solve_indicator(system, 0)
    assert np.abs(v[:6] - 1).max() < 1e-3 and np.abs(v[6:]).max() < 1e-3
    assert np.linalg.norm(v - dense_indicator(system, 0)) <= 1e-6 * np.linalg.norm(v)


@pytest.mark.parametrize("seed", range(5))
def test_indicator_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    n, k = 30, 3
    g = random_graph(n, p=0.15, seed=seed)
    reps = rng.choice(n, 6, replace=False)
    system = AnchoredSystem(g, anchors_for(reps, np.arange(6) % k, n, k), 1e9)
    for i in range(k):
        v, info = solve_indicator(system, i, return_info=True)
        ref = dense_indicator(system, i)
        assert np.linalg.norm(v - ref) <= 1e-6 * np.linalg.norm(ref)
        assert info.residual <= 1e-8
        mine = reps[np.arange(6) % k == i]
        assert (v[mine] >= 0.99).all()


def test_empty_anchor_set_rejected():
    g = random_graph(5)
    with pytest.raises(ValidationError):
        AnchoredSystem(g, anchors_for(np.array([], dtype=int), np.array([], dtype=int), 5, 2), 1e9)


def test_cluster_without_anchor_rejected():
    g = random_graph(5)
    system = AnchoredSystem(g, anchors_for([0, 1], [0, 0], 5, 2), 1e9)
    with pytest.raises(ValidationError):
        solve_indicator(system, 1)


def test_assign_labels():
    assert assign_labels([[0.1, 0.9]]).labels.tolist() == [1]
    assert assign_labels([[0.5, 0.5]]).labels.tolist() == [0]
    assert assign_labels(np.eye(4)).labels.tolist() == [0, 1, 2, 3]
    with pytest.raises(ValidationError):
        assign_labels([[np.nan, 1.0]])


def test_fairad_msbm_small():
    inst = msbm_generate(MsbmConfig(n=400, h=2, k=2, seed=0))
    a, diag = run_fairad(inst.graph, inst.groups, 2)
    assert error_rate(a, inst.truth, 2) <= 0.05
    assert max(diag["fairness_residuals"]) <= 1e-5
    assert set(diag["timings_ms"]) >= {"test_vectors", "coarsening", "solve"}


def test_fairad_two_fair_communities():
    # two dense communities, each holding both groups, joined by a few edges
    rng = np.random.default_rng(0)
    n = 80
    comm = np.repeat([0, 1], n // 2)
    A = np.triu(rng.random((n, n)) < np.where(comm[:, None] == comm[None, :], 0.5, 0.01), 1)
    u, v = np.nonzero(A)
    g = SparseGraph.from_edges(n, u, v)
    p = GroupPartition(np.tile([0, 1], n // 2))
    a, _ = run_fairad(g, p, 2)
    assert error_rate(a, comm, 2) == 0.0
    planted = average_balance(p, comm, 2)
    assert average_balance(p, a) >= 0.95 * planted


def test_fairad_deterministic():
    inst = msbm_generate(MsbmConfig(n=300, h=2, k=3, seed=2))
    a1, _ = run_fairad(inst.graph, inst.groups, 3)
    a2, _ = run_fairad(inst.graph, inst.groups, 3)
    assert np.array_equal(a1.labels, a2.labels)
    assert np.array_equal(a1.indicators, a2.indicators)


def test_fairad_too_small_for_m():
    g = random_graph(20)
    p = GroupPartition(np.arange(20) % 2)
    with pytest.raises(StageError) as info:
        run_fairad(g, p, 2, FairADConfig(m=30))
    assert info.value.stage == "level_selection"
    assert isinstance(info.value.cause, ValidationError)


def test_fairad_artifacts():
    inst = msbm_generate(MsbmConfig(n=200, h=2, k=2, seed=1))
    art = {}
    run_fairad(inst.graph, inst.groups, 2, artifacts=art)
    assert set(art) == {"test_vectors", "affinity", "hierarchy", "anchors"}
    assert art["test_vectors"].shape == (200, 10)


def test_penalty_consistency():
    g = random_graph(40, p=0.15, seed=11)
    reps, labels = np.array([0, 7, 19, 33]), np.array([0, 1, 0, 1])
    dev = []
    for mu in (1e3, 1e6, 1e9):
        system = AnchoredSystem(g, anchors_for(reps, labels, 40, 2), mu)
        dev.append(max(np.abs(solve_indicator(system, i)[reps] - (labels == i)).max()
                       for i in range(2)))
    assert dev[0] >= dev[1] >= dev[2]


def test_indicators_sum_to_one_on_components():
    import scipy.sparse as sp
    blocks = sp.block_diag([np.ones((5, 5)) - np.eye(5)] * 3).tocsr()
    g = SparseGraph.from_matrix(blocks)
    system = AnchoredSystem(g, anchors_for([0, 6, 12], [0, 1, 2], 15, 3), 1e9)
    V = np.column_stack([solve_indicator(system, i) for i in range(3)])
    assert np.abs(V.sum(1) - 1).max() <= 1e-3


def test_block_solve_matches_single():
    from fairad import solve_indicators
    g = random_graph(60, p=0.1, seed=12)
    system = AnchoredSystem(g, anchors_for([1, 9, 20, 44, 50], [0, 1, 2, 0, 1], 60, 3), 1e9)
    V, infos = solve_indicators(system)
    for i in range(3):
        ref = np.linalg.solve(system.A.toarray(), system.rhs(i))
        assert np.linalg.norm(V[:, i] - ref) <= 1e-6 * np.linalg.norm(ref)
        assert infos[i].residual <= 1e-8
