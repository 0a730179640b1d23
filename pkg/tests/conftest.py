import numpy as np
import pytest
import scipy.sparse as sp

from fairad import GroupPartition, SparseGraph


def random_graph(n, p=0.3, seed=0, weighted=True):
    """Connected random graph: a Hamiltonian path plus Erdos-Renyi edges."""
    rng = np.random.default_rng(seed)
    A = np.triu(rng.random((n, n)) < p, 1)
    A[np.arange(n - 1), np.arange(1, n)] = True
    u, v = np.nonzero(A)
    w = rng.uniform(0.5, 2.0, len(u)) if weighted else np.ones(len(u))
    return SparseGraph.from_edges(n, u, v, w)


def random_groups(n, h, seed=0):
    """Random partition with every group nonempty."""
    rng = np.random.default_rng(seed)
    g = np.concatenate([np.arange(h), rng.integers(0, h, n - h)])
    return GroupPartition(rng.permutation(g))


def path_graph(n):
    return SparseGraph.from_edges(n, np.arange(n - 1), np.arange(1, n))


def clique_pair(size, eps):
    """Two unit cliques of ``size`` nodes joined by one edge of weight ``eps``."""
    blocks = sp.block_diag([np.ones((size, size))] * 2).tolil()
    blocks[size - 1, size] = blocks[size, size - 1] = eps
    return SparseGraph.from_matrix(blocks.tocsr())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
