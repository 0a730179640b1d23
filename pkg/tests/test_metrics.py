import itertools
import json

import numpy as np
import pytest

from fairad import ClusterAssignment, GroupPartition, MetricsReport, compile_report, error_rate
from fairad import optimal_permutation
from fairad.errors import ValidationError
from fairad.metrics import confusion_matrix

from conftest import random_graph


def brute_force_error(pred, truth, k):
    n = len(pred)
    best = np.inf
    V = np.eye(k)[pred]
    Vs = np.eye(k)[truth]
    for perm in itertools.permutations(range(k)):
        U = np.eye(k)[list(perm)]
        best = min(best, np.linalg.norm(V @ U - Vs))
    return best / k if n else 0.0


def test_identity_and_permutation():
    truth = np.array([0, 1, 2, 0, 1, 2])
    assert error_rate(truth, truth, 3) == 0.0
    assert error_rate((truth + 1) % 3, truth, 3) == 0.0


def test_one_mismatch():
    assert error_rate([0, 0, 1, 0], [0, 0, 1, 1], 2) == pytest.approx(np.sqrt(2) / 2, rel=1e-15)


def test_confusion_validation():
    with pytest.raises(ValidationError):
        confusion_matrix([0, 1], [0], 2)
    with pytest.raises(ValidationError):
        confusion_matrix([0, 2], [0, 1], 2)


def test_optimal_permutation_fixtures():
    assert optimal_permutation(np.diag([5, 5])).tolist() == [0, 1]
    assert optimal_permutation(np.array([[0, 5], [5, 0]])).tolist() == [1, 0]


@pytest.mark.parametrize("seed", range(20))
def test_optimal_permutation_vs_enumeration(seed):
    C = np.random.default_rng(seed).integers(0, 10, (5, 5))
    perm = optimal_permutation(C)
    best = max(C[np.arange(5), list(p)].sum() for p in itertools.permutations(range(5)))
    assert C[np.arange(5), perm].sum() == best
    assert sorted(perm.tolist()) == list(range(5))


def test_optimal_permutation_lexicographic_tie():
    # every permutation is optimal -> identity
    assert optimal_permutation(np.ones((4, 4))).tolist() == [0, 1, 2, 3]


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_error_rate_vs_bruteforce(k):
    rng = np.random.default_rng(k)
    for _ in range(5):
        n = int(rng.integers(1, 30))
        pred, truth = rng.integers(0, k, n), rng.integers(0, k, n)
        assert error_rate(pred, truth, k) == pytest.approx(brute_force_error(pred, truth, k),
                                                           rel=1e-12, abs=1e-12)


def test_report_without_truth():
    rep = compile_report(ClusterAssignment(np.array([0, 1, 1]), 2))
    d = rep.to_dict()
    assert "error_rate" not in d and "average_balance" not in d
    assert d["cluster_sizes"] == [1, 2]


def test_report_full_roundtrip():
    g = random_graph(8, seed=1)
    p = GroupPartition(np.array([0, 1] * 4))
    a = ClusterAssignment(np.array([0, 0, 0, 0, 1, 1, 1, 1]), 2)
    rep = compile_report(a, p, g, np.array([0, 0, 0, 1, 1, 1, 1, 1]), {"x": 1.0})
    d = json.loads(rep.to_json())
    assert set(d) == {"error_rate", "average_balance", "per_cluster_balance", "ncut",
                      "cluster_sizes", "timings_ms"}
    assert d["error_rate"] >= 0 and d["average_balance"] == 1.0
    assert MetricsReport.from_dict(d) == rep


def test_report_size_mismatch():
    with pytest.raises(ValidationError):
        compile_report(ClusterAssignment(np.array([0, 1]), 2), truth=np.array([0, 1, 1]))
