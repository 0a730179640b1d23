import numpy as np
import pytest

from fairad.errors import ValidationError
from fairad.msbm import (MsbmConfig, _unrank_upper, default_probabilities, msbm_generate,
                         planted_labels, read_instance, write_instance)


def test_planted_cells_balanced():
    group, cluster = planted_labels(103, 3, 4)
    counts = np.zeros((3, 4), dtype=int)
    np.add.at(counts, (group, cluster), 1)
    assert counts.max() - counts.min() <= 1


@pytest.mark.parametrize("s", [2, 3, 7, 50])
def test_unrank_matches_triu(s):
    N = s * (s - 1) // 2
    i, j = _unrank_upper(np.arange(N), s)
    ti, tj = np.triu_indices(s, 1)
    assert np.array_equal(i, ti) and np.array_equal(j, tj)


def test_unrank_large_indices():
    s = 100_000
    q = np.array([0, s - 2, s - 1, s * (s - 1) // 2 - 1])
    i, j = _unrank_upper(q, s)
    assert list(zip(i.tolist(), j.tolist())) == [(0, 1), (0, s - 1), (1, 2), (s - 2, s - 1)]


def test_complete_and_empty():
    g = msbm_generate(MsbmConfig(n=12, h=2, k=3, a=1, b=1, c=1, d=1)).graph
    assert g.num_edges == 66
    assert msbm_generate(MsbmConfig(n=12, h=2, k=3, a=0, b=0, c=0, d=0)).graph.num_edges == 0


def test_config_validation():
    with pytest.raises(ValidationError):
        MsbmConfig(n=10, h=4, k=3)
    with pytest.raises(ValidationError):
        MsbmConfig(n=10, a=1.5)


def test_default_probabilities_order():
    a, b, c, d = default_probabilities(2000)
    assert a > b > c > d > 0
    assert a == pytest.approx(10 * d)


def test_seeded():
    cfg = MsbmConfig(n=200, h=2, k=2, seed=5)
    assert (msbm_generate(cfg).graph.W != msbm_generate(cfg).graph.W).nnz == 0
    other = msbm_generate(MsbmConfig(n=200, h=2, k=2, seed=6)).graph.W
    assert (msbm_generate(cfg).graph.W != other).nnz > 0


def test_density_same_cell():
    a = default_probabilities(2000)[0]
    hits = total = 0
    for seed in range(20):
        inst = msbm_generate(MsbmConfig(n=2000, h=2, k=2, seed=seed))
        u, v, _ = inst.graph.edges()
        g, c = inst.groups.group_of, inst.truth
        hits += int(((g[u] == g[v]) & (c[u] == c[v])).sum())
        sizes = np.bincount(g * 2 + c)
        total += int((sizes * (sizes - 1) // 2).sum())
    se = np.sqrt(a * (1 - a) / total)
    assert abs(hits / total - a) <= 3 * se


def test_roundtrip(tmp_path):
    inst = msbm_generate(MsbmConfig(n=60, h=3, k=2, seed=1))
    write_instance(inst, tmp_path)
    back = read_instance(tmp_path)
    assert (back.graph.W != inst.graph.W).nnz == 0
    assert np.array_equal(back.groups.group_of, inst.groups.group_of)
    assert np.array_equal(back.truth, inst.truth)


def test_empty_instance_files(tmp_path):
    inst = msbm_generate(MsbmConfig(n=12, h=2, k=3, a=0, b=0, c=0, d=0))
    write_instance(inst, tmp_path)
    lines = (tmp_path / "edges.tsv").read_text().splitlines()
    assert all(ln.startswith("#") for ln in lines)
    assert len((tmp_path / "groups.txt").read_text().splitlines()) == 12
    assert len((tmp_path / "truth.txt").read_text().splitlines()) == 12
