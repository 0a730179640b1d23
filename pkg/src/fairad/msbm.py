"""Modified stochastic block model with planted fair clusters.

Node ``t`` belongs to cluster ``t mod k`` and group ``(t // k) mod h``, so
every (group, cluster) cell has ``n/(hk)`` nodes up to one. An edge appears
with probability ``a`` (same group, same cluster), ``b`` (same group, other
cluster), ``c`` (other group, same cluster) or ``d`` (neither).
"""
import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from ._rng import stream
from .errors import ParseError, ValidationError
from .fairness import GroupPartition, load_groups, save_groups
from .graph import SparseGraph, load_edge_list, save_edge_list


def default_probabilities(n):
    """``(10t, 7t, 4t, t)`` with ``t = (ln n / n)^(2/3)``, clamped to 1."""
    t = (math.log(n) / n) ** (2.0 / 3.0)
    return tuple(min(f * t, 1.0) for f in (10.0, 7.0, 4.0, 1.0))


@dataclass(frozen=True)
class MsbmConfig:
    n: int
    h: int = 2
    k: int = 2
    a: float | None = None
    b: float | None = None
    c: float | None = None
    d: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.h < 1 or self.k < 1:
            raise ValidationError("h and k must be >= 1")
        if self.n < self.h * self.k:
            raise ValidationError(f"n={self.n} must be at least h*k={self.h * self.k}")
        for name, p in zip("abcd", self.probabilities):
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"probability {name}={p} outside [0, 1]")

    @property
    def probabilities(self):
        defaults = default_probabilities(max(self.n, 2))
        given = (self.a, self.b, self.c, self.d)
        return tuple(float(g if g is not None else dflt) for g, dflt in zip(given, defaults))


@dataclass
class MsbmInstance:
    graph: SparseGraph
    groups: GroupPartition
    truth: np.ndarray
    config: MsbmConfig | None = None


def planted_labels(n, h, k):
    t = np.arange(n)
    return (t // k) % h, t % k


def _unrank_upper(q, s):
    """Map indices ``q`` in ``[0, s(s-1)/2)`` to pairs ``i < j`` of ``range(s)`` (row-major)."""
    q = np.asarray(q, dtype=np.int64)
    # row i starts at i*(2s-i-1)/2; invert with a float guess, then fix rounding
    start = lambda i: i * (2 * s - i - 1) // 2  # noqa: E731
    i = np.floor((2 * s - 1 - np.sqrt((2 * s - 1) ** 2 - 8.0 * q)) / 2).astype(np.int64)
    i = np.clip(i, 0, max(s - 2, 0))
    while True:
        hi = start(i + 1) <= q
        lo = start(i) > q
        if not (hi.any() or lo.any()):
            break
        i = i + hi - lo
    j = q - start(i) + i + 1
    return i, j


def _sample_block(rng, A, B, p, same):
    """Independent Bernoulli(p) edges between node arrays A and B (A == B if ``same``)."""
    if p <= 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    if same:
        s = len(A)
        N = s * (s - 1) // 2
    else:
        N = len(A) * len(B)
    if N == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    K = N if p >= 1 else int(rng.binomial(N, p))
    idx = np.arange(N) if K == N else np.sort(rng.choice(N, size=K, replace=False))
    if same:
        i, j = _unrank_upper(idx, len(A))
        return A[i], A[j]
    return A[idx // len(B)], B[idx % len(B)]


def msbm_generate(cfg):
    """Sample an mSBM graph; each unordered node pair is drawn once."""
    n, h, k = cfg.n, cfg.h, cfg.k
    a, b, c, d = cfg.probabilities
    group, cluster = planted_labels(n, h, k)
    cells = [(s, l) for s in range(h) for l in range(k)]
    members = {cell: np.flatnonzero((group == cell[0]) & (cluster == cell[1])) for cell in cells}
    rng = stream(cfg.seed, "msbm")
    us, vs = [], []
    for x, (s1, l1) in enumerate(cells):
        for (s2, l2) in cells[x:]:
            p = {(True, True): a, (True, False): b, (False, True): c, (False, False): d}[
                (s1 == s2, l1 == l2)]
            u, v = _sample_block(rng, members[s1, l1], members[s2, l2], p, (s1, l1) == (s2, l2))
            us.append(u)
            vs.append(v)
    g = SparseGraph.from_edges(n, np.concatenate(us), np.concatenate(vs))
    return MsbmInstance(graph=g, groups=GroupPartition(group), truth=cluster, config=cfg)


def write_instance(inst, directory):
    """Write ``edges.tsv``, ``groups.txt`` and ``truth.txt`` into ``directory``."""
    os.makedirs(directory, exist_ok=True)
    save_edge_list(inst.graph, os.path.join(directory, "edges.tsv"), header="mSBM edge list")
    save_groups(os.path.join(directory, "groups.txt"), inst.groups.group_of)
    save_groups(os.path.join(directory, "truth.txt"), inst.truth)
    return [os.path.join(directory, f) for f in ("edges.tsv", "groups.txt", "truth.txt")]


def read_instance(directory):
    groups = load_groups(os.path.join(directory, "groups.txt"))
    truth = load_labels(os.path.join(directory, "truth.txt"))
    g = load_edge_list(os.path.join(directory, "edges.tsv"), delimiter="\t", n=groups.n)
    return MsbmInstance(graph=g, groups=groups, truth=truth)


def load_labels(path):
    """One integer label per line; blank lines and ``#`` comments are skipped."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise ParseError(f"label must be an integer: {line!r}", lineno) from None
    return np.array(out, dtype=np.int64)


def config_dict(cfg):
    out = asdict(cfg)
    out["a"], out["b"], out["c"], out["d"] = cfg.probabilities
    return out


def write_manifest(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
