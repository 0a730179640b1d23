"""Representative (anchor) nodes from a coarse level and their constraints."""
import csv
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DegeneracyError, StructuralError, ValidationError
from .kmeans import KMeansConfig, kmeans


@dataclass(frozen=True)
class AnchorConfig:
    k: int = 2
    m: int = 30
    kmeans_restarts: int = 10
    kmeans_max_iters: int = 300
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValidationError("k must be >= 2")
        if self.m <= self.k:
            raise ValidationError(f"m={self.m} must exceed k={self.k}")

    @property
    def kmeans(self):
        return KMeansConfig(self.kmeans_restarts, self.kmeans_max_iters, self.seed)


@dataclass
class AnchorSet:
    """Representatives ``r_t`` with labels, the selector ``B`` and targets ``c``.

    ``c`` is stored as an ``m* x k`` 0/1 matrix whose column ``i`` is ``c_i``.
    """

    rep_nodes: np.ndarray
    rep_labels: np.ndarray
    n: int
    k: int

    @property
    def B(self):
        m = len(self.rep_nodes)
        return sp.csr_matrix((np.ones(m), (np.arange(m), self.rep_nodes)), shape=(m, self.n))

    @property
    def c(self):
        out = np.zeros((len(self.rep_nodes), self.k))
        out[np.arange(len(self.rep_nodes)), self.rep_labels] = 1.0
        return out

    def dump_csv(self, path, node_names=None):
        names = np.arange(self.n) if node_names is None else np.asarray(node_names)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["node_id", "label"])
            for r, lab in zip(self.rep_nodes.tolist(), self.rep_labels.tolist()):
                w.writerow([int(names[r]), lab])


def select_coarse_level(hierarchy, m):
    """Coarsest level with at least ``m`` nodes."""
    sizes = hierarchy.sizes if hasattr(hierarchy, "sizes") else list(hierarchy)
    if not sizes:
        raise ValidationError("empty hierarchy")
    for level in range(len(sizes) - 1, -1, -1):
        if sizes[level] >= m:
            return level
    raise ValidationError(f"graph has only {sizes[0]} nodes, fewer than m={m}; use a smaller m")


def coarse_spectral_embedding(Wc, k):
    """First ``k`` eigenvectors of the dense normalized Laplacian of ``Wc``."""
    W = Wc.W.toarray()
    d = W.sum(1)
    if (d <= 0).any():
        raise DegeneracyError(f"coarse node {int(np.flatnonzero(d <= 0)[0])} is isolated")
    s = 1.0 / np.sqrt(d)
    L = np.eye(len(d)) - s[:, None] * W * s[None, :]
    vals, vecs = np.linalg.eigh((L + L.T) * 0.5)
    return vals[:k], vecs[:, :k]


def spectral_cluster_coarse(Wc, k, cfg=None):
    """Label the coarse nodes with ``k`` spectral clusters (k-means on raw eigenvector rows)."""
    cfg = cfg or AnchorConfig(k=k, m=max(k + 1, 30))
    if Wc.n < k:
        raise ValidationError(f"coarse graph has {Wc.n} nodes, fewer than k={k}")
    _, U = coarse_spectral_embedding(Wc, k)
    return kmeans(U, k, cfg.kmeans)


def build_anchor_constraints(level, hierarchy, labels, k):
    """Map coarse-level labels back to original node ids as an AnchorSet."""
    labels = np.asarray(labels, dtype=np.int64)
    if len(np.unique(labels)) != k or labels.min() < 0 or labels.max() >= k:
        raise ValidationError(f"anchor labels must cover all of 0..{k - 1}")
    reps = hierarchy.original_ids(level)
    if len(reps) != len(labels) or len(np.unique(reps)) != len(reps):
        raise StructuralError("representative ids do not match the coarse level")
    return AnchorSet(rep_nodes=np.asarray(reps, dtype=np.int64), rep_labels=labels,
                     n=hierarchy[0].size, k=k)
