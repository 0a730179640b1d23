"""Greedy weighted-aggregation coarsening of an affinity matrix.

Each level keeps a set of mutually weakly connected nodes (scanned in
descending volume order), interpolates every other node onto them in
proportion to its weights, and forms the Galerkin product ``P^T W P``.
"""
import json
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import StructuralError, ValidationError
from .graph import SparseGraph

log = logging.getLogger(__name__)

DROP_TOL = 1e-14
# coarse levels up to this size get a dense P^T W P (at most 128 MiB)
DENSE_GALERKIN_LIMIT = 4096


@dataclass(frozen=True)
class CoarseningConfig:
    alpha: float = 1e-4
    max_levels: int = 20
    min_coarse_size: int = 2

    def __post_init__(self):
        if not 0 <= self.alpha:
            raise ValidationError("alpha must be >= 0")
        if self.max_levels < 1:
            raise ValidationError("max_levels must be >= 1")


@dataclass
class Level:
    """One level of the hierarchy.

    ``nodes`` indexes into the previous level (``None`` at level 0), ``P``
    maps the previous level onto this one, and ``total_weight_galerkin`` is
    ``1^T P^T W P 1`` before the diagonal was removed.
    """

    graph: SparseGraph
    volumes: np.ndarray
    nodes: np.ndarray | None = None
    P: sp.csr_matrix | None = None
    total_weight_galerkin: float | None = None

    @property
    def size(self):
        return self.graph.n


@dataclass
class CoarseHierarchy:
    levels: list = field(default_factory=list)

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, i):
        return self.levels[i]

    @property
    def sizes(self):
        return [lv.size for lv in self.levels]

    @property
    def kappa(self):
        return len(self.levels) - 1

    def original_ids(self, level):
        """Original node ids of the nodes of ``level``, in level order."""
        ids = np.arange(self.levels[0].size)
        for lv in self.levels[1:level + 1]:
            if lv.nodes is None or lv.nodes.max(initial=-1) >= len(ids):
                raise StructuralError(f"broken index chain at level {level}")
            ids = ids[lv.nodes]
        return ids

    def summary(self):
        rows = []
        for i, lv in enumerate(self.levels):
            rows.append({
                "level": i,
                "nodes": lv.size,
                "edges": lv.graph.num_edges,
                "total_weight": float(lv.graph.W.sum()),
            })
        return rows

    def dump_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"levels": self.summary()}, fh, indent=2)


def volume_ordering(volumes):
    """Nodes by descending volume; ties keep ascending node id."""
    v = np.asarray(volumes, dtype=np.float64)
    return np.argsort(-v, kind="stable").astype(np.int64)


def coarsen_level(W_prev, order, alpha):
    """Greedy selection of 'sufficiently independent' nodes.

    Node ``i`` (in scan order) is kept when its largest weight to an already
    kept node is at most ``alpha`` times its full row sum. The first scanned
    node is always kept.
    """
    W = W_prev.W
    order = np.asarray(order, dtype=np.int64)
    if len(order) != W_prev.n:
        raise ValidationError("order must be a permutation of the nodes")
    return kernels.greedy_select(W.indptr, W.indices, W.data, order, W_prev.degrees, alpha)


def interpolation_matrix(W_prev, coarse):
    """Interpolation from ``len(coarse)`` coarse nodes onto all fine nodes.

    Column ``j`` is coarse node ``coarse[j]``. Coarse nodes get a unit row;
    every other row holds its weights to the coarse set, normalized to 1.
    """
    n = W_prev.n
    coarse = np.asarray(coarse, dtype=np.int64)
    col_of = np.full(n, -1, dtype=np.int64)
    col_of[coarse] = np.arange(len(coarse))
    W = W_prev.W.tocoo()
    keep = (col_of[W.col] >= 0) & (col_of[W.row] < 0)
    rows, cols, vals = W.row[keep], col_of[W.col[keep]], W.data[keep]
    denom = np.bincount(rows, weights=vals, minlength=n)
    fine = np.flatnonzero(col_of < 0)
    orphan = fine[denom[fine] <= 0]
    if len(orphan):
        raise StructuralError(f"fine node {int(orphan[0])} has no weight to the coarse set")
    vals = vals / denom[rows]
    rows = np.concatenate([rows, coarse])
    cols = np.concatenate([cols, np.arange(len(coarse))])
    vals = np.concatenate([vals, np.ones(len(coarse))])
    P = sp.csr_matrix((vals, (rows, cols)), shape=(n, len(coarse)))
    P.sort_indices()
    return P


def galerkin_product(W, P):
    """``P^T W P`` as CSR, diagonal kept.

    Small coarse levels are accumulated densely: there ``W P`` is nearly
    full and a sparse-sparse product spends its time on index bookkeeping.
    """
    W, P = sp.csr_matrix(W), sp.csr_matrix(P)
    if P.shape[1] <= DENSE_GALERKIN_LIMIT:
        P.sort_indices()
        return sp.csr_matrix(kernels.galerkin_dense(W, P))
    PT = P.T.tocsr()
    return (PT @ (W @ P)).tocsr()


def galerkin_coarse_affinity(W_prev, P, return_total=False):
    """Coarse affinity ``P^T W P`` with self-loops and tiny entries removed."""
    Wc = galerkin_product(W_prev.W, P)
    total = float(Wc.sum())
    Wc = Wc.tocoo()
    keep = (Wc.row != Wc.col) & (Wc.data >= DROP_TOL)
    Wc = sp.csr_matrix((Wc.data[keep], (Wc.row[keep], Wc.col[keep])), shape=Wc.shape)
    # P^T W P is symmetric in exact arithmetic; average out rounding
    Wc = (Wc + Wc.T) * 0.5
    g = SparseGraph.from_matrix(Wc, check_symmetric=False)
    return (g, total) if return_total else g


def build_hierarchy(W_alg, cfg=None):
    """Coarsen ``W_alg`` level by level.

    Stops after a level smaller than ``cfg.min_coarse_size``, when a scan
    keeps every node (that stagnant level is discarded), or after
    ``cfg.max_levels`` coarsening steps. Level 0 is ``W_alg`` itself.
    """
    cfg = cfg or CoarseningConfig()
    h = CoarseHierarchy([Level(graph=W_alg, volumes=np.ones(W_alg.n))])
    while h.kappa < cfg.max_levels and h[-1].size >= cfg.min_coarse_size:
        prev = h[-1]
        order = volume_ordering(prev.volumes)
        coarse = coarsen_level(prev.graph, order, cfg.alpha)
        if len(coarse) == prev.size:
            log.debug("no progress at level %d; stopping", h.kappa + 1)
            break
        P = interpolation_matrix(prev.graph, coarse)
        Wc, total = galerkin_coarse_affinity(prev.graph, P, return_total=True)
        nu = np.asarray(prev.volumes @ P).ravel()
        h.levels.append(Level(graph=Wc, volumes=nu, nodes=coarse, P=P,
                              total_weight_galerkin=total))
        log.debug("level %d: %d nodes, %d edges", h.kappa, Wc.n, Wc.num_edges)
    return h
