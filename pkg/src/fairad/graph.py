"""Sparse symmetric graphs, degrees, the normalized Laplacian and edge-list I/O."""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import ParseError, SingularityError, ValidationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SparseGraph:
    """Undirected weighted graph held as a symmetric CSR affinity matrix.

    Build instances with :meth:`from_matrix` or :meth:`from_edges`; both
    canonicalize the matrix (symmetric, zero diagonal, strictly positive
    stored weights) and freeze the underlying buffers.
    """

    W: sp.csr_matrix
    degrees: np.ndarray = field(repr=False)
    self_loops_dropped: int = 0

    @property
    def n(self):
        return self.W.shape[0]

    @property
    def num_edges(self):
        """Number of undirected edges."""
        return self.W.nnz // 2

    @classmethod
    def from_matrix(cls, W, check_symmetric=True, self_loops_dropped=0):
        W = sp.csr_matrix(W, dtype=np.float64)
        if W.shape[0] != W.shape[1]:
            raise ValidationError(f"affinity matrix must be square, got {W.shape}")
        W.sum_duplicates()
        if W.nnz and W.data.min() < 0:
            raise ValidationError("affinity weights must be nonnegative")
        if W.diagonal().any():
            C = W.tocoo()
            off = C.row != C.col
            W = sp.csr_matrix((C.data[off], (C.row[off], C.col[off])), shape=W.shape)
        W.eliminate_zeros()
        W.sort_indices()
        if check_symmetric and W.nnz:
            asym = abs(W - W.T)
            if asym.nnz and asym.max() > 1e-12 * max(W.max(), 1.0):
                raise ValidationError("affinity matrix is not symmetric")
        for arr in (W.data, W.indices, W.indptr):
            arr.flags.writeable = False
        d = np.asarray(W.sum(axis=1)).ravel()
        d.flags.writeable = False
        return cls(W=W, degrees=d, self_loops_dropped=self_loops_dropped)

    @classmethod
    def from_edges(cls, n, u, v, w=None):
        """Symmetric graph on ``n`` nodes; repeated pairs are summed."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.ones(len(u)) if w is None else np.asarray(w, dtype=np.float64)
        if len(u) and (w <= 0).any():
            raise ValidationError("edge weights must be positive")
        loops = u == v
        nloops = int(loops.sum())
        u, v, w = u[~loops], v[~loops], w[~loops]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        W = sp.coo_matrix((np.concatenate([w, w]), (rows, cols)), shape=(n, n))
        return cls.from_matrix(W.tocsr(), check_symmetric=False, self_loops_dropped=nloops)

    def edges(self):
        """Upper-triangle edge arrays ``(u, v, w)`` with ``u < v``."""
        U = sp.triu(self.W, k=1).tocoo()
        order = np.lexsort((U.col, U.row))
        return U.row[order].astype(np.int64), U.col[order].astype(np.int64), U.data[order]

    def subgraph(self, nodes):
        nodes = np.asarray(nodes, dtype=np.int64)
        return SparseGraph.from_matrix(self.W[nodes][:, nodes], check_symmetric=False)

    def with_weights(self, weights):
        """Same sparsity pattern, new per-entry weights (CSR data order)."""
        W = sp.csr_matrix((np.asarray(weights, dtype=np.float64),
                           self.W.indices.copy(), self.W.indptr.copy()), shape=self.W.shape)
        return SparseGraph.from_matrix(W, check_symmetric=False)


def degree_vector(g):
    """Row sums ``d_i = sum_j W_ij``; isolated nodes give 0."""
    return np.array(g.degrees)


def _inv_sqrt_degrees(g):
    d = g.degrees
    zero = np.flatnonzero(d <= 0)
    if len(zero):
        raise SingularityError(int(zero[0]))
    return 1.0 / np.sqrt(d)


class NormalizedLaplacian:
    """Matrix-free view of ``I - D^{-1/2} W D^{-1/2}`` over a graph."""

    def __init__(self, g):
        self.graph = g
        self.shape = g.W.shape
        self.dtype = np.dtype(np.float64)
        self._s = _inv_sqrt_degrees(g)

    def matvec(self, x):
        x = np.asarray(x, dtype=np.float64)
        s = self._s if x.ndim == 1 else self._s[:, None]
        return x - s * (self.graph.W @ (s * x))

    __matmul__ = matvec

    def to_sparse(self):
        """Assemble the operator as a sparse CSR matrix (never dense)."""
        S = sp.diags(self._s)
        N = (S @ self.graph.W @ S).tocsr()
        return (sp.identity(self.shape[0], format="csr") - N).tocsr()

    def to_dense(self):
        return self.to_sparse().toarray()


def normalized_laplacian_apply(g, x):
    return NormalizedLaplacian(g).matvec(x)


def largest_connected_component(g, labels=None):
    """Restrict ``g`` to its largest connected component.

    Ties in component size go to the component holding the smallest node id.

    Returns
    -------
    sub : SparseGraph
    old_ids : ndarray
        ``old_ids[new_id]`` is the node's id in ``g``; sorted ascending.
    labels : list or None
        Each entry of ``labels`` (per-node arrays) filtered with the same map.
    """
    ncomp, comp = connected_components(g.W, directed=False)
    if ncomp == 1:
        old_ids = np.arange(g.n)
        sub = g
    else:
        sizes = np.bincount(comp, minlength=ncomp)
        # component ids from scipy are assigned in order of first node seen,
        # so the first maximal one holds the smallest node id among the ties
        best = int(np.flatnonzero(sizes == sizes.max())[0])
        old_ids = np.flatnonzero(comp == best)
        sub = g.subgraph(old_ids)
        log.info("largest connected component keeps %d of %d nodes", len(old_ids), g.n)
    if labels is None:
        return sub, old_ids, None
    return sub, old_ids, [np.asarray(lab)[old_ids] for lab in labels]


def load_edge_list(path, delimiter=None, n=None):
    """Read an edge list of ``u v`` or ``u v w`` rows.

    Lines starting with ``#`` and blank lines are ignored. Node ids must be
    nonnegative integers; the graph spans ``0..max_id`` (or ``0..n-1`` when
    ``n`` is given and larger, for trailing isolated nodes). Repeated pairs are
    summed in both directions and self-loops are dropped (their count is
    kept on the result as ``self_loops_dropped``).
    """
    us, vs, ws = [], [], []
    max_id = -1
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(delimiter)
            parts = [p.strip() for p in parts if p.strip() != ""]
            if len(parts) not in (2, 3):
                raise ParseError(f"expected 2 or 3 fields, got {len(parts)}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"node ids must be integers: {line!r}", lineno) from None
            if u < 0 or v < 0:
                raise ParseError("node ids must be >= 0", lineno)
            w = 1.0
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ParseError(f"bad weight {parts[2]!r}", lineno) from None
                if not w > 0:
                    raise ValidationError(f"line {lineno}: weight must be positive, got {w}")
            us.append(u)
            vs.append(v)
            ws.append(w)
            max_id = max(max_id, u, v)
    g = SparseGraph.from_edges(max(max_id + 1, n or 0), us, vs, ws)
    if g.self_loops_dropped:
        log.warning("%s: dropped %d self-loop(s)", path, g.self_loops_dropped)
    return g


def save_edge_list(g, path, delimiter="\t", header=None):
    u, v, w = g.edges()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {header or 'undirected edge list'}: n={g.n} edges={len(u)}\n")
        for a, b, x in zip(u.tolist(), v.tolist(), w.tolist()):
            fh.write(f"{a}{delimiter}{b}{delimiter}{x!r}\n")


def write_id_map(path, old_ids):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("old_id,new_id\n")
        for new, old in enumerate(np.asarray(old_ids).tolist()):
            fh.write(f"{old},{new}\n")
