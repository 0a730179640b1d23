"""Plain spectral clustering on the normalized Laplacian, and the NCut value."""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ._rng import stream
from .errors import SolverError, ValidationError
from .graph import NormalizedLaplacian
from .kmeans import KMeansConfig, kmeans
from .solver import ClusterAssignment

DENSE_LIMIT = 500


@dataclass(frozen=True)
class SCConfig:
    k: int = 2
    eig_tol: float = 1e-8
    eig_max_iters: int | None = None
    kmeans_restarts: int = 10
    kmeans_max_iters: int = 300
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValidationError("k must be >= 2")


def smallest_eigenpairs(g, k, tol=1e-8, max_iters=None, seed=0):
    """``k`` smallest eigenpairs of the normalized Laplacian of ``g``.

    Graphs up to ``DENSE_LIMIT`` nodes use a dense symmetric solver. Larger
    ones run Lanczos (ARPACK) on ``D^{-1/2} W D^{-1/2}``, whose largest
    eigenvalues are ``1 - lambda`` for the smallest ``lambda`` of the
    Laplacian. Every returned pair satisfies ``||L v - lambda v|| <= tol``.
    """
    L = NormalizedLaplacian(g)
    if g.n <= DENSE_LIMIT:
        vals, vecs = np.linalg.eigh(L.to_dense())
        vals, vecs = vals[:k], vecs[:, :k]
    else:
        s = L._s
        N = (sp.diags(s) @ g.W @ sp.diags(s)).tocsr()
        v0 = stream(seed, "eigs").uniform(0.5, 1.5, size=g.n)
        ncv = min(g.n, max(2 * k + 1, 20))
        try:
            mu, vecs = spla.eigsh(N, k=k, which="LA", tol=tol * 1e-2, v0=v0, ncv=ncv,
                                  maxiter=max_iters or 100 * g.n)
        except spla.ArpackNoConvergence as exc:
            raise SolverError(f"Lanczos did not converge; {len(exc.eigenvalues)} of {k} pairs found") from exc
        order = np.argsort(-mu, kind="stable")
        vals, vecs = 1.0 - mu[order], vecs[:, order]
    res = np.linalg.norm(L.matvec(vecs) - vecs * vals[None, :], axis=0)
    if (res > tol).any():
        raise SolverError(f"eigenpair residuals {res.max():.2e} exceed tol {tol:.1e}",
                          residual=float(res.max()))
    return vals, vecs


def run_sc(g, cfg):
    """Spectral clustering: k-means on the rows of the first ``k`` eigenvectors."""
    _, U = smallest_eigenpairs(g, cfg.k, cfg.eig_tol, cfg.eig_max_iters, cfg.seed)
    labels = kmeans(U, cfg.k, KMeansConfig(cfg.kmeans_restarts, cfg.kmeans_max_iters, cfg.seed))
    return ClusterAssignment(labels=labels, k=cfg.k)


def ncut_value(g, assignment, k=None):
    """``(1/2) sum_l cut(C_l, rest) / vol(C_l)``."""
    labels = np.asarray(getattr(assignment, "labels", assignment), dtype=np.int64)
    if k is None:
        k = getattr(assignment, "k", None) or int(labels.max()) + 1
    W = g.W.tocoo()
    crossing = labels[W.row] != labels[W.col]
    cut = np.bincount(labels[W.row[crossing]], weights=W.data[crossing], minlength=k)
    vol = np.bincount(labels, weights=g.degrees, minlength=k)
    present = np.bincount(labels, minlength=k) > 0
    if (vol[present] <= 0).any():
        raise ValidationError("a cluster has zero volume")
    if not present.all():
        raise ValidationError("a cluster is empty")
    return float(0.5 * (cut / vol).sum())
