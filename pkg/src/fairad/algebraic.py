"""Fairness-constrained test vectors and the algebraic-distance affinity.

Each test vector is a random start smoothed by ``tau`` Jacobi sweeps on
``L x = 0`` where every sweep is replaced by one augmented-Lagrangian Uzawa
step with ``lambda^0 = 0``::

    x^t = (D + mu F F^T)^{-1} W x^{t-1}

The inverse is applied through the Woodbury identity, so a sweep costs one
sparse mat-vec plus ``O(n h)`` dense work.
"""
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import kernels
from ._rng import stream
from .errors import NumericalError, SingularityError, ValidationError


@dataclass(frozen=True)
class RelaxationConfig:
    R: int = 10
    tau: int = 10
    mu: float = 1e9
    beta: float | None = None  # None -> n / ln(n), resolved per graph
    seed: int = 0
    normalize: bool = True

    def __post_init__(self):
        if self.R < 1 or self.tau < 1:
            raise ValidationError("R and tau must be >= 1")
        if not self.mu > 0:
            raise ValidationError("mu must be positive")
        if self.beta is not None and not self.beta > 0:
            raise ValidationError("beta must be positive")

    def resolved_beta(self, n):
        return self.beta if self.beta is not None else default_beta(n)


def default_beta(n):
    """``n / ln n``; graphs with fewer than 3 nodes get 1."""
    return n / math.log(n) if n > 2 else 1.0


class Woodbury:
    """Precomputed ``(D + mu F F^T)^{-1}`` for a fixed degree vector.

    ``F^T D^{-1} F`` and the Cholesky factor of ``I/mu + F^T D^{-1} F`` are
    built once; :meth:`apply` then costs ``O(n h)``.
    """

    def __init__(self, d, F, mu):
        d = np.asarray(d, dtype=np.float64)
        bad = np.flatnonzero(~(d > 0))
        if len(bad):
            raise SingularityError(int(bad[0]))
        if mu < 0:
            raise ValidationError("mu must be >= 0")
        self.dinv = 1.0 / d
        F = np.asarray(F, dtype=np.float64).reshape(len(d), -1)
        self.F = F
        self.mu = float(mu)
        self.active = F.shape[1] > 0 and mu > 0
        if self.active:
            self.DinvF = F * self.dinv[:, None]
            G = F.T @ self.DinvF
            self.gamma0 = float(np.linalg.eigvalsh(G)[0])
            inner = G + np.eye(F.shape[1]) / self.mu
            try:
                self._chol = sla.cho_factor(inner, lower=True)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(f"Woodbury inner matrix is singular: {exc}") from exc

    def apply(self, b):
        y = self.dinv * b if b.ndim == 1 else self.dinv[:, None] * b
        if not self.active:
            return y
        z = sla.cho_solve(self._chol, self.F.T @ y)
        return y - self.DinvF @ z


def woodbury_apply(d, F, mu, b):
    """``(D + mu F F^T)^{-1} b`` via the Woodbury identity."""
    return Woodbury(d, F, mu).apply(np.asarray(b, dtype=np.float64))


def initial_vector(n, seed, r):
    return stream(seed, "testvec", r).uniform(-0.5, 0.5, size=n)


def constrained_jacobi(g, F, cfg, r, x0=None, solver=None):
    """Run ``cfg.tau`` constrained Jacobi sweeps from the seeded start ``r``.

    Returns the raw ``x^tau`` (no rescaling).
    """
    solver = solver or Woodbury(g.degrees, F, cfg.mu)
    x = initial_vector(g.n, cfg.seed, r) if x0 is None else np.array(x0, dtype=np.float64)
    for t in range(1, cfg.tau + 1):
        x = solver.apply(g.W @ x)
        if not np.isfinite(x).all():
            raise NumericalError(f"non-finite entries after constrained Jacobi sweep {t}")
    return x


def compute_test_vectors(g, F, cfg):
    """The ``n x R`` matrix of relaxed test vectors.

    With ``cfg.normalize`` each vector is divided by the 2-norm of its
    mean-free part. This is a positive rescaling, so the constraint
    ``F^T x = 0`` and all distance orderings are untouched; it only fixes
    the scale that ``beta`` acts on.
    """
    solver = Woodbury(g.degrees, F, cfg.mu)
    # all R sweeps advance together: one pass over W per sweep instead of R
    X = np.column_stack([initial_vector(g.n, cfg.seed, r) for r in range(cfg.R)])
    for t in range(1, cfg.tau + 1):
        X = solver.apply(kernels.csr_matmat(g.W, X))
        if not np.isfinite(X).all():
            raise NumericalError(f"non-finite entries after constrained Jacobi sweep {t}")
    if cfg.normalize:
        scale = np.linalg.norm(X - X.mean(0), axis=0)
        X = X / np.where(scale > 0, scale, 1.0)
    return np.ascontiguousarray(X)


def algebraic_distance(X, i, j):
    """``max_r |X[i, r] - X[j, r]|``."""
    return float(np.max(np.abs(X[i] - X[j])))


def edge_distances(g, X):
    """Algebraic distance for every stored entry of ``g.W`` (CSR order)."""
    W = g.W
    rows = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(W.indptr))
    return kernels.edge_max_absdiff(rows, W.indices.astype(np.int64), X)


def build_algebraic_affinity(g, X, beta):
    """Reweight every edge of ``g`` by ``exp(-beta * s(i, j))``.

    Non-edges stay non-edges. Weights that would underflow are floored at
    the smallest normal double so the sparsity pattern is preserved.
    """
    if not beta > 0:
        raise ValidationError("beta must be positive")
    s = edge_distances(g, X)
    w = np.exp(-beta * s)
    np.maximum(w, np.finfo(np.float64).tiny, out=w)
    return g.with_weights(w)

