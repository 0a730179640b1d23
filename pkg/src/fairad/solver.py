"""Anchored constrained cut: one Uzawa step per cluster, then argmax labels."""
import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .algebraic import RelaxationConfig, build_algebraic_affinity, compute_test_vectors
from .anchors import (AnchorConfig, build_anchor_constraints, select_coarse_level,
                      spectral_cluster_coarse)
from .coarsening import CoarseningConfig, build_hierarchy
from .errors import FairADError, SolverError, StageError, ValidationError
from .fairness import build_fairness_matrix, fairness_residual
from .graph import NormalizedLaplacian

log = logging.getLogger(__name__)


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    k: int
    indicators: np.ndarray | None = None

    @property
    def sizes(self):
        return np.bincount(self.labels, minlength=self.k)

    @property
    def degenerate(self):
        return bool((self.sizes == 0).any())


def assign_labels(indicators):
    """Row-wise argmax of an ``n x k`` indicator matrix (ties -> lowest index)."""
    V = np.asarray(indicators, dtype=np.float64)
    if not np.isfinite(V).all():
        raise ValidationError("indicators must be finite")
    return ClusterAssignment(labels=V.argmax(1).astype(np.int64), k=V.shape[1], indicators=V)


class AnchoredSystem:
    """``A = Lbar + mu B^T B`` with right-hand sides ``mu B^T c_i``.

    ``B^T B`` is diagonal (distinct anchors), so it is added as ``mu`` on
    the anchor diagonal entries; ``A`` stays sparse.
    """

    def __init__(self, g, anchors, mu):
        if len(anchors.rep_nodes) == 0:
            raise ValidationError("anchored system needs at least one anchor")
        if not mu > 0:
            raise ValidationError("mu must be positive")
        self.mu = float(mu)
        self.anchors = anchors
        self.n = g.n
        L = NormalizedLaplacian(g).to_sparse()
        shift = np.zeros(g.n)
        shift[anchors.rep_nodes] = self.mu
        self.A = (L + sp.diags(shift)).tocsr()
        self.L = L
        self._diag = self.A.diagonal()

    def rhs(self, i):
        b = np.zeros(self.n)
        b[self.anchors.rep_nodes] = self.mu * (self.anchors.rep_labels == i)
        return b

    def residual(self, v, i):
        b = self.rhs(i)
        return float(np.linalg.norm(self.A @ v - b) / np.linalg.norm(b))


@dataclass(frozen=True)
class SolveInfo:
    iterations: int
    residual: float


def solve_indicator(system, i, tol=1e-8, max_iters=None, return_info=False):
    """Approximate ``v_i = mu A^{-1} B^T c_i`` with Jacobi-preconditioned CG.

    CG starts from ``v0 = c_i`` on the anchors (zero elsewhere) and runs on
    the correction system ``A w = b - A v0``, whose right-hand side is O(1)
    instead of O(mu); the stopping test ``||r|| <= tol ||b - A v0||``
    therefore resolves the free nodes, and it implies the looser contract
    ``||A v - b|| <= tol ||b||``.
    """
    if not 0 <= i < system.anchors.k:
        raise ValidationError(f"cluster id {i} out of range")
    if (system.anchors.rep_labels == i).sum() == 0:
        raise ValidationError(f"cluster {i} has no anchor")
    max_iters = max_iters or 10 * system.n
    b = system.rhs(i)
    v0 = b / system.mu
    r0 = b - system.A @ v0
    r0norm = np.linalg.norm(r0)
    w = np.zeros(system.n)
    iters = 0
    if r0norm > 0:
        count = [0]

        def cb(_):
            count[0] += 1

        M = sp.diags(1.0 / system._diag)
        w, status = spla.cg(system.A, r0, rtol=tol, atol=0.0, maxiter=max_iters, M=M, callback=cb)
        iters = count[0]
        if status != 0:
            res = np.linalg.norm(system.A @ w - r0) / r0norm
            raise SolverError(f"CG did not converge in {max_iters} iterations for cluster {i}; "
                              f"relative residual {res:.3e}", residual=res, iterations=iters)
    v = v0 + w
    res = system.residual(v, i)
    if not res <= tol:
        raise SolverError(f"cluster {i}: residual {res:.3e} exceeds tol {tol:.1e}",
                          residual=res, iterations=iters)
    if return_info:
        return v, SolveInfo(iterations=iters, residual=res)
    return v


def solve_indicators(system, tol=1e-8, max_iters=None):
    """All ``k`` indicator solves at once with a multi-column Jacobi-PCG.

    Each column carries its own CG scalars and is frozen once it meets the
    same stopping test as :func:`solve_indicator`, so every column equals an
    independent solve in exact arithmetic. The point is memory traffic: one
    pass over ``A`` per iteration serves all columns.

    Returns ``(V, infos)`` with ``V`` of shape ``n x k``.
    """
    k = system.anchors.k
    for i in range(k):
        if (system.anchors.rep_labels == i).sum() == 0:
            raise ValidationError(f"cluster {i} has no anchor")
    max_iters = max_iters or 10 * system.n
    A, minv = system.A, 1.0 / system._diag
    B = np.column_stack([system.rhs(i) for i in range(k)])
    V0 = B / system.mu
    R = B - A @ V0
    r0 = np.linalg.norm(R, axis=0)
    Wc = np.zeros_like(R)
    Z = minv[:, None] * R
    D = Z.copy()
    rz = (R * Z).sum(0)
    iters = np.zeros(k, dtype=np.int64)
    active = np.linalg.norm(R, axis=0) > tol * r0
    while active.any():
        cols = np.flatnonzero(active)
        if iters[cols].max() >= max_iters:
            break
        Dc = D[:, cols]
        AD = kernels.csr_matmat(A, Dc)
        step = rz[cols] / (Dc * AD).sum(0)
        Wc[:, cols] += step * Dc
        R[:, cols] -= step * AD
        iters[cols] += 1
        Zc = minv[:, None] * R[:, cols]
        rz_new = (R[:, cols] * Zc).sum(0)
        D[:, cols] = Zc + (rz_new / rz[cols]) * Dc
        rz[cols] = rz_new
        active[cols] = np.linalg.norm(R[:, cols], axis=0) > tol * r0[cols]
    V = V0 + Wc
    infos = []
    for i in range(k):
        res = system.residual(V[:, i], i)
        if active[i] or not res <= tol:
            raise SolverError(f"cluster {i}: CG stopped after {iters[i]} iterations with "
                              f"residual {res:.3e} (tol {tol:.1e})",
                              residual=res, iterations=int(iters[i]))
        infos.append(SolveInfo(iterations=int(iters[i]), residual=res))
    return V, infos


@dataclass(frozen=True)
class FairADConfig:
    relaxation: RelaxationConfig = field(default_factory=RelaxationConfig)
    coarsening: CoarseningConfig = field(default_factory=CoarseningConfig)
    m: int = 30
    kmeans_restarts: int = 10
    kmeans_max_iters: int = 300
    tol: float = 1e-8
    max_iters: int | None = None

    @property
    def seed(self):
        return self.relaxation.seed

    @property
    def mu(self):
        return self.relaxation.mu


class _Stages:
    def __init__(self):
        self.timings_ms = {}

    def run(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            out = fn(*args, **kwargs)
        except FairADError as exc:
            raise StageError(name, exc) from exc
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            raise StageError(name, exc) from exc
        self.timings_ms[name] = (time.perf_counter() - t0) * 1e3
        return out


def run_fairad(g, p, k, cfg=None, artifacts=None):
    """Fair k-way clustering of a connected graph.

    Returns ``(assignment, diagnostics)``. Diagnostics hold per-stage wall
    times in milliseconds, test-vector fairness residuals, hierarchy level
    sizes, the selected level and per-cluster CG iterations and residuals.
    If ``artifacts`` is a dict it receives the intermediate test vectors,
    affinity, hierarchy and anchors.
    """
    cfg = cfg or FairADConfig()
    if k < 2:
        raise ValidationError("k must be >= 2")
    if p.n != g.n:
        raise ValidationError(f"group partition covers {p.n} nodes, graph has {g.n}")
    acfg = AnchorConfig(k=k, m=cfg.m, kmeans_restarts=cfg.kmeans_restarts,
                        kmeans_max_iters=cfg.kmeans_max_iters, seed=cfg.seed)
    st = _Stages()
    rcfg = cfg.relaxation
    beta = rcfg.resolved_beta(g.n)

    F = st.run("fairness_matrix", build_fairness_matrix, p)
    X = st.run("test_vectors", compute_test_vectors, g, F, rcfg)
    W_alg = st.run("affinity", build_algebraic_affinity, g, X, beta)
    hier = st.run("coarsening", build_hierarchy, W_alg, cfg.coarsening)
    level = st.run("level_selection", select_coarse_level, hier, cfg.m)
    coarse_labels = st.run("coarse_spectral", spectral_cluster_coarse, hier[level].graph, k, acfg)
    anchors = st.run("anchors", build_anchor_constraints, level, hier, coarse_labels, k)
    system = st.run("assemble", AnchoredSystem, W_alg, anchors, rcfg.mu)

    V, infos = st.run("solve", solve_indicators, system, cfg.tol, cfg.max_iters)
    assignment = st.run("labels", assign_labels, V)
    if assignment.degenerate:
        log.warning("FairAD produced empty clusters: sizes %s", assignment.sizes.tolist())

    diagnostics = {
        "n": g.n,
        "k": k,
        "h": p.h,
        "beta": beta,
        "timings_ms": st.timings_ms,
        "fairness_residuals": [fairness_residual(F, X[:, r]) for r in range(X.shape[1])],
        "level_sizes": hier.sizes,
        "selected_level": level,
        "num_anchors": int(len(anchors.rep_nodes)),
        "solver_iterations": [s.iterations for s in infos],
        "solver_residuals": [s.residual for s in infos],
        "degenerate": assignment.degenerate,
    }
    if artifacts is not None:
        artifacts.update(test_vectors=X, affinity=W_alg, hierarchy=hier, anchors=anchors)
    return assignment, diagnostics
