"""Seeded multi-restart k-means used by both the anchor step and baseline SC."""
from dataclasses import dataclass

import numpy as np

from ._rng import stream
from .errors import DegeneracyError, ValidationError


@dataclass(frozen=True)
class KMeansConfig:
    restarts: int = 10
    max_iters: int = 300
    seed: int = 0


def _sq_dists(X, C):
    d = (X * X).sum(1)[:, None] - 2.0 * X @ C.T + (C * C).sum(1)[None, :]
    np.maximum(d, 0.0, out=d)
    return d


def kmeans_pp_init(X, k, rng):
    """D^2-weighted seeding. Falls back to uniform picks once all points coincide with a center."""
    n = len(X)
    centers = [int(rng.integers(n))]
    closest = ((X - X[centers[0]]) ** 2).sum(1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            i = int(rng.choice(n, p=closest / total))
        else:
            i = int(rng.integers(n))
        centers.append(i)
        closest = np.minimum(closest, ((X - X[i]) ** 2).sum(1))
    return X[centers].copy()


def lloyd(X, C, max_iters):
    """Lloyd iterations from centers ``C``.

    Returns ``(labels, centers, inertia)``, or ``None`` when a cluster empties.
    Nearest-center ties go to the lowest center index (``argmin``).
    """
    k = len(C)
    labels = None
    for _ in range(max_iters):
        new = _sq_dists(X, C).argmin(1)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        counts = np.bincount(labels, minlength=k)
        if (counts == 0).any():
            return None
        C = np.zeros_like(C)
        np.add.at(C, labels, X)
        C /= counts[:, None]
    d = _sq_dists(X, C)
    labels = d.argmin(1)
    if len(np.unique(labels)) < k:
        return None
    return labels, C, float(d[np.arange(len(X)), labels].sum())


def kmeans(X, k, cfg=None):
    """Best-inertia labels over ``cfg.restarts`` seeded restarts.

    Restarts that end with an empty cluster are discarded; if all of them do,
    :class:`DegeneracyError` is raised.
    """
    cfg = cfg or KMeansConfig()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if not 1 <= k <= len(X):
        raise ValidationError(f"k={k} must lie in [1, {len(X)}]")
    best = None
    for r in range(cfg.restarts):
        rng = stream(cfg.seed, "kmeans", r)
        out = lloyd(X, kmeans_pp_init(X, k, rng), cfg.max_iters)
        if out is not None and (best is None or out[2] < best[2]):
            best = out
    if best is None:
        raise DegeneracyError(f"k-means left a cluster empty in all {cfg.restarts} restarts")
    return best[0]
