"""Hot-loop kernels, compiled when available.

The Cython extension ``fairad._kernels`` is used if it was built; otherwise
the numpy versions in ``fairad._fallback`` are used. Set ``FAIRAD_PURE_PYTHON=1``
to force the fallback. ``BACKEND`` names the active implementation.
"""
import os

import numpy as np

from . import _fallback

if os.environ.get("FAIRAD_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"


def greedy_select(indptr, indices, data, order, rowsum, alpha, impl=None):
    impl = impl or _impl
    return impl.greedy_select(
        np.ascontiguousarray(indptr, dtype=np.int32),
        np.ascontiguousarray(indices, dtype=np.int32),
        np.ascontiguousarray(data, dtype=np.float64),
        np.ascontiguousarray(order, dtype=np.int64),
        np.ascontiguousarray(rowsum, dtype=np.float64),
        float(alpha),
    )


def edge_max_absdiff(rows, cols, X, impl=None):
    impl = impl or _impl
    return impl.edge_max_absdiff(
        np.ascontiguousarray(rows, dtype=np.int64),
        np.ascontiguousarray(cols, dtype=np.int64),
        np.ascontiguousarray(X, dtype=np.float64),
    )


def galerkin_dense(W, P, impl=None):
    """Dense ``P^T W P`` for CSR ``W`` (n x n) and ``P`` (n x nc)."""
    impl = impl or _impl
    i32 = lambda a: np.ascontiguousarray(a, dtype=np.int32)  # noqa: E731
    f64 = lambda a: np.ascontiguousarray(a, dtype=np.float64)  # noqa: E731
    return impl.galerkin_dense(i32(W.indptr), i32(W.indices), f64(W.data),
                               i32(P.indptr), i32(P.indices), f64(P.data), P.shape[1])


def csr_matmat(M, X, impl=None):
    """``M @ X`` for a CSR matrix ``M`` and dense ``X`` (1-d or 2-d)."""
    impl = impl or _impl
    X = np.asarray(X, dtype=np.float64)
    flat = X.ndim == 1
    Y = impl.csr_matmat(np.ascontiguousarray(M.indptr, dtype=np.int32),
                        np.ascontiguousarray(M.indices, dtype=np.int32),
                        np.ascontiguousarray(M.data, dtype=np.float64),
                        np.ascontiguousarray(X.reshape(len(X), -1)))
    return Y[:, 0] if flat else Y
