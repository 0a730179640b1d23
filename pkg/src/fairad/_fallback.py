"""Pure numpy implementations of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def greedy_select(indptr, indices, data, order, rowsum, alpha):
    """Greedy scan of ``order``: keep node i iff its strongest link to an
    already-kept node is at most ``alpha * rowsum[i]``. The first node is
    always kept. Returns kept nodes in scan order."""
    chosen = np.zeros(len(indptr) - 1, dtype=bool)
    out = []
    for i in order.tolist():
        if out:
            lo, hi = indptr[i], indptr[i + 1]
            hit = chosen[indices[lo:hi]]
            if hit.any() and data[lo:hi][hit].max() > alpha * rowsum[i]:
                continue
        chosen[i] = True
        out.append(i)
    return np.array(out, dtype=np.int64)


def edge_max_absdiff(rows, cols, X, chunk=1 << 18):
    """``max_r |X[rows[e], r] - X[cols[e], r]|`` for every edge e."""
    out = np.empty(len(rows))
    for lo in range(0, len(rows), chunk):
        a, b = rows[lo:lo + chunk], cols[lo:lo + chunk]
        np.abs(X[a] - X[b]).max(axis=1, out=out[lo:lo + chunk])
    return out


def galerkin_dense(w_indptr, w_indices, w_data, p_indptr, p_indices, p_data, nc, chunk=2048):
    """Dense ``P^T W P`` accumulated over row blocks of ``W``."""
    import scipy.sparse as sp

    n = len(w_indptr) - 1
    W = sp.csr_matrix((w_data, w_indices, w_indptr), shape=(n, n))
    P = sp.csr_matrix((p_data, p_indices, p_indptr), shape=(n, nc))
    Q = np.zeros((nc, nc))
    for lo in range(0, n, chunk):
        block = (W[lo:lo + chunk] @ P).toarray()
        Q += P[lo:lo + chunk].T @ block
    return Q


def csr_matmat(indptr, indices, data, X):
    """``M @ X`` for CSR arrays and a dense row-major ``X``."""
    import scipy.sparse as sp

    n = len(indptr) - 1
    return np.asarray(sp.csr_matrix((data, indices, indptr), shape=(n, X.shape[0])) @ X)
