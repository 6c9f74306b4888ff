"""Sparse CSR kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen once at import time: set ``GRAPHTAB_DISABLE_NUMBA=1``
to force the numpy path (also used automatically when numba is missing).
Both paths accumulate per row in column order, so results are reproducible
for a fixed build.
"""

import os

import numpy as np

_disable = os.environ.get("GRAPHTAB_DISABLE_NUMBA", "").strip() in ("1", "true", "yes")

try:
    if _disable:
        raise ImportError("numba disabled by GRAPHTAB_DISABLE_NUMBA")
    import numba

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def _csr_matvec_np(indptr, indices, x):
    n = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    return np.bincount(rows, weights=x[indices], minlength=n)


def _csr_matmat_np(indptr, indices, X):
    n = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    gathered = X[indices]
    out = np.empty((n, X.shape[1]))
    for j in range(X.shape[1]):
        out[:, j] = np.bincount(rows, weights=gathered[:, j], minlength=n)
    return out


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _csr_matvec_nb(indptr, indices, x):
        n = indptr.shape[0] - 1
        y = np.zeros(n)
        for v in range(n):
            acc = 0.0
            for e in range(indptr[v], indptr[v + 1]):
                acc += x[indices[e]]
            y[v] = acc
        return y

    @numba.njit(cache=True)
    def _csr_matmat_nb(indptr, indices, X):
        n = indptr.shape[0] - 1
        d = X.shape[1]
        Y = np.zeros((n, d))
        for v in range(n):
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                for j in range(d):
                    Y[v, j] += X[u, j]
        return Y

    csr_matvec = _csr_matvec_nb
    csr_matmat = _csr_matmat_nb
else:
    csr_matvec = _csr_matvec_np
    csr_matmat = _csr_matmat_np


def backend_name():
    return "numba" if HAVE_NUMBA else "numpy"
