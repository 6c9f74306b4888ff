"""Normalized Laplacian operator and embeddings for the smallest non-zero
eigenvalues.

L = I - D^{-1/2} A D^{-1/2}, with D^{-1/2} defined as 0 on isolated nodes so
L acts as the identity there and stays symmetric PSD with spectrum in [0, 2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .graph import Graph, adjacency_matmat, adjacency_matvec, connected_components

DENSE_CUTOFF = 2000
ZERO_TOL_DEFAULT = 1e-8


class EigensolverError(RuntimeError):
    """Krylov solver failed to converge; carries the residual norms."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


@dataclass(frozen=True)
class LaplacianOperator:
    graph: Graph
    inv_sqrt_degree: np.ndarray

    @property
    def n(self):
        return self.graph.n


def laplacian_operator(g: Graph) -> LaplacianOperator:
    deg = g.degree.astype(np.float64)
    s = np.zeros(g.n)
    nz = deg > 0
    s[nz] = 1.0 / np.sqrt(deg[nz])
    s.setflags(write=False)
    return LaplacianOperator(graph=g, inv_sqrt_degree=s)


def laplacian_matvec(op: LaplacianOperator, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (op.n,):
        raise ValueError(f"expected vector of length {op.n}, got shape {x.shape}")
    return x - op.inv_sqrt_degree * adjacency_matvec(op.graph, op.inv_sqrt_degree * x)


def laplacian_matmat(op: LaplacianOperator, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != op.n:
        raise ValueError(f"expected {op.n} rows, got {X.shape[0]}")
    s = op.inv_sqrt_degree[:, None]
    return X - s * adjacency_matmat(op.graph, s * X)


def dense_laplacian(g: Graph) -> np.ndarray:
    """Densified L; test oracle and production path for small graphs."""
    op = laplacian_operator(g)
    A = np.zeros((g.n, g.n))
    for v in range(g.n):
        A[v, g.neighbors(v)] = 1.0
    s = op.inv_sqrt_degree
    return np.eye(g.n) - s[:, None] * A * s[None, :]


def _kernel_basis(g: Graph) -> np.ndarray:
    """Orthonormal basis of the zero eigenspace of L: per edge-bearing
    component, sqrt(degree) restricted to the component and normalized."""
    count, comp = connected_components(g)
    sizes = np.bincount(comp, minlength=count)
    sqrt_deg = np.sqrt(g.degree.astype(np.float64))
    cols = []
    for c in np.flatnonzero(sizes >= 2):
        v = np.where(comp == c, sqrt_deg, 0.0)
        cols.append(v / np.linalg.norm(v))
    if not cols:
        return np.zeros((g.n, 0))
    return np.stack(cols, axis=1)


def count_zero_eigenvalues(g: Graph) -> int:
    """Multiplicity of the zero eigenvalue of L: one per connected component
    that contains at least one edge."""
    count, comp = connected_components(g)
    sizes = np.bincount(comp, minlength=count)
    return int(np.count_nonzero(sizes >= 2))


@dataclass(frozen=True)
class SpectralEmbedding:
    k: int
    vectors: np.ndarray  # n x k, columns orthonormal (zero-padded columns excepted)
    eigenvalues: np.ndarray  # ascending, strictly above the zero tolerance
    n_zero_discarded: int
    n_padded: int


def _canonicalize_signs(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))  # argmax keeps the smallest id on ties
        if col[i] < 0:
            out[:, j] = -col
    return out


def laplacian_embeddings(
    g: Graph,
    k: int,
    zero_tol: float = ZERO_TOL_DEFAULT,
    method: str = "auto",
    seed: int = 0,
) -> SpectralEmbedding:
    """Eigenvectors for the k smallest non-zero eigenvalues of L.

    The number of zero eigenvalues equals the count of components that
    contain at least one edge (isolated nodes sit at eigenvalue 1 under the
    identity convention), so we request that many extra extremal pairs and
    discard everything at or below ``zero_tol``. If the graph has fewer
    than k non-zero eigenpairs the result is padded with zero columns and
    ``n_padded`` reports how many.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = g.n
    m = count_zero_eigenvalues(g)

    use_dense = method == "dense" or (method == "auto" and n <= DENSE_CUTOFF)
    if not use_dense and n < 3:
        use_dense = True  # ARPACK needs strictly fewer pairs than n

    if use_dense:
        vals, vecs = np.linalg.eigh(dense_laplacian(g))
        nonzero = vals > zero_tol
        n_zero = int(np.count_nonzero(~nonzero))
        keep_vals = vals[nonzero][:k]
        keep_vecs = vecs[:, nonzero][:, : len(keep_vals)]
    else:
        # Krylov methods resolve the degenerate zero eigenvalue unreliably,
        # but its eigenspace is known exactly: sqrt(degree) indicators of the
        # edge-bearing components. Deflate it out of [0, 2] by a rank-m shift
        # so the solver sees only the non-zero part of the spectrum.
        op = laplacian_operator(g)
        kernel = _kernel_basis(g)
        shift = 3.0

        def matvec(x):
            return laplacian_matvec(op, x) + shift * (kernel @ (kernel.T @ x))

        lin = spla.LinearOperator((n, n), matvec=matvec, dtype=np.float64)
        v0 = np.random.default_rng(seed).standard_normal(n)
        n_ask = min(k, n - 1)
        try:
            vals, vecs = spla.eigsh(lin, k=n_ask, which="SA", v0=v0, maxiter=100 * n)
        except spla.ArpackNoConvergence as exc:
            res = None
            if exc.eigenvalues is not None and len(exc.eigenvalues):
                res = [
                    float(np.linalg.norm(laplacian_matvec(op, u) - lam * u))
                    for lam, u in zip(exc.eigenvalues, exc.eigenvectors.T)
                ]
            raise EigensolverError(
                f"eigensolver did not converge on n={n} graph", residuals=res
            ) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        # anything deflated to ~shift is a kernel direction, not a usable pair
        keep = (vals > zero_tol) & (vals <= 2.0 + 10 * zero_tol)
        n_zero = m
        keep_vals = vals[keep][:k]
        keep_vecs = vecs[:, keep][:, : len(keep_vals)]

    n_padded = k - len(keep_vals)
    if n_padded:
        keep_vals = np.concatenate([keep_vals, np.zeros(n_padded)])
        keep_vecs = np.concatenate([keep_vecs, np.zeros((n, n_padded))], axis=1)

    return SpectralEmbedding(
        k=k,
        vectors=_canonicalize_signs(keep_vecs),
        eigenvalues=keep_vals,
        n_zero_discarded=n_zero,
        n_padded=n_padded,
    )


def save_embedding_cache(path, g: Graph, k, zero_tol, emb: SpectralEmbedding) -> None:
    np.savez(
        path,
        graph_hash=g.content_hash(),
        k=k,
        zero_tol=zero_tol,
        eigenvalues=emb.eigenvalues,
        vectors=emb.vectors,
        n_zero_discarded=emb.n_zero_discarded,
        n_padded=emb.n_padded,
    )


def load_embedding_cache(path, g: Graph, k, zero_tol) -> SpectralEmbedding | None:
    """Return the cached embedding, or None on any mismatch."""
    try:
        with np.load(path, allow_pickle=False) as z:
            if (
                str(z["graph_hash"]) != g.content_hash()
                or int(z["k"]) != k
                or float(z["zero_tol"]) != zero_tol
            ):
                return None
            return SpectralEmbedding(
                k=k,
                vectors=z["vectors"],
                eigenvalues=z["eigenvalues"],
                n_zero_discarded=int(z["n_zero_discarded"]),
                n_padded=int(z["n_padded"]),
            )
    except (OSError, KeyError):
        return None
