"""Explicit structural characteristics: node degree and PageRank."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, adjacency_matvec


class PageRankConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class StructuralCharacteristics:
    degree_col: np.ndarray
    pagerank_col: np.ndarray


def pagerank(
    g: Graph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> np.ndarray:
    """Power iteration with uniform teleportation.

    Dangling (degree-0) nodes redistribute their mass uniformly over all
    nodes, keeping the walk matrix stochastic. Stops when the L1 change
    drops to ``tol``.
    """
    if not 0 < damping < 1:
        raise ValueError("damping must be in (0, 1)")
    n = g.n
    deg = g.degree.astype(np.float64)
    dangling = deg == 0
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        contrib = np.zeros(n)
        nz = ~dangling
        contrib[nz] = x[nz] / deg[nz]
        spread = adjacency_matvec(g, contrib)
        dangling_mass = x[dangling].sum()
        x_new = damping * (spread + dangling_mass / n) + (1.0 - damping) / n
        delta = np.abs(x_new - x).sum()
        x = x_new
        if delta <= tol:
            return x / x.sum()
    raise PageRankConvergenceError(
        f"pagerank did not converge in {max_iter} iterations (residual {delta:.3e})",
        residual=float(delta),
    )


def structural_characteristics(g: Graph, log1p_degree: bool = False):
    deg = g.degree.astype(np.float64)
    if log1p_degree:
        deg = np.log1p(deg)
    return StructuralCharacteristics(
        degree_col=deg,
        pagerank_col=pagerank(g),
    )
