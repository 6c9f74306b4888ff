"""Synthetic desk-scale datasets: preferential-attachment graphs, smooth
node features, and contextual/structural anomaly injection."""

from __future__ import annotations

import numpy as np

from .graph import Graph, adjacency_matmat, from_edges


def ba_graph(n: int, m: int = 2, seed: int = 0) -> Graph:
    """Barabasi-Albert style preferential attachment with m edges per new
    node."""
    if n < m + 1:
        raise ValueError("n must exceed m")
    rng = np.random.default_rng(seed)
    edges = []
    targets = list(range(m + 1))
    for u, v in zip(targets, targets[1:]):
        edges.append((u, v))
    # repeated endpoints implement the degree-proportional sampling
    endpoint_pool = [v for e in edges for v in e]
    for new in range(m + 1, n):
        chosen = set()
        while len(chosen) < m:
            chosen.add(endpoint_pool[rng.integers(len(endpoint_pool))])
        for t in chosen:
            edges.append((new, t))
            endpoint_pool.extend((new, t))
    return from_edges(edges, n)


def smooth_features(g: Graph, d: int, rounds: int = 3, seed: int = 0) -> np.ndarray:
    """Gaussian noise diffused over the graph so features vary smoothly with
    position; contextual swaps then break local smoothness."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((g.n, d))
    deg = np.maximum(g.degree.astype(np.float64), 1.0)
    for _ in range(rounds):
        X = 0.5 * X + 0.5 * adjacency_matmat(g, X) / deg[:, None]
    return X


def inject_synthetic_anomalies(
    g: Graph,
    X: np.ndarray,
    n_contextual: int,
    n_structural: int,
    clique_size: int = 5,
    candidate_pool: int = 50,
    seed: int = 0,
):
    """Return (graph, features, labels) with injected anomalies.

    Contextual: each chosen node's feature row is replaced by the most
    distant row among ``candidate_pool`` uniformly sampled others.
    Structural: chosen nodes are partitioned into groups of ``clique_size``
    and each group is fully interconnected. Both kinds are labeled 1.
    """
    n = g.n
    X = np.array(X, dtype=np.float64)
    if n_contextual < 0 or n_structural < 0:
        raise ValueError("anomaly counts must be nonnegative")
    if n_structural % clique_size:
        raise ValueError("n_structural must be a multiple of clique_size")
    total = n_contextual + n_structural
    if total > n:
        raise ValueError(f"cannot choose {total} anomalies from {n} nodes")
    if n_contextual and candidate_pool >= n:
        raise ValueError("candidate_pool must be smaller than n")

    rng = np.random.default_rng(seed)
    labels = np.zeros(n, dtype=np.int64)
    if total == 0:
        return g, X, labels

    chosen = rng.choice(n, size=total, replace=False)
    contextual = chosen[:n_contextual]
    structural = chosen[n_contextual:]
    labels[chosen] = 1

    for v in contextual:
        pool = rng.choice(np.delete(np.arange(n), v), size=candidate_pool, replace=False)
        dists = np.linalg.norm(X[pool] - X[v], axis=1)
        X[v] = X[pool[np.argmax(dists)]]

    edges = list(g.edges())
    for lo in range(0, n_structural, clique_size):
        group = structural[lo : lo + clique_size]
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                edges.append((int(group[i]), int(group[j])))
    return from_edges(edges, n), X, labels


def make_dataset(
    n: int = 1000,
    d: int = 10,
    n_contextual: int = 25,
    n_structural: int = 25,
    clique_size: int = 5,
    candidate_pool: int = 50,
    seed: int = 0,
):
    """Full generator used by the CLI and the acceptance suite."""
    g = ba_graph(n, seed=seed)
    X = smooth_features(g, d, seed=seed + 1)
    return inject_synthetic_anomalies(
        g, X, n_contextual, n_structural, clique_size, candidate_pool, seed=seed + 2
    )
