import numpy as np

from graphtab.graph import from_edges


def random_graph(n, p, rng):
    """Erdos-Renyi graph G(n, p) as a Graph."""
    iu, ju = np.triu_indices(n, 1)
    mask = rng.random(len(iu)) < p
    return from_edges(list(zip(iu[mask], ju[mask])), n)


def path_graph(n):
    return from_edges([(i, i + 1) for i in range(n - 1)], n)


def triangle():
    return from_edges([(0, 1), (1, 2), (0, 2)], 3)
