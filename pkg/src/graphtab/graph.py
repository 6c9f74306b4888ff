"""Immutable CSR graph storage plus loaders for edge lists, features, labels."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._kernels import csr_matmat, csr_matvec


class EdgeListParseError(ValueError):
    """Malformed or out-of-range record in an edge-list file."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph in compressed-row form.

    Each undirected edge is stored twice; column indices are sorted
    ascending within every row.
    """

    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    degree: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.degree is None:
            object.__setattr__(self, "degree", np.diff(self.row_offsets))
        self.row_offsets.setflags(write=False)
        self.col_indices.setflags(write=False)
        self.degree.setflags(write=False)

    @property
    def num_stored_entries(self) -> int:
        return int(self.row_offsets[-1])

    def neighbors(self, v: int) -> np.ndarray:
        return self.col_indices[self.row_offsets[v] : self.row_offsets[v + 1]]

    def edges(self):
        """Yield each undirected edge once, as (u, v) with u < v."""
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    yield u, int(v)

    def content_hash(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(np.int64(self.n).tobytes())
        h.update(np.ascontiguousarray(self.row_offsets, dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(self.col_indices, dtype=np.int64).tobytes())
        return h.hexdigest()


def from_edges(edges, n: int) -> Graph:
    """Build a Graph from (u, v) pairs: symmetrize, dedup, drop self-loops."""
    if len(edges):
        e = np.asarray(edges, dtype=np.int64)
        e = e[e[:, 0] != e[:, 1]]
    else:
        e = np.empty((0, 2), dtype=np.int64)
    both = np.concatenate([e, e[:, ::-1]], axis=0)
    if len(both):
        both = np.unique(both, axis=0)
    rows, cols = both[:, 0], both[:, 1]
    counts = np.bincount(rows, minlength=n)
    row_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=row_offsets[1:])
    # np.unique sorts lexicographically, so cols are already ascending per row
    return Graph(n=n, row_offsets=row_offsets, col_indices=cols.astype(np.int64))


def load_edge_list(path, n: int) -> Graph:
    """Load a whitespace-separated edge list; '#' lines are comments.

    Raises EdgeListParseError naming the offending line for malformed
    records or ids >= n. An empty edge set is allowed.
    """
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 2:
                raise EdgeListParseError(
                    f"{path}:{lineno}: expected two ids, got {len(parts)} fields"
                )
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(
                    f"{path}:{lineno}: non-integer node id in {s!r}"
                ) from None
            if u < 0 or v < 0 or u >= n or v >= n:
                raise EdgeListParseError(
                    f"{path}:{lineno}: node id out of range [0, {n}) in {s!r}"
                )
            edges.append((u, v))
    return from_edges(edges, n)


def save_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def adjacency_matvec(g: Graph, x: np.ndarray) -> np.ndarray:
    """y[v] = sum of x over the neighbors of v."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"expected vector of length {g.n}, got shape {x.shape}")
    return csr_matvec(g.row_offsets, g.col_indices, x)


def adjacency_matmat(g: Graph, X: np.ndarray) -> np.ndarray:
    """Row-wise neighbor sums of a dense n x d matrix."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.shape[0] != g.n:
        raise ValueError(f"expected {g.n} rows, got {X.shape[0]}")
    return csr_matmat(g.row_offsets, g.col_indices, X)


def connected_components(g: Graph):
    """BFS labelling; component ids ordered by smallest contained node id."""
    comp = np.full(g.n, -1, dtype=np.int64)
    count = 0
    for start in range(g.n):
        if comp[start] >= 0:
            continue
        comp[start] = count
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if comp[v] < 0:
                    comp[v] = count
                    queue.append(v)
        count += 1
    return count, comp


def load_features(path, n: int | None = None) -> np.ndarray:
    """CSV features, one row per node; an optional header row is detected by
    a non-numeric first field."""
    path = Path(path)
    with open(path) as fh:
        first = fh.readline()
    skip = 0
    if first.strip():
        head = first.split(",")[0].strip()
        try:
            float(head)
        except ValueError:
            skip = 1
    X = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2, dtype=np.float64)
    if n is not None and X.shape[0] != n:
        raise ValueError(f"{path}: expected {n} feature rows, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{path}: non-finite feature values")
    return X


def load_labels(path, n: int | None = None) -> np.ndarray:
    y = np.loadtxt(path, dtype=np.int64, ndmin=1)
    if n is not None and y.shape[0] != n:
        raise ValueError(f"{path}: expected {n} labels, got {y.shape[0]}")
    if not np.isin(y, (0, 1)).all():
        raise ValueError(f"{path}: labels must be 0 or 1")
    return y
