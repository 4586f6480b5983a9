"""Simple undirected labeled graphs with O(1) edge toggles.

Vertices are 1-based in every public signature and file format. Internally
the graph keeps a symmetric 0/1 adjacency matrix (int32, so rows can be fed
straight to the compiled sweep kernels) and a degree vector that is updated
incrementally on every toggle.

Edges are indexed row-major over pairs i < j:

    (1,2) -> 0, (1,3) -> 1, ..., (1,n) -> n-2, (2,3) -> n-1, ...
"""
from __future__ import annotations

import io
from typing import Iterable, NamedTuple

import numpy as np


class EdgeIndex(NamedTuple):
    i: int
    j: int


def num_edges(n: int) -> int:
    return n * (n - 1) // 2


def _check_pair(i: int, j: int, n: int) -> tuple[int, int]:
    if i == j:
        raise ValueError(f"self-loop ({i},{j}) is not a simple-graph edge")
    if i > j:
        i, j = j, i
    if i < 1 or j > n:
        raise ValueError(f"vertex ids ({i},{j}) out of range for n={n}")
    return i, j


def edge_index(i: int, j: int, n: int) -> int:
    """Row-major index in ``0..N-1`` of the pair ``{i, j}`` (1-based)."""
    i, j = _check_pair(i, j, n)
    return (i - 1) * (2 * n - i) // 2 + (j - i - 1)


def edge_pair(k: int, n: int) -> EdgeIndex:
    """Inverse of :func:`edge_index`."""
    N = num_edges(n)
    if not 0 <= k < N:
        raise ValueError(f"edge index {k} out of range for n={n}")
    i = 1
    row = n - 1
    while k >= row:
        k -= row
        i += 1
        row -= 1
    return EdgeIndex(i, i + 1 + k)


def edge_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """0-based endpoint arrays ``(a, b)`` of every edge, in index order."""
    a, b = np.triu_indices(n, k=1)
    return a.astype(np.int64), b.astype(np.int64)


class Graph:
    """Mutable simple graph on vertices ``1..n``.

    A Graph is owned by one chain at a time; nothing here is shared.
    """

    __slots__ = ("n", "adj", "degree")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.adj = np.zeros((n, n), dtype=np.int32)
        self.degree = np.zeros(n, dtype=np.int64)
        for i, j in edges:
            i, j = _check_pair(i, j, n)
            if not self.adj[i - 1, j - 1]:
                self.toggle(i, j)

    # -- constructors ---------------------------------------------------
    @classmethod
    def complete(cls, n: int) -> "Graph":
        g = cls(n)
        g.adj[:] = 1
        np.fill_diagonal(g.adj, 0)
        g.degree[:] = n - 1
        return g

    @classmethod
    def from_adjacency(cls, adj) -> "Graph":
        adj = np.asarray(adj)
        n = adj.shape[0]
        if adj.shape != (n, n):
            raise ValueError("adjacency must be square")
        if np.any(np.diag(adj)) or not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric with empty diagonal")
        g = cls(n)
        g.adj[:] = (adj != 0)
        g.degree[:] = g.adj.sum(axis=1)
        return g

    @classmethod
    def from_vector(cls, x, n: int) -> "Graph":
        """Build from the edge bit vector ``x`` of length N (row-major)."""
        x = np.asarray(x)
        if x.shape != (num_edges(n),):
            raise ValueError(f"edge vector must have length {num_edges(n)}")
        adj = np.zeros((n, n), dtype=np.int32)
        a, b = edge_arrays(n)
        adj[a, b] = x != 0
        adj[b, a] = x != 0
        return cls.from_adjacency(adj)

    @classmethod
    def random(cls, n: int, p: float, rng: np.random.Generator) -> "Graph":
        return cls.from_vector(rng.random(num_edges(n)) < p, n)

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.n = self.n
        g.adj = self.adj.copy()
        g.degree = self.degree.copy()
        return g

    # -- queries ----------------------------------------------------------
    def has_edge(self, i: int, j: int) -> bool:
        i, j = _check_pair(i, j, self.n)
        return bool(self.adj[i - 1, j - 1])

    def deg(self, v: int) -> int:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} out of range for n={self.n}")
        return int(self.degree[v - 1])

    @property
    def num_edges(self) -> int:
        return int(self.degree.sum()) // 2

    def to_vector(self) -> np.ndarray:
        a, b = edge_arrays(self.n)
        return self.adj[a, b].astype(np.uint8)

    def edges(self) -> list[EdgeIndex]:
        a, b = np.nonzero(np.triu(self.adj, k=1))
        return [EdgeIndex(int(i) + 1, int(j) + 1) for i, j in zip(a, b)]

    def codegree(self, a: int, b: int) -> int:
        """Number of common neighbours of ``a`` and ``b``."""
        if a == b:
            raise ValueError("codegree needs two distinct vertices")
        a, b = _check_pair(a, b, self.n)
        return int(np.dot(self.adj[a - 1], self.adj[b - 1]))

    # -- mutation ---------------------------------------------------------
    def toggle(self, i: int, j: int) -> "Graph":
        i, j = _check_pair(i, j, self.n)
        a, b = i - 1, j - 1
        new = 1 - self.adj[a, b]
        self.adj[a, b] = new
        self.adj[b, a] = new
        step = 1 if new else -1
        self.degree[a] += step
        self.degree[b] += step
        return self

    def set_edge(self, i: int, j: int, value: bool) -> "Graph":
        if self.has_edge(i, j) != bool(value):
            self.toggle(i, j)
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adj, other.adj)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, E={self.num_edges})"


def write_edge_list(g: Graph, fh=None) -> str:
    """Serialize as ``n <count>`` followed by one ``i j`` line per edge."""
    buf = io.StringIO()
    buf.write(f"n {g.n}\n")
    for i, j in g.edges():
        buf.write(f"{i} {j}\n")
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def read_edge_list(text: str) -> Graph:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0][0] != "n" or len(lines[0]) != 2:
        raise ValueError("edge list must start with a line 'n <count>'")
    n = int(lines[0][1])
    edges = []
    for parts in lines[1:]:
        if len(parts) != 2:
            raise ValueError(f"malformed edge line: {' '.join(parts)!r}")
        i, j = int(parts[0]), int(parts[1])
        if i >= j:
            raise ValueError(f"edge lines need i < j, got {i} {j}")
        edges.append((i, j))
    return Graph(n, edges)
