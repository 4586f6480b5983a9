"""Small pattern graphs ("motifs") and the counting functions built on them.

Homomorphisms here are injective edge-preserving maps, so
``hom_count(H, G) == aut(H) * copy_count(H, G)`` for every pair.

Counting is done two ways: a generic vectorized backtracking over injective
maps (any motif, small graphs, batched over many graphs at once) and closed
forms for the edge, two-star, triangle and rectangle, which are the ones the
samplers need in their inner loops.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .graph import Graph, _check_pair

MAX_MOTIF_VERTICES = 8


@lru_cache(maxsize=None)
def _canonical(v: int, edges: tuple) -> tuple[tuple, int]:
    """Lexicographically smallest relabeled edge list and automorphism count."""
    best = None
    aut = 0
    es = frozenset(edges)
    for perm in itertools.permutations(range(1, v + 1)):
        relabeled = tuple(sorted(tuple(sorted((perm[i - 1], perm[j - 1]))) for i, j in edges))
        if best is None or relabeled < best:
            best = relabeled
        if frozenset(relabeled) == es:
            aut += 1
    return best, aut


@dataclass(frozen=True)
class Motif:
    """A simple graph on vertices ``1..v`` without isolated vertices."""

    v: int
    edges: tuple[tuple[int, int], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not 2 <= self.v <= MAX_MOTIF_VERTICES:
            raise ValueError(f"motifs need 2..{MAX_MOTIF_VERTICES} vertices, got {self.v}")
        norm = sorted({_check_pair(int(i), int(j), self.v) for i, j in self.edges})
        if not norm:
            raise ValueError("a motif needs at least one edge")
        used = {u for e in norm for u in e}
        if len(used) != self.v:
            missing = sorted(set(range(1, self.v + 1)) - used)
            raise ValueError(f"motif has isolated vertices {missing}")
        object.__setattr__(self, "edges", tuple(norm))
        if not self.name:
            object.__setattr__(self, "name", _NAMES.get(self.key, f"motif{self.v}:{list(map(list, norm))}"))

    # named constructors
    @classmethod
    def edge(cls) -> "Motif":
        return cls(2, ((1, 2),), "edge")

    @classmethod
    def two_star(cls) -> "Motif":
        return cls(3, ((1, 2), (1, 3)), "two_star")

    @classmethod
    def triangle(cls) -> "Motif":
        return cls(3, ((1, 2), (1, 3), (2, 3)), "triangle")

    @classmethod
    def rectangle(cls) -> "Motif":
        return cls(4, ((1, 2), (2, 3), (3, 4), (1, 4)), "rectangle")

    @classmethod
    def from_json(cls, obj) -> "Motif":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if "name" in obj and "edges" not in obj:
            try:
                return _NAMED[obj["name"]]()
            except KeyError:
                raise ValueError(f"unknown motif name {obj['name']!r}") from None
        return cls(int(obj["v"]), tuple(tuple(e) for e in obj["edges"]))

    def to_json(self) -> dict:
        if self.kind is not None:
            return {"name": self.kind}
        return {"v": self.v, "edges": [list(e) for e in self.edges]}

    # derived counts
    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> list[int]:
        d = [0] * self.v
        for i, j in self.edges:
            d[i - 1] += 1
            d[j - 1] += 1
        return d

    @property
    def s2(self) -> int:
        """Number of two-star subgraphs."""
        return sum(math.comb(d, 2) for d in self.degrees)

    @property
    def t(self) -> int:
        """Number of triangle subgraphs."""
        es = set(self.edges)
        return sum(
            1
            for a, b, c in itertools.combinations(range(1, self.v + 1), 3)
            if (a, b) in es and (a, c) in es and (b, c) in es
        )

    @property
    def key(self) -> tuple:
        """Isomorphism-invariant key."""
        return (self.v, _canonical(self.v, self.edges)[0])

    @property
    def aut(self) -> int:
        return _canonical(self.v, self.edges)[1]

    @property
    def kind(self) -> str | None:
        """One of the named closed-form motifs, or None."""
        return _KINDS.get(self.key)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.v, self.v), dtype=np.int32)
        for i, j in self.edges:
            a[i - 1, j - 1] = a[j - 1, i - 1] = 1
        return a

    def __repr__(self) -> str:
        return f"Motif({self.name})"


_NAMED = {
    "edge": Motif.edge,
    "two_star": Motif.two_star,
    "triangle": Motif.triangle,
    "rectangle": Motif.rectangle,
}
_NAMES: dict = {}
_KINDS: dict = {}
for _name, _ctor in _NAMED.items():
    _m = _ctor()
    _KINDS[_m.key] = _name
    _NAMES[_m.key] = _name


# ---------------------------------------------------------------------------
# generic counting

def _vertex_order(h: Motif) -> list[int]:
    """0-based vertex order where each vertex after the first in a component
    has an earlier neighbour; keeps partial products sparse."""
    adj = h.adjacency()
    order: list[int] = []
    seen: set[int] = set()
    for root in range(h.v):
        if root in seen:
            continue
        stack = [root]
        seen.add(root)
        while stack:
            u = stack.pop(0)
            order.append(u)
            for w in range(h.v):
                if adj[u, w] and w not in seen:
                    seen.add(w)
                    stack.append(w)
    return order


def weighted_hom_sum(h: Motif, W) -> np.ndarray:
    """Sum over injective maps psi: V(h) -> [n] of prod_{uv in E(h)} W[psi u, psi v].

    ``W`` has shape ``(..., n, n)``; leading axes are batch axes. With ``W`` an
    adjacency matrix this is the homomorphism count; with ``A - p`` off the
    diagonal it is ``aut(h)`` times the centered copy count.
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[-1]
    batch = W.shape[:-2]
    if h.v > n:
        raise ValueError(f"motif with {h.v} vertices does not fit in n={n}")
    order = _vertex_order(h)
    pos = {u: k for k, u in enumerate(order)}
    hadj = h.adjacency()
    back = [[pos[w] for w in order[:k] if hadj[u, w]] for k, u in enumerate(order)]

    total = np.zeros(batch)
    for first in range(n):
        assign = np.array([[first]], dtype=np.int64)
        weight = np.ones(batch + (1,))
        for k in range(1, h.v):
            m = assign.shape[0]
            cand = np.tile(np.arange(n), m)
            rows = np.repeat(np.arange(m), n)
            ok = np.all(assign[rows] != cand[:, None], axis=1)
            rows, cand = rows[ok], cand[ok]
            w = weight[..., rows]
            for q in back[k]:
                w = w * W[..., assign[rows, q], cand]
            keep = np.any(w != 0, axis=tuple(range(len(batch)))) if batch else (w != 0)
            assign = np.concatenate([assign[rows[keep]], cand[keep, None]], axis=1)
            weight = w[..., keep]
            if assign.shape[0] == 0:
                break
        total = total + weight.sum(axis=-1)
    return total


# ---------------------------------------------------------------------------
# closed forms (batched over leading axes of an adjacency array)

def count_edges(A) -> np.ndarray:
    return np.asarray(A).sum(axis=(-1, -2)) // 2


def count_two_stars(A) -> np.ndarray:
    d = np.asarray(A, dtype=np.int64).sum(axis=-1)
    return (d * (d - 1) // 2).sum(axis=-1)


def _codegree_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    C = A @ A
    idx = np.arange(A.shape[-1])
    C[..., idx, idx] = 0
    return C


def count_triangles(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    return (A * (A @ A)).sum(axis=(-1, -2)) // 6


def count_rectangles(A) -> np.ndarray:
    C = _codegree_matrix(A)
    return (C * (C - 1) // 2).sum(axis=(-1, -2)) // 4


_CLOSED_FORM = {
    "edge": count_edges,
    "two_star": count_two_stars,
    "triangle": count_triangles,
    "rectangle": count_rectangles,
}


def _adjacency_of(g) -> np.ndarray:
    return g.adj if isinstance(g, Graph) else np.asarray(g)


def copy_count(h: Motif, g):
    """Number of (not necessarily induced) copies of ``h`` in ``g``.

    ``g`` may be a Graph or an adjacency array with leading batch axes.
    """
    A = _adjacency_of(g)
    if h.v > A.shape[-1]:
        raise ValueError(f"motif with {h.v} vertices does not fit in n={A.shape[-1]}")
    if h.kind is not None:
        out = _CLOSED_FORM[h.kind](A)
    else:
        out = np.rint(weighted_hom_sum(h, A)).astype(np.int64) // h.aut
    return int(out) if np.ndim(out) == 0 else out


def hom_count(h: Motif, g):
    """Number of injective edge-preserving maps V(h) -> V(g)."""
    out = copy_count(h, g)
    return out * h.aut


def hom_density(h: Motif, g) -> float:
    n = _adjacency_of(g).shape[-1]
    return hom_count(h, g) / n ** h.v


def rectangle_delta(adj: np.ndarray, a: int, b: int) -> int:
    """Four-cycles through the 0-based pair (a, b) once that pair is an edge.

    Counts paths a - c - d - b with c, d outside {a, b}; masking b out of
    a's row and a out of b's row removes every path that would reuse (a, b).
    """
    ra = adj[a].astype(np.int64)
    rb = adj[b].astype(np.int64)
    ra[b] = 0
    rb[a] = 0
    return int(ra @ (adj.astype(np.int64) @ rb))


def delta_copy(h: Motif, g: Graph, s) -> int:
    """copy_count(h, g with s) - copy_count(h, g without s)."""
    i, j = _check_pair(int(s[0]), int(s[1]), g.n)
    a, b = i - 1, j - 1
    x = int(g.adj[a, b])
    kind = h.kind
    if kind == "edge":
        return 1
    if kind == "two_star":
        return int(g.degree[a] + g.degree[b] - 2 * x)
    if kind == "triangle":
        return int(np.dot(g.adj[a], g.adj[b]))
    if kind == "rectangle":
        return rectangle_delta(g.adj, a, b)
    on = g.copy().set_edge(i, j, True)
    off = g.copy().set_edge(i, j, False)
    return copy_count(h, on) - copy_count(h, off)


def falling(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1)."""
    return math.perm(n, k) if k <= n else 0


def expected_copies(h: Motif, n: int, p: float) -> float:
    """Mean copy count of ``h`` under G(n, p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    return falling(n, h.v) / h.aut * p ** h.e


def expected_hom(h: Motif, n: int, p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    return falling(n, h.v) * p ** h.e
