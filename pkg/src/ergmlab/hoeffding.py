"""Hoeffding decomposition of subgraph counts under G(n, p).

Every edge indicator Z_s is split as ``p + (Z_s - p)``; expanding a product of
indicators over a copy of H and grouping by which edges carry the centered
factor gives

    |hom(H, G)| = E_p|hom(H, G)|
                  + sum_{F subset H} (n - v_F)...(n - v_H + 1) p^(e_H - e_F) |hom(F, H)| #~(F, G)

where F runs over isomorphism classes of nonempty subgraphs of H without
isolated vertices and ``#~(F, G)`` is the copy count of F in K_n with each
indicator replaced by ``Z_s - p``. The identity is exact.

Two flavours of the tilde statistics are kept side by side: ``approximate``
uses the large-n coefficients 2np and np^2 that define the second-order model,
``exact`` uses the falling-factorial coefficients 2(n-2)p and (n-2)p^2, under
which V~ and T~ coincide with the centered two-star and triangle counts.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import Graph, _check_pair, num_edges
from .motif import (
    Motif,
    copy_count,
    count_edges,
    count_triangles,
    count_two_stars,
    delta_copy,
    expected_copies,
    expected_hom,
    falling,
    hom_count,
    weighted_hom_sum,
)

VARIANTS = ("approximate", "exact")
MAX_DECOMP_VERTICES = 6


def _adj(g) -> np.ndarray:
    return g.adj if isinstance(g, Graph) else np.asarray(g)


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")


def centered_weights(g, p: float) -> np.ndarray:
    """``A - p`` with a zero diagonal (batched over leading axes)."""
    A = _adj(g).astype(float)
    W = A - p
    n = W.shape[-1]
    idx = np.arange(n)
    W[..., idx, idx] = 0.0
    return W


def centered_copy_count(h: Motif, g, p: float):
    """Sum over copies of ``h`` in K_n of prod over its edges of (Z_r - p)."""
    _check_p(p)
    out = weighted_hom_sum(h, centered_weights(g, p)) / h.aut
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class TildeStats:
    e_tilde: float | np.ndarray
    v_tilde: float | np.ndarray
    t_tilde: float | np.ndarray
    variant: str


def tilde_coefficients(n: int, p: float, variant: str) -> tuple[float, float]:
    """Coefficients (c_E in V~, c_E in T~) multiplying E~."""
    if variant == "approximate":
        return 2 * n * p, n * p * p
    if variant == "exact":
        return 2 * (n - 2) * p, (n - 2) * p * p
    raise ValueError(f"unknown tilde variant {variant!r}; expected one of {VARIANTS}")


def tilde_from_counts(E, V, T, n: int, p: float, variant: str = "approximate") -> TildeStats:
    cv, ct = tilde_coefficients(n, p, variant)
    Et = E - num_edges(n) * p
    Vt = V - expected_copies(Motif.two_star(), n, p) - cv * Et
    Tt = T - expected_copies(Motif.triangle(), n, p) - p * Vt - ct * Et
    return TildeStats(Et, Vt, Tt, variant)


def tilde_stats(g, p: float, variant: str = "approximate") -> TildeStats:
    A = _adj(g)
    n = A.shape[-1]
    E, V, T = count_edges(A), count_two_stars(A), count_triangles(A)
    out = tilde_from_counts(np.asarray(E, float), np.asarray(V, float), np.asarray(T, float), n, p, variant)
    if np.ndim(out.e_tilde) == 0:
        out = TildeStats(float(out.e_tilde), float(out.v_tilde), float(out.t_tilde), variant)
    return out


def delta_tilde(degree_a: int, degree_b: int, codeg: int, n: int, p: float, variant: str = "approximate"):
    """(dE~, dV~, dT~) for adding an absent edge whose endpoints have the given
    degrees and codegree."""
    cv, ct = tilde_coefficients(n, p, variant)
    dV = degree_a + degree_b - cv
    dT = codeg - p * dV - ct
    return 1.0, dV, dT


# ---------------------------------------------------------------------------
# full decomposition

@dataclass(frozen=True)
class DecompositionTerm:
    subgraph: Motif
    hom_into_motif: int
    coefficient: float
    centered: float | np.ndarray


@lru_cache(maxsize=None)
def subgraph_classes(h: Motif) -> tuple[tuple[Motif, int], ...]:
    """Isomorphism classes F of nonempty subgraphs of ``h`` without isolated
    vertices, each with |hom(F, h)|. Ordered by (vertices, edges)."""
    if h.v > MAX_DECOMP_VERTICES:
        raise ValueError(f"decomposition limited to motifs with <= {MAX_DECOMP_VERTICES} vertices")
    seen: dict = {}
    for r in range(1, h.e + 1):
        for subset in itertools.combinations(h.edges, r):
            verts = sorted({u for e in subset for u in e})
            relabel = {u: k + 1 for k, u in enumerate(verts)}
            f = Motif(len(verts), tuple((relabel[i], relabel[j]) for i, j in subset))
            if f.key not in seen:
                seen[f.key] = f
    classes = sorted(seen.values(), key=lambda f: (f.v, f.e, f.key))
    H = h.adjacency()
    return tuple((f, int(round(float(weighted_hom_sum(f, H))))) for f in classes)


def full_decomposition(h: Motif, g, p: float) -> list[DecompositionTerm]:
    _check_p(p)
    n = _adj(g).shape[-1]
    if h.v > n:
        raise ValueError(f"motif with {h.v} vertices does not fit in n={n}")
    terms = []
    for f, hom_fh in subgraph_classes(h):
        coef = falling(n - f.v, h.v - f.v) * p ** (h.e - f.e) * hom_fh
        terms.append(DecompositionTerm(f, hom_fh, float(coef), centered_copy_count(f, g, p)))
    return terms


def reconstruct_hom(h: Motif, n: int, p: float, terms: list[DecompositionTerm]):
    return expected_hom(h, n, p) + sum(t.coefficient * t.centered for t in terms)


def decomposition_residual(h: Motif, g, p: float) -> float:
    """Max relative error of the reconstructed homomorphism count."""
    n = _adj(g).shape[-1]
    rebuilt = reconstruct_hom(h, n, p, full_decomposition(h, g, p))
    actual = np.asarray(hom_count(h, g), dtype=float)
    return float(np.max(np.abs(rebuilt - actual) / np.maximum(1.0, np.abs(actual))))


# ---------------------------------------------------------------------------
# remainders R_i

def _term_motif(spec, i: int) -> Motif:
    return spec.terms[i][0] if hasattr(spec, "terms") else spec[i]


def remainder_from_counts(h: Motif, hom, tilde: TildeStats, n: int, p: float):
    """R = hom / n^(v-3) - s p^(e-2) 2V~ - n e p^(e-1) 2E~ - t p^(e-3) 6T~."""
    out = hom / float(n) ** (h.v - 3) - h.s2 * p ** (h.e - 2) * 2 * tilde.v_tilde - n * h.e * p ** (h.e - 1) * 2 * tilde.e_tilde
    if h.t:
        out = out - h.t * p ** (h.e - 3) * 6 * tilde.t_tilde
    return out


def remainder(spec, g, p: float, i: int, variant: str = "approximate"):
    """Remainder R_i of term ``i`` (0-based) after removing its leading
    edge/two-star/triangle Hoeffding terms."""
    h = _term_motif(spec, i)
    A = _adj(g)
    n = A.shape[-1]
    hom = np.asarray(hom_count(h, A), dtype=float)
    out = remainder_from_counts(h, hom, tilde_stats(A, p, variant), n, p)
    return float(out) if np.ndim(out) == 0 else out


def delta_remainder(spec, g: Graph, p: float, i: int, s, variant: str = "approximate") -> float:
    """Delta_s R_i(g) from per-edge count deltas (no full recount)."""
    h = _term_motif(spec, i)
    a, b = (u - 1 for u in _check_pair(int(s[0]), int(s[1]), g.n))
    x = int(g.adj[a, b])
    n = g.n
    dE, dV, dT = delta_tilde(
        int(g.degree[a]) - x, int(g.degree[b]) - x, int(np.dot(g.adj[a], g.adj[b])), n, p, variant
    )
    out = h.aut * delta_copy(h, g, s) / float(n) ** (h.v - 3)
    out -= h.s2 * p ** (h.e - 2) * 2 * dV + n * h.e * p ** (h.e - 1) * 2 * dE
    if h.t:
        out -= h.t * p ** (h.e - 3) * 6 * dT
    return float(out)


def remainder_parts(h: Motif, g, p: float, variant: str = "approximate") -> dict:
    """Split R for a triangle-free motif on >= 4 vertices into
    ``const + R1 + R2 + R3``.

    R1 collects the subgraphs with >= 4 vertices, R2 the two-star term and R3
    the edge term; both R2 and R3 carry only the finite-n coefficient gaps.
    """
    if h.t or h.v < 4:
        raise ValueError("remainder parts are defined for triangle-free motifs with >= 4 vertices")
    A = _adj(g)
    n = A.shape[-1]
    scale = float(n) ** (h.v - 3)
    R1 = 0.0
    for term in full_decomposition(h, A, p):
        if term.subgraph.v >= 4:
            R1 = R1 + term.coefficient / scale * term.centered
    v_cent = centered_copy_count(Motif.two_star(), A, p)
    e_cent = centered_copy_count(Motif.edge(), A, p)
    R2 = (falling(n - 3, h.v - 3) / scale - 1.0) * p ** (h.e - 2) * 2 * h.s2 * v_cent
    R3 = (falling(n - 2, h.v - 2) / scale - n) * p ** (h.e - 1) * 2 * h.e * e_cent
    if variant == "approximate":
        # V~ (approximate) = #~(two-star) - 4p E~
        R3 = R3 + 8 * h.s2 * p ** (h.e - 1) * e_cent
    elif variant != "exact":
        raise ValueError(f"unknown tilde variant {variant!r}")
    return {"const": expected_hom(h, n, p) / scale, "R1": R1, "R2": R2, "R3": R3}
