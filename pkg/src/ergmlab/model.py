"""ERGM specifications and the four graph laws the samplers can target.

``Exact``          the ERGM itself, log-weight  n^2 sum_i beta_i t(H_i, G)
``FirstOrder``     G(n, p),                      E log(p / (1 - p))
``SecondOrder``    (6 c_T / n) T~ + (2 c_V / n) V~ + E log(p / (1 - p))
``TwoStarRewrite`` (2 b2 / n) V + 2 b1 E

with ``c_T = sum_i beta_i t_i p^(e_i - 3)`` and ``c_V = sum_i beta_i s_i p^(e_i - 2)``.
All log-weights are unnormalized; only differences matter to the samplers.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .fixed_point import solve_p
from .graph import Graph, _check_pair
from .hoeffding import delta_tilde, tilde_stats
from .motif import Motif, delta_copy, hom_count


@dataclass(frozen=True)
class ErgmSpec:
    terms: tuple[tuple[Motif, float], ...]

    def __post_init__(self):
        terms = tuple((m, float(b)) for m, b in self.terms)
        if not terms:
            raise ValueError("an ERGM needs at least the edge term")
        if terms[0][0].kind != "edge":
            raise ValueError("the first term must be the edge motif")
        for m, b in terms[1:]:
            if b < 0:
                raise ValueError(f"beta for {m.name} is {b}; beta_2..beta_k must be nonnegative")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_pairs(cls, *pairs) -> "ErgmSpec":
        return cls(tuple(pairs))

    @classmethod
    def edge_only(cls, beta1: float) -> "ErgmSpec":
        return cls(((Motif.edge(), beta1),))

    @classmethod
    def rectangle(cls, beta1: float = -0.08, beta2: float = 0.16) -> "ErgmSpec":
        return cls(((Motif.edge(), beta1), (Motif.rectangle(), beta2)))

    @classmethod
    def two_star(cls, beta1: float, beta2: float) -> "ErgmSpec":
        return cls(((Motif.edge(), beta1), (Motif.two_star(), beta2)))

    @classmethod
    def from_json(cls, obj) -> "ErgmSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple((Motif.from_json(t["motif"]), float(t["beta"])) for t in obj["terms"]))

    def to_json(self) -> dict:
        return {"terms": [{"motif": m.to_json(), "beta": b} for m, b in self.terms]}

    @property
    def betas(self) -> list[float]:
        return [b for _, b in self.terms]

    @property
    def motifs(self) -> list[Motif]:
        return [m for m, _ in self.terms]

    @property
    def max_vertices(self) -> int:
        return max(m.v for m in self.motifs)

    @property
    def triangle_free(self) -> bool:
        """All t_i = 0 (the condition the second-order error bound uses)."""
        return all(m.t == 0 for m in self.motifs)

    @property
    def no_two_stars(self) -> bool:
        """All s_i = 0 for i >= 2."""
        return all(m.s2 == 0 for m in self.motifs[1:])


@dataclass(frozen=True)
class Exact:
    pass


@dataclass(frozen=True)
class FirstOrder:
    p: float


@dataclass(frozen=True)
class SecondOrder:
    p: float
    c_T: float
    c_V: float


@dataclass(frozen=True)
class TwoStarRewrite:
    beta1_tilde: float
    beta2_tilde: float
    p: float | None = None


ModelKind = Union[Exact, FirstOrder, SecondOrder, TwoStarRewrite]
MODEL_NAMES = ("exact", "first", "second", "two-star")


def second_order_coefficients(spec: ErgmSpec, p: float) -> tuple[float, float]:
    c_T = sum(b * m.t * p ** (m.e - 3) for m, b in spec.terms if m.t)
    c_V = sum(b * m.s2 * p ** (m.e - 2) for m, b in spec.terms if m.s2)
    return float(c_T), float(c_V)


def rewrite_two_star(c_V: float, p: float) -> tuple[float, float]:
    """(beta1~, beta2~) with (2 c_V / n) V~ + E log(p/(1-p)) = (2 beta2~ / n) V + 2 beta1~ E + const."""
    return -2.0 * c_V * p + 0.5 * math.log(p / (1.0 - p)), c_V


def make_model(kind: str, spec: ErgmSpec, p: float | None = None) -> ModelKind:
    """Build a model of the given kind; ``p`` defaults to the fixed point of ``spec``."""
    if kind == "exact":
        return Exact()
    if p is None:
        p = solve_p(spec).p
    if kind == "first":
        return FirstOrder(p)
    c_T, c_V = second_order_coefficients(spec, p)
    if kind == "second":
        return SecondOrder(p, c_T, c_V)
    if kind == "two-star":
        if c_T:
            raise ValueError("the two-star rewrite needs a triangle-free spec (c_T = 0)")
        b1, b2 = rewrite_two_star(c_V, p)
        return TwoStarRewrite(b1, b2, p)
    raise ValueError(f"unknown model {kind!r}; expected one of {MODEL_NAMES}")


def model_name(model: ModelKind) -> str:
    return {Exact: "exact", FirstOrder: "first", SecondOrder: "second", TwoStarRewrite: "two-star"}[type(model)]


def reference_p(model: ModelKind, spec: ErgmSpec) -> float:
    """Edge density used to initialize chains for this model."""
    if isinstance(model, Exact):
        return solve_p(spec).p
    if isinstance(model, TwoStarRewrite):
        if model.p is not None:
            return model.p
        return solve_p(ErgmSpec.two_star(model.beta1_tilde, model.beta2_tilde)).p
    return model.p


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def log_weight(model: ModelKind, spec: ErgmSpec, g):
    """Unnormalized log-probability. ``g`` may be a Graph or a batch of adjacency matrices."""
    A = g.adj if isinstance(g, Graph) else np.asarray(g)
    n = A.shape[-1]
    E = A.sum(axis=(-1, -2)) / 2
    if isinstance(model, Exact):
        out = sum(b * np.asarray(hom_count(m, A), dtype=float) / float(n) ** (m.v - 2) for m, b in spec.terms)
    elif isinstance(model, FirstOrder):
        out = E * _logit(model.p)
    elif isinstance(model, SecondOrder):
        ts = tilde_stats(A, model.p, "approximate")
        out = 6 * model.c_T / n * ts.t_tilde + 2 * model.c_V / n * ts.v_tilde + E * _logit(model.p)
    elif isinstance(model, TwoStarRewrite):
        d = A.sum(axis=-1).astype(float)
        V = (d * (d - 1) / 2).sum(axis=-1)
        out = 2 * model.beta2_tilde / n * V + 2 * model.beta1_tilde * E
    else:
        raise TypeError(f"not a model: {model!r}")
    return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)


def delta_log_weight(model: ModelKind, spec: ErgmSpec, g: Graph, s) -> float:
    """log_weight(g with s) - log_weight(g without s), from local counts."""
    i, j = _check_pair(int(s[0]), int(s[1]), g.n)
    a, b = i - 1, j - 1
    n = g.n
    if isinstance(model, Exact):
        return float(sum(b_ * m.aut * delta_copy(m, g, (i, j)) / float(n) ** (m.v - 2) for m, b_ in spec.terms))
    if isinstance(model, FirstOrder):
        return _logit(model.p)
    x = int(g.adj[a, b])
    da, db = int(g.degree[a]) - x, int(g.degree[b]) - x
    if isinstance(model, SecondOrder):
        _, dV, dT = delta_tilde(da, db, int(np.dot(g.adj[a], g.adj[b])), n, model.p, "approximate")
        return 6 * model.c_T / n * dT + 2 * model.c_V / n * dV + _logit(model.p)
    if isinstance(model, TwoStarRewrite):
        return 2 * model.beta2_tilde / n * (da + db) + 2 * model.beta1_tilde
    raise TypeError(f"not a model: {model!r}")


def local_coefficients(model: ModelKind, spec: ErgmSpec, n: int):
    """Write the edge-update log-odds as ``c0 + c1 (d_a + d_b) + c2 codeg(a, b) + c3 dRect(a, b)``.

    Returns ``(c0, c1, c2, c3)``, or None when the model needs a generic
    motif count that has no such local form.
    """
    if isinstance(model, FirstOrder):
        return (_logit(model.p), 0.0, 0.0, 0.0)
    if isinstance(model, TwoStarRewrite):
        return (2 * model.beta1_tilde, 2 * model.beta2_tilde / n, 0.0, 0.0)
    if isinstance(model, SecondOrder):
        p = model.p
        kT, kV = 6 * model.c_T / n, 2 * model.c_V / n
        # dV~ = (d_a + d_b) - 2np ; dT~ = codeg - p dV~ - n p^2
        c1 = kV - kT * p
        c0 = _logit(p) - kV * 2 * n * p + kT * (p * 2 * n * p - n * p * p)
        return (c0, c1, kT, 0.0)
    if isinstance(model, Exact):
        c = [0.0, 0.0, 0.0, 0.0]
        slot = {"edge": 0, "two_star": 1, "triangle": 2, "rectangle": 3}
        for m, b in spec.terms:
            if m.kind is None:
                return None
            c[slot[m.kind]] += b * m.aut / float(n) ** (m.v - 2)
        return tuple(c)
    raise TypeError(f"not a model: {model!r}")
