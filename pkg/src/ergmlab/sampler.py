"""Glauber (heat-bath) dynamics for every model, plus exact enumeration.

Random stream
-------------
A chain seeded with ``seed`` draws from ``numpy.random.Generator(PCG64(seed))``
(``seed`` may be an int or a ``SeedSequence``) in this order:

1. N uniforms for the initial graph: edge s present iff ``u_s < p0``;
2. for every sweep, N uniforms (systematic scan), or N position uniforms
   (edge ``floor(u N)``) followed by N heat-bath uniforms (random scan).

Burn-in sweeps and recorded sweeps use the same layout. Coupled chains
(:func:`run_coupled`) share one stream, one initial graph and one scan order,
which is the common-random-numbers coupling used for paired estimates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.special import expit, logsumexp

from . import _kernels as K
from .graph import Graph, edge_arrays, edge_pair, num_edges
from .model import (
    ErgmSpec,
    Exact,
    FirstOrder,
    ModelKind,
    delta_log_weight,
    local_coefficients,
    log_weight,
    reference_p,
)
from .motif import count_edges, count_rectangles, count_triangles, count_two_stars

log = logging.getLogger(__name__)

SCANS = ("systematic", "random")
COLLECTORS = ("E", "V", "T", "R", "degrees", "hn", "marginals", "edges", "dR")
ENUM_DEFAULT_MAX_N = 6
ENUM_HARD_MAX_N = 7
_BLOCK_UPDATES = 1 << 18


@dataclass(frozen=True)
class ChainConfig:
    seed: int = 0
    burn_in_sweeps: int = 200
    sample_sweeps: int = 1000
    thin: int = 1
    scan: str = "systematic"

    def __post_init__(self):
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.burn_in_sweeps < 0 or self.sample_sweeps < 0:
            raise ValueError("sweep counts must be nonnegative")
        if self.scan not in SCANS:
            raise ValueError(f"scan must be one of {SCANS}")

    @property
    def num_records(self) -> int:
        return self.sample_sweeps // self.thin

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class ChainState:
    """Mutable per-chain state handed to the compiled kernels."""

    adj: np.ndarray
    deg: np.ndarray
    cod: np.ndarray
    tracked: bool

    @classmethod
    def from_graph(cls, g: Graph, tracked: bool) -> "ChainState":
        adj = g.adj.copy()
        cod = adj.astype(np.int64) @ adj.astype(np.int64) if tracked else np.zeros((1, 1), np.int64)
        if tracked:
            np.fill_diagonal(cod, 0)
        return cls(adj, g.degree.copy(), cod.astype(np.int32), tracked)

    def graph(self) -> Graph:
        return Graph.from_adjacency(self.adj)

    def codegrees(self) -> np.ndarray:
        if self.tracked:
            return self.cod
        A = self.adj.astype(np.int64)
        C = A @ A
        np.fill_diagonal(C, 0)
        return C


@dataclass
class Collect:
    """What to record at each sample.

    ``names`` picks from :data:`COLLECTORS`. ``edges`` is a sequence of 1-based
    pairs used by ``marginals`` (Rao-Blackwellized: the conditional edge
    probability given the rest of the graph), ``edges`` (raw indicators) and
    ``dR`` (four-cycle remainder difference, needs ``dR_p``). ``hn_table`` is the
    per-degree table of the test function for ``hn``.
    """

    names: Sequence[str] = ("E",)
    edges: Sequence[tuple[int, int]] = ()
    hn_table: np.ndarray | None = None
    dR_p: float | None = None
    extra: Mapping[str, Callable[[Graph], float]] = field(default_factory=dict)

    def validate(self, n: int, spec: ErgmSpec | None = None) -> None:
        for name in self.names:
            if name not in COLLECTORS:
                raise ValueError(f"unknown collector {name!r}; expected one of {COLLECTORS}")
        need = {"V": 3, "T": 3, "R": 4, "dR": 4}
        for name in self.names:
            if name in need and need[name] > n:
                raise ValueError(f"collector {name} needs a motif on {need[name]} vertices, n={n}")
        if "hn" in self.names and (self.hn_table is None or len(self.hn_table) != n):
            raise ValueError("collector hn needs an hn_table of length n")
        if any(x in self.names for x in ("marginals", "edges", "dR")) and not self.edges:
            raise ValueError("edge collectors need a nonempty edge set")
        if "dR" in self.names and self.dR_p is None:
            raise ValueError("collector dR needs dR_p")


def _edge_endpoints(edges, n):
    ea = np.array([min(i, j) - 1 for i, j in edges], dtype=np.int64)
    eb = np.array([max(i, j) - 1 for i, j in edges], dtype=np.int64)
    if len(ea) and (ea.min() < 0 or eb.max() >= n or np.any(ea == eb)):
        raise ValueError("collector edges out of range")
    return ea, eb


class _Chain:
    """One model's state inside a (possibly coupled) run."""

    def __init__(self, model: ModelKind, spec: ErgmSpec, g0: Graph):
        self.model = model
        self.spec = spec
        self.n = g0.n
        coeffs = local_coefficients(model, spec, g0.n)
        self.generic = coeffs is None
        if self.generic:
            self.coeffs = (0.0, 0.0, 0.0, 0.0)
            self.g = g0.copy()
            self.state = ChainState.from_graph(g0, False)
        else:
            self.coeffs = tuple(float(c) for c in coeffs)
            tracked = self.coeffs[2] != 0.0 or self.coeffs[3] != 0.0
            self.state = ChainState.from_graph(g0, tracked)

    def advance(self, block: np.ndarray, ea, eb, random_scan: bool) -> None:
        if not self.generic:
            st = self.state
            K.sweeps(st.adj, st.deg, st.cod, ea, eb, block, random_scan, *self.coeffs, st.tracked)
            return
        N = len(ea)
        g = self.g
        for row in block:
            for k in range(N):
                if random_scan:
                    s = min(int(row[k] * N), N - 1)
                    u = row[N + k]
                else:
                    s, u = k, row[k]
                i, j = int(ea[s]) + 1, int(eb[s]) + 1
                on = u < expit(delta_log_weight(self.model, self.spec, g, (i, j)))
                g.set_edge(i, j, on)
        self.state = ChainState.from_graph(g, False)

    def record(self, collect: Collect, ca, cb) -> dict:
        st = self.state
        out = {}
        deg = st.deg
        for name in collect.names:
            if name == "E":
                out[name] = int(deg.sum()) // 2
            elif name == "V":
                out[name] = int((deg * (deg - 1) // 2).sum())
            elif name == "T":
                out[name] = int((st.adj * st.codegrees()).sum()) // 6
            elif name == "R":
                C = st.codegrees().astype(np.int64)
                out[name] = int((C * (C - 1) // 2).sum()) // 4
            elif name == "degrees":
                out[name] = deg.copy()
            elif name == "hn":
                out[name] = float(collect.hn_table[deg].sum())
            elif name == "edges":
                out[name] = st.adj[ca, cb].astype(np.int8)
            elif name == "marginals":
                if self.generic:
                    g = self.g
                    out[name] = np.array(
                        [expit(delta_log_weight(self.model, self.spec, g, (int(a) + 1, int(b) + 1))) for a, b in zip(ca, cb)]
                    )
                else:
                    out[name] = K.conditional_probs(st.adj, st.deg, st.cod, ca, cb, *self.coeffs, st.tracked)
            elif name == "dR":
                out[name] = _rect_remainder_deltas(st, ca, cb, collect.dR_p)
        for key, fn in collect.extra.items():
            out[key] = fn(st.graph())
        return out


def _rect_remainder_deltas(st: ChainState, ca, cb, p: float) -> np.ndarray:
    """Delta_s R for the rectangle term, approximate tilde variant:
    8 dRect / n - 8 p^2 ((d_a + d_b) - 2 n p) - 8 n p^3."""
    n = st.adj.shape[0]
    x = st.adj[ca, cb]
    drect = K.rect_deltas(st.adj, ca, cb)
    dsum = st.deg[ca] + st.deg[cb] - 2 * x
    return 8.0 * drect / n - 8.0 * p * p * (dsum - 2.0 * n * p) - 8.0 * n * p ** 3


def _initial_graph(n: int, p0: float, rng: np.random.Generator) -> Graph:
    return Graph.from_vector(rng.random(num_edges(n)) < p0, n)


def _run(chains: list[_Chain], n: int, cfg: ChainConfig, collect: Collect, rng) -> list[dict]:
    N = num_edges(n)
    ea, eb = edge_arrays(n)
    width = 2 * N if cfg.scan == "random" else N
    random_scan = cfg.scan == "random"
    ca, cb = _edge_endpoints(collect.edges, n)

    def advance(num_sweeps: int) -> None:
        per_block = max(1, _BLOCK_UPDATES // width)
        left = num_sweeps
        while left > 0:
            k = min(per_block, left)
            block = rng.random((k, width))
            for ch in chains:
                ch.advance(block, ea, eb, random_scan)
            left -= k

    advance(cfg.burn_in_sweeps)
    records: list[list[dict]] = [[] for _ in chains]
    for _ in range(cfg.num_records):
        advance(cfg.thin)
        for ch, rec in zip(chains, records):
            rec.append(ch.record(collect, ca, cb))
    out = []
    for rec in records:
        keys = list(collect.names) + list(collect.extra)
        out.append({k: np.array([r[k] for r in rec]) for k in keys})
    return out


def run_coupled(
    models: Sequence[ModelKind],
    spec: ErgmSpec,
    n: int,
    cfg: ChainConfig,
    collect: Collect | None = None,
    init_p: float | None = None,
) -> list[dict]:
    """Run one chain per model, all driven by the same uniforms.

    Returns one dict per model mapping collector name to an array with one
    entry (or row) per recorded sample.
    """
    collect = collect or Collect()
    collect.validate(n, spec)
    if n < 2:
        raise ValueError("need n >= 2")
    if init_p is None:
        init_p = reference_p(models[0], spec)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    g0 = _initial_graph(n, init_p, rng)
    chains = [_Chain(m, spec, g0) for m in models]
    return _run(chains, n, cfg, collect, rng)


def run_chain(
    model: ModelKind,
    spec: ErgmSpec,
    n: int,
    cfg: ChainConfig,
    collect: Collect | None = None,
    init_p: float | None = None,
) -> dict:
    return run_coupled([model], spec, n, cfg, collect, init_p)[0]


def glauber_step(g: Graph, model: ModelKind, spec: ErgmSpec, s, u: float) -> Graph:
    """Heat-bath update of edge ``s`` with the supplied uniform ``u``, in place."""
    if not 0.0 <= u < 1.0:
        raise ValueError("u must lie in [0, 1)")
    prob = expit(delta_log_weight(model, spec, g, s))
    return g.set_edge(int(s[0]), int(s[1]), u < prob)


def conditional_probability(g: Graph, model: ModelKind, spec: ErgmSpec, s) -> float:
    return float(expit(delta_log_weight(model, spec, g, s)))


# ---------------------------------------------------------------------------
# exact enumeration

STAT_FUNCS = {
    "E": count_edges,
    "V": count_two_stars,
    "T": count_triangles,
    "R": count_rectangles,
}


@dataclass
class EnumerationResult:
    n: int
    log_Z: float
    log_weights: np.ndarray
    expectations: dict

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_Z)

    def prob(self, index: int) -> float:
        return float(np.exp(self.log_weights[index] - self.log_Z))

    def graph(self, index: int) -> Graph:
        return Graph.from_vector(_index_bits(np.array([index]), num_edges(self.n))[0], self.n)

    def index_of(self, g: Graph) -> int:
        return int(np.dot(g.to_vector().astype(np.int64), 1 << np.arange(num_edges(self.n), dtype=np.int64)))

    def conditional(self, g: Graph, s) -> float:
        """P(edge s present | rest of g) from the enumerated distribution."""
        on = g.copy().set_edge(s[0], s[1], True)
        off = g.copy().set_edge(s[0], s[1], False)
        lw1, lw0 = self.log_weights[self.index_of(on)], self.log_weights[self.index_of(off)]
        return float(expit(lw1 - lw0))


def _index_bits(idx: np.ndarray, N: int) -> np.ndarray:
    return ((idx[:, None] >> np.arange(N, dtype=np.int64)) & 1).astype(np.int8)


def all_adjacency(n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Adjacency matrices of graphs ``start..stop-1``; graph k has edge s iff bit s of k is set."""
    N = num_edges(n)
    stop = (1 << N) if stop is None else stop
    bits = _index_bits(np.arange(start, stop, dtype=np.int64), N)
    A = np.zeros((len(bits), n, n), dtype=np.int8)
    a, b = edge_arrays(n)
    A[:, a, b] = bits
    A[:, b, a] = bits
    return A


def enumerate_model(
    model: ModelKind,
    spec: ErgmSpec,
    n: int,
    statistics: Sequence[str] | Mapping[str, Callable] = ("E", "V", "T", "R"),
    allow_large: bool = False,
) -> EnumerationResult:
    """Exact normalizing constant and expectations by summing over all graphs."""
    limit = ENUM_HARD_MAX_N if allow_large else ENUM_DEFAULT_MAX_N
    if n > limit:
        raise ValueError(f"enumeration over 2^{num_edges(n)} graphs refused for n={n} (limit {limit})")
    if isinstance(statistics, Mapping):
        funcs = dict(statistics)
    else:
        funcs = {}
        for name in statistics:
            if name not in STAT_FUNCS:
                raise ValueError(f"unknown statistic {name!r}")
            funcs[name] = STAT_FUNCS[name]
    total = 1 << num_edges(n)
    chunk = 1 << 15
    lws, vals = [], {k: [] for k in funcs}
    for start in range(0, total, chunk):
        A = all_adjacency(n, start, min(total, start + chunk))
        lws.append(np.atleast_1d(log_weight(model, spec, A)))
        for k, f in funcs.items():
            vals[k].append(np.asarray(f(A), dtype=float))
    lw = np.concatenate(lws)
    log_Z = float(logsumexp(lw))
    prob = np.exp(lw - log_Z)
    expectations = {k: float(np.dot(prob, np.concatenate(v))) for k, v in vals.items()}
    return EnumerationResult(n, log_Z, lw, expectations)


# ---------------------------------------------------------------------------
# summaries

def batch_means_stderr(x: np.ndarray, batches: int = 20) -> float:
    """Standard error of the mean of a correlated series by batch means."""
    x = np.asarray(x, dtype=float)
    m = len(x) // batches
    if m < 1:
        return float(np.std(x, ddof=1) / math.sqrt(len(x))) if len(x) > 1 else float("nan")
    means = x[: m * batches].reshape(batches, m).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(batches))


def chain_mean_stderr(chain_means: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error across independent chains."""
    x = np.asarray(chain_means, dtype=float)
    if len(x) < 2:
        return float(x.mean()), float("nan")
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


def sample_edges(n: int, k: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """``k`` distinct edges (1-based) drawn uniformly without replacement."""
    N = num_edges(n)
    idx = np.sort(rng.choice(N, size=min(k, N), replace=False))
    return [tuple(edge_pair(int(i), n)) for i in idx]
