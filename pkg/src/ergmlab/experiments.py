"""Experiment drivers: sharpness, scaling, marginals, remainders, decomposition.

Every experiment is a pure function of its resolved :class:`ExperimentConfig`.
Chain seeds are derived as ``SeedSequence(seed, spawn_key=(purpose, n, chain))``
so a chain's stream does not depend on which other points or models are in
the run, and per-chain tasks are merged in (n, chain) order whatever the
number of workers.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
import platform
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .fixed_point import solve_p
from .graph import Graph, edge_arrays, num_edges
from .hoeffding import centered_copy_count, decomposition_residual, subgraph_classes
from .model import ErgmSpec, make_model, rewrite_two_star, second_order_coefficients
from .motif import Motif, count_edges, count_rectangles, count_two_stars
from .sampler import ChainConfig, Collect, all_adjacency, run_coupled, sample_edges
from .testfn import (
    SharpnessParams,
    SharpnessReport,
    bounded_diff_norm_hn,
    expect_hn_under_er,
    hn_table,
    sharpness_constants,
)

log = logging.getLogger(__name__)

EXPERIMENTS = ("sharpness", "scaling", "marginals", "remainders", "decomposition")
CSV_FIELDS = ("experiment", "n", "model", "stat", "estimate", "stderr", "seed", "sweeps")
MIN_CHAINS = 8

# spawn-key purposes
_CHAIN, _EDGES, _MC = 1, 2, 3

_DEFAULTS = {
    "sharpness": dict(n_grid=[300], models=["two-star", "exact"], chains=8, burn_in=200, sweeps=300),
    "scaling": dict(n_grid=[64, 128, 256], models=["exact", "first", "second"], chains=8, burn_in=200, sweeps=400),
    "marginals": dict(n_grid=[32, 64, 128, 256], models=["two-star"], chains=8, burn_in=200, sweeps=600),
    "remainders": dict(n_grid=[32, 64, 128, 256], models=["two-star"], chains=8, burn_in=200, sweeps=400),
    "decomposition": dict(n_grid=[16, 32, 64], models=[], chains=1, burn_in=0, sweeps=0),
}


@dataclass
class ExperimentConfig:
    experiment: str
    spec: dict | None = None  # resolved spec JSON; None means the rectangle example
    spec_path: str | None = None
    n_grid: list = field(default_factory=lambda: [32, 64, 128, 256])
    seed: int = 20240611
    chains: int = 8
    burn_in: int = 200
    sweeps: int = 1000
    thin: int = 1
    scan: str = "systematic"
    models: list = field(default_factory=list)
    M: float = 200.0
    quad_nodes: int = 64
    method: str = "analytic"
    edges_per_n: int = 32
    exact_n: int = 5
    mc_samples: int = 4000
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        self.n_grid = [int(n) for n in self.n_grid]
        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError(f"n grid must be nonempty and strictly increasing, got {self.n_grid}")
        if min(self.n_grid) < 4:
            raise ValueError("every n in the grid must be >= 4")
        if self.chains < 1 or self.workers < 1:
            raise ValueError("chains and workers must be >= 1")
        if self.spec is None and self.spec_path is not None:
            self.spec = json.loads(Path(self.spec_path).read_text())
        if self.spec is None:
            self.spec = ErgmSpec.rectangle().to_json()
        self.models = list(self.models)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        """Experiment defaults, then the keys of ``d`` on top."""
        d = dict(d)
        name = d.get("experiment")
        base = dict(_DEFAULTS.get(name, {}))
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        base.update(d)
        return cls(**base)

    def ergm(self) -> ErgmSpec:
        return ErgmSpec.from_json(self.spec)

    def chain_config(self, n: int, chain: int) -> ChainConfig:
        return ChainConfig(
            seed=chain_seed(self.seed, n, chain),
            burn_in_sweeps=self.burn_in,
            sample_sweeps=self.sweeps,
            thin=self.thin,
            scan=self.scan,
        )

    def to_json(self) -> dict:
        return asdict(self)


def chain_seed(master: int, n: int, chain: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master, spawn_key=(_CHAIN, n, chain))


def _rng(master: int, purpose: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master, spawn_key=(purpose, *keys))))


# ---------------------------------------------------------------------------
# rows and output

@dataclass
class Row:
    experiment: str
    n: int | str
    model: str
    stat: str
    estimate: float
    stderr: float
    seed: int
    sweeps: int


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(float(x))
    if isinstance(x, (np.floating,)):
        return repr(float(x))
    return str(x)


def rows_to_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([_fmt(getattr(r, k)) for k in CSV_FIELDS])
    return buf.getvalue()


def _versions() -> dict:
    import numba
    import scipy

    return {
        "ergmlab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "python": platform.python_version(),
    }


# execution settings that cannot change results; kept out of the manifest so
# serial and parallel runs (or runs into different directories) match byte for byte
_EXECUTION_ONLY = ("workers", "output")


def manifest(cfg: ExperimentConfig, extra: dict | None = None) -> dict:
    conf = {k: v for k, v in cfg.to_json().items() if k not in _EXECUTION_ONLY}
    out = {"config": conf, "seed": cfg.seed, "versions": _versions()}
    if extra:
        out.update(extra)
    return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def write_outputs(out_dir, cfg: ExperimentConfig, rows: list[Row], report) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{cfg.experiment}.csv"
    man_path = out / f"{cfg.experiment}.manifest.json"
    csv_path.write_text(rows_to_csv(rows))
    rep = report.to_json() if hasattr(report, "to_json") else report
    man = manifest(cfg, {"report": _jsonable(rep)})
    man_path.write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")
    return csv_path, man_path


# ---------------------------------------------------------------------------
# task fan-out

def _map(fn, tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def _hn_chain_task(task) -> dict:
    """Chain means of h_n for coupled models. ``task`` is a plain tuple so it pickles."""
    spec_json, model_names, p, n, cfg, table = task
    spec = ErgmSpec.from_json(spec_json)
    models = [make_model(m, spec, p) for m in model_names]
    out = run_coupled(models, spec, n, cfg, Collect(("hn",), hn_table=table), init_p=p)
    return {m: float(o["hn"].mean()) for m, o in zip(model_names, out)}


def _edge_chain_task(task) -> dict:
    spec_json, model_name, p, n, cfg, edges, names = task
    spec = ErgmSpec.from_json(spec_json)
    model = make_model(model_name, spec, p)
    col = Collect(names, edges, dR_p=p if "dR" in names else None)
    (out,) = run_coupled([model], spec, n, cfg, col, init_p=p)
    res = {}
    if "marginals" in names:
        res["marginals"] = out["marginals"].mean(axis=0)
    if "dR" in names:
        res["abs_dR"] = float(np.abs(out["dR"]).mean())
        res["dR"] = float(out["dR"].mean())
    return res


def _mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        return float(x.mean()), float("nan")
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


def loglog_slope(ns, ys) -> tuple[float, float]:
    """OLS slope of log y on log n and the RMS residual; NaN if any y <= 0."""
    ns, ys = np.asarray(ns, float), np.asarray(ys, float)
    if len(ns) < 2 or np.any(ys <= 0) or not np.all(np.isfinite(ys)):
        return float("nan"), float("nan")
    X, Y = np.log(ns), np.log(ys)
    slope, icpt = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + icpt)
    return float(slope), float(np.sqrt(np.mean(resid**2)))


# ---------------------------------------------------------------------------
# common setup

@dataclass
class _Setup:
    spec: ErgmSpec
    p: float
    residual: float
    subcritical: bool
    dobrushin: bool
    Phi_prime_1: float
    beta1_tilde: float
    beta2_tilde: float
    params: SharpnessParams


def _setup(cfg: ExperimentConfig, need_hn: bool = True) -> _Setup:
    spec = cfg.ergm()
    fp = solve_p(spec)
    c_T, c_V = second_order_coefficients(spec, fp.p)
    b1, b2 = rewrite_two_star(c_V, fp.p)
    params = None
    if need_hn:
        if b2 <= 0:
            raise ValueError("the h_n test function needs beta2~ = c_V > 0; this ERGM has no two-star component")
        params = SharpnessParams(fp.p, b2, cfg.M, cfg.quad_nodes, cfg.method)
    return _Setup(spec, fp.p, fp.residual, fp.subcritical, fp.dobrushin, fp.Phi_prime_1, b1, b2, params)


def _check_models(models, allowed, what):
    for m in models:
        if m not in allowed:
            raise ValueError(f"{what}: model {m!r} not allowed here (choose from {allowed})")


# ---------------------------------------------------------------------------
# sharpness

def experiment_sharpness(cfg: ExperimentConfig) -> tuple[SharpnessReport, list[Row]]:
    """E h_n under G(n, p) exactly, and under the two-star rewrite and the
    exact model by coupled chains, against the constants 1/a1~ and the
    Erdos-Renyi bound."""
    models = cfg.models or ["two-star", "exact"]
    _check_models(models, ("two-star", "exact", "second"), "sharpness")
    su = _setup(cfg)
    if not su.dobrushin:
        raise ValueError(
            f"spec is outside the Dobrushin region: Phi'(1) = {su.Phi_prime_1:.6g} >= 2; refusing the sharpness run"
        )
    rep = sharpness_constants(su.p, su.beta2_tilde)
    rows = []
    R = lambda n, m, s, e, se=0.0: rows.append(Row("sharpness", n, m, s, e, se, cfg.seed, cfg.sweeps))
    R("", "", "p", su.p)
    R("", "", "fixed_point_residual", su.residual)
    R("", "", "beta1_tilde", su.beta1_tilde)
    R("", "", "beta2_tilde", su.beta2_tilde)
    R("", "", "a1_tilde", rep.a1_tilde)
    R("", "", "target", rep.target)
    R("", "", "er_bound", rep.er_bound)
    for n in cfg.n_grid:
        table = hn_table(n, su.params)
        tasks = [(cfg.spec, tuple(models), su.p, n, cfg.chain_config(n, c), table) for c in range(cfg.chains)]
        res = _map(_hn_chain_task, tasks, cfg.workers)
        ez = expect_hn_under_er(n, su.params)
        est = {"hn_Z": (ez, 0.0)}
        R(n, "first", "hn_mean", ez)
        for m in models:
            mean, se = _mean_se([r[m] for r in res])
            est[f"hn_{m}"] = (mean, se)
            R(n, m, "hn_mean", mean, se)
            gap, gse = _mean_se([r[m] - ez for r in res])
            est[f"gap_{m}_vs_Z"] = (gap, gse)
            R(n, m, "gap_vs_first", gap, gse)
        if len(models) >= 2:
            a, b = models[0], models[1]
            d, dse = _mean_se([r[a] - r[b] for r in res])
            est[f"diff_{a}_minus_{b}"] = (d, dse)
            R(n, f"{a}-{b}", "hn_paired_diff", d, dse)
        rep.estimates[n] = est
    return rep, rows


# ---------------------------------------------------------------------------
# scaling

@dataclass
class ScalingReport:
    ns: list
    models: list
    D1: list
    D1_se: list
    D2: list
    D2_se: list
    norm: list
    ratio1: list
    ratio2: list
    slope1: float
    slope1_rms: float
    slope2: float
    slope2_rms: float
    unstable: bool
    p: float
    beta2_tilde: float

    def to_json(self) -> dict:
        return asdict(self)


def experiment_scaling(cfg: ExperimentConfig) -> tuple[ScalingReport, list[Row]]:
    """D1 = |E h_n(X) - E h_n(first)| and D2 = |E h_n(X) - E h_n(second)|.

    ``models`` is ``[reference, first comparator, second comparator]``. A model
    named ``first`` is never simulated: its expectation is the exact G(n, p)
    value, so with both comparators set to ``first`` the two discrepancies
    are computed from identical numbers. Simulated models share one coupled
    stream per chain.
    """
    models = cfg.models or ["exact", "first", "second"]
    if len(models) != 3:
        raise ValueError("scaling needs models = [reference, first comparator, second comparator]")
    _check_models(models, ("exact", "first", "second", "two-star"), "scaling")
    su = _setup(cfg)
    if not (su.subcritical and su.dobrushin):
        raise ValueError(
            f"sanity gate: spec must be subcritical and in the Dobrushin region "
            f"(subcritical={su.subcritical}, Phi'(1)={su.Phi_prime_1:.6g})"
        )
    unstable = cfg.chains < MIN_CHAINS
    if unstable:
        warnings.warn(f"{cfg.chains} chains per point (< {MIN_CHAINS}); error bars are unreliable, report marked unstable")
    simulated = [m for m in dict.fromkeys(models) if m != "first"]
    ref, m1, m2 = models
    rows = []
    R = lambda n, m, s, e, se=0.0: rows.append(Row("scaling", n, m, s, e, se, cfg.seed, cfg.sweeps))
    D1, D1se, D2, D2se, norms, r1, r2 = [], [], [], [], [], [], []
    for n in cfg.n_grid:
        table = hn_table(n, su.params)
        ez = expect_hn_under_er(n, su.params)
        norm = bounded_diff_norm_hn(n, su.params)
        if simulated:
            tasks = [(cfg.spec, tuple(simulated), su.p, n, cfg.chain_config(n, c), table) for c in range(cfg.chains)]
            res = _map(_hn_chain_task, tasks, cfg.workers)
        else:
            res = [{} for _ in range(cfg.chains)]
        vals = {m: np.array([r[m] if m != "first" else ez for r in res]) for m in dict.fromkeys(models)}
        for m in vals:
            mean, se = _mean_se(vals[m])
            R(n, m, "hn_mean", mean, se)
        d1, s1 = _mean_se(vals[ref] - vals[m1])
        d2, s2 = _mean_se(vals[ref] - vals[m2])
        d1, d2 = abs(d1), abs(d2)
        D1.append(d1), D1se.append(s1), D2.append(d2), D2se.append(s2), norms.append(norm)
        r1.append(d1 / (norm * n**1.5))
        r2.append(d2 / (norm * n))
        R(n, f"{ref}-{m1}", "D1", d1, s1)
        R(n, f"{ref}-{m2}", "D2", d2, s2)
        R(n, "", "delta_norm", norm)
        R(n, f"{ref}-{m1}", "D1_ratio_n32", r1[-1], s1 / (norm * n**1.5))
        R(n, f"{ref}-{m2}", "D2_ratio_n", r2[-1], s2 / (norm * n))
    sl1, rms1 = loglog_slope(cfg.n_grid, D1)
    sl2, rms2 = loglog_slope(cfg.n_grid, D2)
    R("all", f"{ref}-{m1}", "D1_slope", sl1, rms1)
    R("all", f"{ref}-{m2}", "D2_slope", sl2, rms2)
    R("all", "", "unstable", float(unstable))
    rep = ScalingReport(
        list(cfg.n_grid), list(models), D1, D1se, D2, D2se, norms, r1, r2, sl1, rms1, sl2, rms2, unstable, su.p, su.beta2_tilde
    )
    return rep, rows


# ---------------------------------------------------------------------------
# marginals and remainders

def _edges_for(cfg: ExperimentConfig, n: int) -> list:
    return sample_edges(n, cfg.edges_per_n, _rng(cfg.seed, _EDGES, n))


@dataclass
class MarginalsReport:
    model: str
    p: float
    ns: list
    max_dev: list
    max_dev_se: list
    mean_dev: list
    signed_dev: list
    signed_dev_se: list
    slope_max: float
    slope_max_rms: float
    slope_mean: float
    n_times_max_ratio: float

    def to_json(self) -> dict:
        return asdict(self)


def experiment_marginals(cfg: ExperimentConfig) -> tuple[MarginalsReport, list[Row]]:
    """Rao-Blackwellized edge marginals E Y_l on a seeded sample of edges,
    compared with p."""
    models = cfg.models or ["two-star"]
    _check_models(models, ("two-star", "second", "first"), "marginals")
    model = models[0]
    su = _setup(cfg, need_hn=False)
    rows = []
    R = lambda n, s, e, se=0.0: rows.append(Row("marginals", n, model, s, e, se, cfg.seed, cfg.sweeps))
    mx, mxse, mn, sg, sgse = [], [], [], [], []
    for n in cfg.n_grid:
        edges = _edges_for(cfg, n)
        tasks = [(cfg.spec, model, su.p, n, cfg.chain_config(n, c), edges, ("marginals",)) for c in range(cfg.chains)]
        res = _map(_edge_chain_task, tasks, cfg.workers)
        M = np.stack([r["marginals"] for r in res])  # chains x edges
        est = M.mean(axis=0)
        se = M.std(axis=0, ddof=1) / math.sqrt(len(M)) if len(M) > 1 else np.full(len(est), np.nan)
        dev = np.abs(est - su.p)
        k = int(np.argmax(dev))
        pooled, pooled_se = _mean_se(M.mean(axis=1) - su.p)
        mx.append(float(dev[k])), mxse.append(float(se[k])), mn.append(float(dev.mean()))
        sg.append(pooled), sgse.append(pooled_se)
        R(n, "max_abs_dev", dev[k], se[k])
        R(n, "mean_abs_dev", dev.mean(), float(np.sqrt(np.mean(se**2))))
        R(n, "pooled_signed_dev", pooled, pooled_se)
        R(n, "n_times_max_abs_dev", n * dev[k], n * se[k])
    s_max, rms_max = loglog_slope(cfg.n_grid, mx)
    s_mean, _ = loglog_slope(cfg.n_grid, mn)
    nm = np.array(cfg.n_grid) * np.array(mx)
    ratio = float(nm.max() / nm.min()) if nm.min() > 0 else float("inf")
    R("all", "slope_max_abs_dev", s_max, rms_max)
    R("all", "slope_mean_abs_dev", s_mean)
    R("all", "n_times_max_ratio", ratio)
    rep = MarginalsReport(model, su.p, list(cfg.n_grid), mx, mxse, mn, sg, sgse, s_max, rms_max, s_mean, ratio)
    return rep, rows


@dataclass
class RemainderReport:
    model: str
    p: float
    ns: list
    mean_abs_delta: list
    mean_abs_delta_se: list
    mean_delta: list
    mean_delta_se: list
    max_step_ratio: float

    def to_json(self) -> dict:
        return asdict(self)


def experiment_remainders(cfg: ExperimentConfig) -> tuple[RemainderReport, list[Row]]:
    """E|Delta_s R| of the four-cycle term along chains of the approximating model."""
    models = cfg.models or ["two-star"]
    _check_models(models, ("two-star", "second", "first", "exact"), "remainders")
    model = models[0]
    su = _setup(cfg, need_hn=False)
    if not any(m.kind == "rectangle" for m in su.spec.motifs[1:]):
        raise ValueError("the remainder experiment tracks the four-cycle term; this ERGM has none")
    rows = []
    R = lambda n, s, e, se=0.0: rows.append(Row("remainders", n, model, s, e, se, cfg.seed, cfg.sweeps))
    a, ase, d, dse = [], [], [], []
    for n in cfg.n_grid:
        edges = _edges_for(cfg, n)
        tasks = [(cfg.spec, model, su.p, n, cfg.chain_config(n, c), edges, ("dR",)) for c in range(cfg.chains)]
        res = _map(_edge_chain_task, tasks, cfg.workers)
        m1, s1 = _mean_se([r["abs_dR"] for r in res])
        m2, s2 = _mean_se([r["dR"] for r in res])
        a.append(m1), ase.append(s1), d.append(m2), dse.append(s2)
        R(n, "mean_abs_delta_R", m1, s1)
        R(n, "mean_delta_R", m2, s2)
    steps = [b / a_ for a_, b in zip(a, a[1:])] or [1.0]
    R("all", "max_step_ratio", max(steps))
    return RemainderReport(model, su.p, list(cfg.n_grid), a, ase, d, dse, float(max(steps))), rows


# ---------------------------------------------------------------------------
# decomposition

@dataclass
class DecompositionReport:
    identity: dict
    orthogonality_edge_products: float
    orthogonality_classes: float
    mean_centered_max: float
    exact_variance: dict
    mc_variance: dict

    def to_json(self) -> dict:
        return asdict(self)


def _er_weights(n: int, p: float):
    A = all_adjacency(n)
    E = A.sum(axis=(1, 2)) // 2
    return A, p**E * (1 - p) ** (num_edges(n) - E)


def orthogonality_edge_products(n: int, p: float) -> tuple[float, float]:
    """Max |E prod_S| and max |Cov(prod_S, prod_S')| over distinct nonempty
    edge subsets S, S' of K_n, by enumeration under G(n, p)."""
    A, w = _er_weights(n, p)
    a, b = edge_arrays(n)
    Z = A[:, a, b].astype(float) - p  # graphs x edges
    N = Z.shape[1]
    subsets = [s for r in range(1, N + 1) for s in itertools.combinations(range(N), r)]
    prods = np.stack([Z[:, list(s)].prod(axis=1) for s in subsets], axis=1)
    means = w @ prods
    second = (prods * w[:, None]).T @ prods
    cov = second - np.outer(means, means)
    np.fill_diagonal(cov, 0.0)
    return float(np.abs(means).max()), float(np.abs(cov).max())


def _rect_remainders(A, n: int, p: float):
    """First- and second-order remainders of the four-cycle count (constants dropped)."""
    E = np.asarray(count_edges(A), float)
    V = np.asarray(count_two_stars(A), float)
    Q = np.asarray(count_rectangles(A), float)
    r1 = Q - n * n * p**3 * E
    r2 = Q - n * p * p * (V - 2 * n * p * E) - n * n * p**3 * E
    return r1, r2


def experiment_decomposition(cfg: ExperimentConfig) -> tuple[DecompositionReport, list[Row]]:
    if cfg.exact_n > 6:
        raise ValueError(f"exact mode enumerates 2^C(n,2) graphs; n={cfg.exact_n} is too large (max 6)")
    su = _setup(cfg, need_hn=False)
    rows = []
    R = lambda n, m, s, e, se=0.0: rows.append(Row("decomposition", n, m, s, e, se, cfg.seed, 0))

    n = cfg.exact_n
    A = all_adjacency(n)
    identity = {}
    for name in ("two_star", "triangle", "rectangle"):
        h = getattr(Motif, name)()
        for p in (0.3, 0.5):
            r = decomposition_residual(h, A, p)
            identity[f"{name}@{p}"] = r
            R(n, name, f"identity_max_rel_residual_p{p}", r)

    mean_max, cov_max = orthogonality_edge_products(4, 0.5)
    R(4, "edge_products", "max_abs_mean", mean_max)
    R(4, "edge_products", "max_abs_cov", cov_max)
    A4, w4 = _er_weights(4, 0.5)
    cc = [centered_copy_count(f, A4, 0.5) for f, _ in subgraph_classes(Motif.rectangle())]
    cls_mean = max(abs(float(np.dot(w4, x))) for x in cc)
    cls_cov = max(abs(float(np.dot(w4, x * y))) for x, y in itertools.combinations(cc, 2))
    R(4, "rectangle_classes", "max_abs_mean", cls_mean)
    R(4, "rectangle_classes", "max_abs_cov", cls_cov)

    p = su.p
    exact_var = {}
    for m in (5, 6):
        Am, wm = _er_weights(m, p)
        r1, r2 = _rect_remainders(Am, m, p)
        v1 = float(wm @ (r1 - wm @ r1) ** 2)
        v2 = float(wm @ (r2 - wm @ r2) ** 2)
        exact_var[m] = {"var_R1": v1, "var_R2": v2, "ratio": v2 / v1}
        R(m, "rectangle", "exact_var_first_order_remainder", v1)
        R(m, "rectangle", "exact_var_second_order_remainder", v2)
        R(m, "rectangle", "exact_var_ratio", v2 / v1)

    mc = {}
    batches = 10
    for m in cfg.n_grid:
        rng = _rng(cfg.seed, _MC, m)
        r1s, r2s = [], []
        left = cfg.mc_samples
        while left > 0:
            k = min(left, 500)
            U = rng.random((k, num_edges(m))) < p
            Am = np.zeros((k, m, m), dtype=np.int8)
            a, b = edge_arrays(m)
            Am[:, a, b] = U
            Am[:, b, a] = U
            r1, r2 = _rect_remainders(Am, m, p)
            r1s.append(r1), r2s.append(r2)
            left -= k
        r1, r2 = np.concatenate(r1s), np.concatenate(r2s)
        ratio = float(r2.var(ddof=1) / r1.var(ddof=1))
        per = len(r1) // batches
        br = [r2[i * per:(i + 1) * per].var(ddof=1) / r1[i * per:(i + 1) * per].var(ddof=1) for i in range(batches)]
        se = float(np.std(br, ddof=1) / math.sqrt(batches))
        mc[m] = {"var_R1": float(r1.var(ddof=1)), "var_R2": float(r2.var(ddof=1)), "ratio": ratio, "ratio_se": se}
        R(m, "rectangle", "mc_var_ratio", ratio, se)
    rep = DecompositionReport(identity, cov_max, cls_cov, max(mean_max, cls_mean), exact_var, mc)
    return rep, rows


RUNNERS = {
    "sharpness": experiment_sharpness,
    "scaling": experiment_scaling,
    "marginals": experiment_marginals,
    "remainders": experiment_remainders,
    "decomposition": experiment_decomposition,
}


def run_experiment(cfg: ExperimentConfig, out_dir=None):
    """Run ``cfg.experiment``; write ``<name>.csv`` and ``<name>.manifest.json``
    when an output directory is given (argument or ``cfg.output``)."""
    report, rows = RUNNERS[cfg.experiment](cfg)
    out_dir = out_dir or cfg.output
    if out_dir is not None:
        write_outputs(out_dir, cfg, rows, report)
    return report, rows
