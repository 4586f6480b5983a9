"""Command line entry point: ``ergmlab <command> ...``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .experiments import EXPERIMENTS, ExperimentConfig, rows_to_csv, run_experiment
from .fixed_point import solve_p
from .graph import Graph, read_edge_list
from .hoeffding import decomposition_residual, full_decomposition
from .model import MODEL_NAMES, ErgmSpec, make_model, rewrite_two_star, second_order_coefficients
from .motif import Motif, expected_hom, hom_count
from .sampler import COLLECTORS, SCANS, ChainConfig, Collect, enumerate_model, run_chain, sample_edges
from .testfn import METHODS, SharpnessParams, hn_table


def _load_spec(path: str | None) -> ErgmSpec:
    if path is None:
        return ErgmSpec.rectangle()
    return ErgmSpec.from_json(Path(path).read_text())


def _dump(obj, fh=None) -> None:
    fh = fh or sys.stdout
    fh.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _csv_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _csv_strs(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------------------

def cmd_solve_p(args) -> int:
    spec = _load_spec(args.spec)
    rep = solve_p(spec)
    out = rep.to_json()
    c_T, c_V = second_order_coefficients(spec, rep.p)
    out.update(c_T=c_T, c_V=c_V)
    if c_T == 0.0:
        b1, b2 = rewrite_two_star(c_V, rep.p)
        out.update(beta1_tilde=b1, beta2_tilde=b2)
    _dump(out)
    return 0


def cmd_sample(args) -> int:
    spec = _load_spec(args.spec)
    model = make_model(args.model, spec, args.p)
    names = _csv_strs(args.collect)
    p = args.p if args.p is not None else solve_p(spec).p
    table = None
    if "hn" in names:
        _, c_V = second_order_coefficients(spec, p)
        b2 = args.beta2_tilde if args.beta2_tilde is not None else c_V
        table = hn_table(args.n, SharpnessParams(p, b2, args.M, args.quad_nodes, args.method))
    edges = []
    if any(x in names for x in ("marginals", "edges", "dR")):
        # separate stream from the chain, which consumes PCG64(seed) itself
        edge_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed, spawn_key=(2,))))
        edges = sample_edges(args.n, args.num_edges, edge_rng)
    cfg = ChainConfig(args.seed, args.burn_in, args.sweeps, args.thin, args.scan)
    out = run_chain(model, spec, args.n, cfg, Collect(names, edges, table, p))

    header, cols = ["sample"], []
    for name in names:
        x = out[name]
        if x.ndim == 1:
            header.append(name)
            cols.append(x[:, None])
        else:
            if name == "degrees":
                header += [f"deg_{v + 1}" for v in range(x.shape[1])]
            else:
                header += [f"{name}_{i}_{j}" for i, j in edges]
            cols.append(x)
    fh = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k in range(cfg.num_records):
            row = [k]
            for c in cols:
                row += [repr(float(v)) if isinstance(v, (float, np.floating)) else int(v) for v in c[k]]
            w.writerow(row)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_enumerate(args) -> int:
    spec = _load_spec(args.spec)
    model = make_model(args.model, spec, args.p)
    res = enumerate_model(model, spec, args.n, _csv_strs(args.stats), allow_large=args.allow_large)
    _dump({"n": args.n, "model": args.model, "log_Z": res.log_Z, "expectations": res.expectations})
    return 0


def cmd_decompose(args) -> int:
    try:
        h = Motif.from_json(json.loads(args.motif))
    except json.JSONDecodeError:
        h = Motif.from_json({"name": args.motif})
    if args.graph:
        g = read_edge_list(Path(args.graph).read_text())
    else:
        g = Graph.random(args.n, args.density, np.random.default_rng(args.seed))
    terms = full_decomposition(h, g, args.p)
    _dump(
        {
            "motif": h.to_json(),
            "n": g.n,
            "p": args.p,
            "hom": int(hom_count(h, g)),
            "expected_hom": expected_hom(h, g.n, args.p),
            "terms": [
                {
                    "subgraph": t.subgraph.to_json(),
                    "hom_into_motif": t.hom_into_motif,
                    "coefficient": t.coefficient,
                    "centered_count": float(t.centered),
                }
                for t in terms
            ],
            "relative_residual": decomposition_residual(h, g, args.p),
        }
    )
    return 0


_FLAG_TO_KEY = {
    "spec": "spec_path",
    "n_grid": "n_grid",
    "seed": "seed",
    "chains": "chains",
    "burn_in": "burn_in",
    "sweeps": "sweeps",
    "thin": "thin",
    "scan": "scan",
    "models": "models",
    "M": "M",
    "quad_nodes": "quad_nodes",
    "method": "method",
    "edges_per_n": "edges_per_n",
    "mc_samples": "mc_samples",
    "exact_n": "exact_n",
    "workers": "workers",
    "output": "output",
}


def resolve_experiment_config(args) -> ExperimentConfig:
    """Experiment defaults, then command-line flags, then the ``--config`` file."""
    d = {"experiment": args.name}
    for flag, key in _FLAG_TO_KEY.items():
        v = getattr(args, flag, None)
        if v is not None:
            d[key] = v
    if args.config:
        conf = json.loads(Path(args.config).read_text())
        if conf.get("experiment", args.name) != args.name:
            raise SystemExit(f"config file is for experiment {conf['experiment']!r}, not {args.name!r}")
        d.update(conf)
    return ExperimentConfig.from_dict(d)


def cmd_experiment(args) -> int:
    cfg = resolve_experiment_config(args)
    _, rows = run_experiment(cfg)
    if cfg.output is None:
        sys.stdout.write(rows_to_csv(rows))
    else:
        print(f"wrote {Path(cfg.output) / (cfg.experiment + '.csv')} and the run manifest", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ergmlab", description="ERGM approximation experiments")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def spec_flag(p):
        p.add_argument("--spec", help="ERGM spec JSON file (default: rectangle, beta = (-0.08, 0.16))")

    def hn_flags(p, default=True):
        p.add_argument("--M", type=float, default=200.0 if default else None, help="truncation constant of h_n")
        p.add_argument("--quad-nodes", type=int, default=64 if default else None)
        p.add_argument("--method", choices=METHODS, default="analytic" if default else None)

    p = sub.add_parser("solve-p", help="fixed point p and regime flags")
    spec_flag(p)
    p.set_defaults(func=cmd_solve_p)

    p = sub.add_parser("sample", help="run one Glauber chain and write samples as CSV")
    spec_flag(p)
    p.add_argument("--model", choices=MODEL_NAMES, default="exact")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=None, help="override the fixed point used by approximate models")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=200)
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--scan", choices=SCANS, default="systematic")
    p.add_argument("--collect", default="E,V,T,R", help=f"comma list from {','.join(COLLECTORS)}")
    p.add_argument("--num-edges", type=int, default=8, help="edges sampled for marginals/edges/dR")
    p.add_argument("--beta2-tilde", type=float, default=None)
    p.add_argument("--output", default=None)
    hn_flags(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("enumerate", help="exact expectations by summing over all graphs (n <= 6)")
    spec_flag(p)
    p.add_argument("--model", choices=MODEL_NAMES, default="exact")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--stats", default="E,V,T,R")
    p.add_argument("--allow-large", action="store_true", help="permit n = 7 (2^21 graphs)")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("decompose", help="full Hoeffding decomposition of a motif count")
    p.add_argument("--motif", required=True, help='name (edge, two_star, triangle, rectangle) or JSON {"v":..,"edges":..}')
    p.add_argument("--graph", help="edge-list file; otherwise a random graph")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=0.5)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("experiment", help="run an experiment; writes <name>.csv and <name>.manifest.json")
    p.add_argument("name", choices=EXPERIMENTS)
    p.add_argument("--config", help="JSON file; its keys override the flags below")
    spec_flag(p)
    p.add_argument("--n-grid", type=_csv_ints, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--chains", type=int, default=None)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--sweeps", type=int, default=None)
    p.add_argument("--thin", type=int, default=None)
    p.add_argument("--scan", choices=SCANS, default=None)
    p.add_argument("--models", type=_csv_strs, default=None)
    p.add_argument("--edges-per-n", type=int, default=None)
    p.add_argument("--mc-samples", type=int, default=None)
    p.add_argument("--exact-n", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output", default=None, help="output directory (CSV to stdout if omitted)")
    hn_flags(p, default=False)
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
