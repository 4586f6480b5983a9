import json
import math
import warnings

import numpy as np
import pytest

from ergmlab.experiments import (
    CSV_FIELDS,
    ExperimentConfig,
    chain_seed,
    experiment_decomposition,
    experiment_marginals,
    experiment_scaling,
    experiment_sharpness,
    loglog_slope,
    orthogonality_edge_products,
    rows_to_csv,
    run_experiment,
)
from ergmlab.model import ErgmSpec

TINY = dict(chains=8, burn_in=5, sweeps=10)


def cfg(name, **kw):
    d = dict(experiment=name, **TINY)
    d.update(kw)
    return ExperimentConfig.from_dict(d)


def test_config_validation():
    with pytest.raises(ValueError):
        cfg("scaling", n_grid=[64, 32])
    with pytest.raises(ValueError):
        cfg("scaling", n_grid=[32, 32])
    with pytest.raises(ValueError):
        cfg("nonsense")
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"experiment": "scaling", "bogus": 1})


def test_defaults_per_experiment():
    c = ExperimentConfig.from_dict({"experiment": "scaling"})
    assert c.models == ["exact", "first", "second"] and c.chains >= 8
    assert ExperimentConfig.from_dict({"experiment": "sharpness"}).n_grid == [300]


def test_spec_from_file(tmp_path):
    path = tmp_path / "spec.json"
    spec = ErgmSpec.two_star(-0.2, 0.1)
    path.write_text(json.dumps(spec.to_json()))
    c = ExperimentConfig.from_dict({"experiment": "marginals", "spec_path": str(path)})
    assert c.ergm() == spec


def test_chain_seeds_distinct():
    s = {chain_seed(1, n, c).generate_state(2).tobytes() for n in (16, 32) for c in range(4)}
    assert len(s) == 8


def test_loglog_slope():
    ns = [10, 20, 40]
    slope, rms = loglog_slope(ns, [3 / n for n in ns])
    assert slope == pytest.approx(-1.0) and rms < 1e-12
    assert math.isnan(loglog_slope(ns, [1.0, 0.0, 1.0])[0])


def test_scaling_first_as_second_reproduces_d1():
    rep, _ = experiment_scaling(cfg("scaling", n_grid=[12, 16], models=["exact", "first", "first"]))
    assert rep.D1 == rep.D2
    assert rep.D1_se == rep.D2_se


def test_scaling_unaffected_by_comparator_choice():
    # seeds depend on (n, chain) only, so the exact chain is the same whichever comparator rides along
    a, _ = experiment_scaling(cfg("scaling", n_grid=[12], models=["exact", "first", "second"]))
    b, _ = experiment_scaling(cfg("scaling", n_grid=[12], models=["exact", "first", "two-star"]))
    assert a.D1 == b.D1


def test_scaling_warns_on_few_chains():
    with pytest.warns(UserWarning, match="unstable"):
        rep, rows = experiment_scaling(cfg("scaling", n_grid=[12], chains=3))
    assert rep.unstable
    assert any(r.stat == "unstable" and r.estimate == 1.0 for r in rows)


def test_scaling_sanity_gate():
    spec = ErgmSpec.two_star(-0.5, 1.2).to_json()  # Phi'(1) = 2.4
    with pytest.raises(ValueError, match="sanity gate"):
        experiment_scaling(cfg("scaling", n_grid=[12], spec=spec))


def test_sharpness_refuses_outside_dobrushin():
    spec = ErgmSpec.two_star(-0.5, 1.2).to_json()
    with pytest.raises(ValueError, match="Dobrushin"):
        experiment_sharpness(cfg("sharpness", n_grid=[12], spec=spec))


def test_sharpness_constants_in_report():
    rep, rows = experiment_sharpness(cfg("sharpness", n_grid=[12], chains=2))
    assert round(rep.target, 5) == 13.58696
    assert rep.er_bound == 13.5
    stats = {r.stat for r in rows}
    assert {"p", "fixed_point_residual", "target", "er_bound", "hn_mean", "gap_vs_first"} <= stats


def test_marginals_first_order_exact():
    rep, _ = experiment_marginals(cfg("marginals", n_grid=[8, 12], models=["first"], edges_per_n=5))
    assert max(rep.max_dev) < 1e-12


def test_marginals_rejects_exact():
    with pytest.raises(ValueError):
        experiment_marginals(cfg("marginals", n_grid=[8], models=["exact"]))


def test_decomposition_small():
    rep, rows = experiment_decomposition(cfg("decomposition", n_grid=[8, 10], mc_samples=300))
    assert max(rep.identity.values()) < 1e-9
    assert rep.orthogonality_edge_products < 1e-12
    with pytest.raises(ValueError):
        experiment_decomposition(cfg("decomposition", n_grid=[8], exact_n=7))


def test_orthogonality_other_p():
    mean_max, cov_max = orthogonality_edge_products(4, 0.3)
    assert mean_max < 1e-12 and cov_max < 1e-12


def test_csv_schema_and_no_bare_estimates(tmp_path):
    rep, rows = run_experiment(cfg("scaling", n_grid=[12, 16]), tmp_path)
    text = (tmp_path / "scaling.csv").read_text()
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    for r in rows:
        assert r.stderr == r.stderr  # every row carries a finite error bar
    man = json.loads((tmp_path / "scaling.manifest.json").read_text())
    assert man["config"]["n_grid"] == [12, 16]
    assert man["seed"] == 20240611
    assert "ergmlab" in man["versions"]


@pytest.mark.parametrize("name", ["scaling", "marginals", "remainders", "sharpness"])
def test_parallel_matches_serial(tmp_path, name):
    kw = dict(n_grid=[8, 12], edges_per_n=4) if name != "sharpness" else dict(n_grid=[12])
    a = tmp_path / "a"
    b = tmp_path / "b"
    run_experiment(cfg(name, workers=1, **kw), a)
    run_experiment(cfg(name, workers=2, **kw), b)
    for suffix in (".csv", ".manifest.json"):
        assert (a / f"{name}{suffix}").read_bytes() == (b / f"{name}{suffix}").read_bytes()
