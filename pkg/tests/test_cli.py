import csv
import io
import json

import pytest

from ergmlab.cli import build_parser, main, resolve_experiment_config
from ergmlab.graph import Graph, write_edge_list
from ergmlab.model import ErgmSpec


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_p_default(capsys):
    code, out, _ = run(capsys, "solve-p")
    rep = json.loads(out)
    assert code == 0
    assert rep["p"] == pytest.approx(0.5)
    assert rep["residual"] < 1e-10
    assert rep["subcritical"] and rep["dobrushin"]
    assert rep["Phi_prime_1"] == pytest.approx(1.92)


def test_solve_p_spec_file(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(ErgmSpec.two_star(-0.2, 0.1).to_json()))
    _, out, _ = run(capsys, "solve-p", "--spec", str(path))
    assert json.loads(out)["residual"] < 1e-10


def test_bad_spec_reports_error(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"terms": [{"motif": {"name": "edge"}, "beta": 0.1}, {"motif": {"name": "triangle"}, "beta": -1}]}))
    code, _, err = run(capsys, "solve-p", "--spec", str(path))
    assert code == 2 and "nonnegative" in err


def test_sample_csv(capsys, tmp_path):
    out_path = tmp_path / "s.csv"
    code, _, _ = run(
        capsys, "sample", "--model", "two-star", "--n", "10", "--seed", "3", "--burn-in", "2", "--sweeps", "5",
        "--collect", "E,V,T,R,hn,marginals", "--num-edges", "3", "--output", str(out_path),
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out_path.read_text())))
    assert rows[0][:6] == ["sample", "E", "V", "T", "R", "hn"]
    assert len(rows[0]) == 6 + 3
    assert len(rows) == 6


def test_sample_deterministic(capsys):
    argv = ["sample", "--n", "7", "--seed", "1", "--burn-in", "3", "--sweeps", "4"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_enumerate(capsys):
    _, out, _ = run(capsys, "enumerate", "--model", "first", "--p", "0.5", "--n", "5", "--stats", "V")
    assert json.loads(out)["expectations"]["V"] == pytest.approx(7.5)
    code, _, err = run(capsys, "enumerate", "--n", "7")
    assert code == 2 and "refused" in err


def test_decompose(capsys, tmp_path):
    g = tmp_path / "g.txt"
    g.write_text(write_edge_list(Graph(5, [(1, 2), (2, 3), (3, 4), (4, 1), (1, 5)])))
    _, out, _ = run(capsys, "decompose", "--motif", "rectangle", "--graph", str(g), "--p", "0.3")
    rep = json.loads(out)
    assert rep["hom"] == 8
    assert rep["relative_residual"] < 1e-9
    assert len(rep["terms"]) == 5
    _, out, _ = run(capsys, "decompose", "--motif", '{"v": 3, "edges": [[1, 2], [2, 3]]}', "--n", "5")
    assert json.loads(out)["motif"] == {"name": "two_star"}


def test_experiment_to_directory(capsys, tmp_path):
    code, _, _ = run(
        capsys, "experiment", "scaling", "--n-grid", "8,12", "--chains", "8", "--sweeps", "5", "--burn-in", "2",
        "--output", str(tmp_path),
    )
    assert code == 0
    assert (tmp_path / "scaling.csv").exists()
    assert (tmp_path / "scaling.manifest.json").exists()


def test_experiment_stdout(capsys):
    code, out, _ = run(capsys, "experiment", "decomposition", "--n-grid", "8", "--mc-samples", "100")
    assert code == 0
    assert out.startswith("experiment,n,model,stat,estimate,stderr,seed,sweeps")


def test_config_file_overrides_flags(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"chains": 9, "n_grid": [16, 32]}))
    args = build_parser().parse_args(["experiment", "scaling", "--chains", "4", "--sweeps", "7", "--config", str(conf)])
    c = resolve_experiment_config(args)
    assert c.chains == 9 and c.sweeps == 7 and c.n_grid == [16, 32]


def test_config_for_other_experiment_rejected(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"experiment": "marginals"}))
    args = build_parser().parse_args(["experiment", "scaling", "--config", str(conf)])
    with pytest.raises(SystemExit):
        resolve_experiment_config(args)


def test_bad_grid(capsys):
    code, _, err = run(capsys, "experiment", "scaling", "--n-grid", "64,32")
    assert code == 2 and "increasing" in err
