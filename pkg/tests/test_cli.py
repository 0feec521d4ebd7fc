import json
import math

import pytest

from graphon_holder import cli, psi
from graphon_holder.errors import ParseError
from graphon_holder.graphons import load_spec


@pytest.fixture
def specs(tmp_path):
    docs = {
        "dot1": {"kind": "dot_product", "d": 1, "a": 1.0},
        "dot2": {"kind": "dot_product", "d": 2, "a": 0.5},
        "const1": {"kind": "constant", "p": 1.0},
        "const03": {"kind": "constant", "p": 0.3},
        "weier": {"kind": "weierstrass", "d": 2, "alpha": 0.5, "a": None, "k": None},
    }
    paths = {}
    for name, doc in docs.items():
        paths[name] = tmp_path / f"{name}.json"
        paths[name].write_text(json.dumps(doc))
    return {k: str(v) for k, v in paths.items()}


def test_classify_example(specs, capsys):
    code = cli.run(["classify", "--spec", specs["dot2"], "--q", "1.5", "--seed", "42"])
    assert code == 0
    assert "Finite" in capsys.readouterr().out


@pytest.mark.slow
def test_psi_example(specs, tmp_path, capsys):
    out = tmp_path / "psi.csv"
    code = cli.run(["psi", "--spec", specs["dot1"], "--q", "0.5", "--pairs", "200000",
                    "--inner", "2000", "--seed", "42", "--out", str(out), "--threads", "4"])
    assert code == 0
    line = capsys.readouterr().out
    est = float(line.split("psi_estimate=")[1].split()[0])
    assert abs(est / psi.psi_analytic_dot1(0.5) - 1) <= 0.05
    rows = out.read_text().splitlines()
    assert rows[0].startswith("q,delta,t_value")
    assert all(r.split(",")[6] == "42" for r in rows[1:])


def test_sample_example(specs, tmp_path):
    out = tmp_path / "e.txt"
    assert cli.run(["sample", "--spec", specs["const1"], "--n", "3", "--seed", "1",
                    "--out", str(out)]) == 0
    assert out.read_bytes() == b"# n=3\n0 1\n0 2\n1 2\n"


def test_parse_delta_grid():
    assert cli.parse_delta_grid("geometric:0.001:0.1:3") == pytest.approx([0.1, 0.01, 0.001])
    g = cli.parse_delta_grid("geometric:0.0001:0.1:7")
    assert g[0] == 0.1 and g[-1] == 0.0001
    assert all(a > b for a, b in zip(g, g[1:]))
    assert math.isclose(g[1] / g[0], g[2] / g[1])


@pytest.mark.parametrize("desc", ["geometric:0.1:0.1:1", "geometric:0.2:0.1:3", "linear:0.1:1:3",
                                  "geometric:x:0.1:3", "geometric:0.01:0.1", "geometric:0:0.1:3",
                                  "geometric:0.01:0.1:1"])
def test_parse_delta_grid_errors(desc):
    with pytest.raises(ParseError):
        cli.parse_delta_grid(desc)


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["psi", "--q", "0.5"],
    ["psi", "--spec", "/nonexistent.json", "--q", "0.5"],
    ["sample", "--n", "3"],
    ["psi", "--spec", "{dot1}", "--q", "0.5", "--grid", "linear:1:2:3"],
    ["psi", "--spec", "{dot1}", "--q", "-1"],
    ["psi", "--spec", "{dot1}", "--q", "0.5", "--pairs", "0"],
])
def test_usage_errors_exit_1(argv, specs):
    argv = [a.format(**specs) for a in argv]
    assert cli.run(argv) == 1


def test_invalid_spec_exit_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "dot_product", "d": 2, "a": 0.9}')
    assert cli.run(["sample", "--spec", str(bad), "--n", "3"]) == 1


def test_numerical_failures_exit_2(specs, capsys):
    assert cli.run(["holder", "--spec", specs["const03"], "--per-scale", "200"]) == 2
    assert cli.run(["psi", "--spec", specs["dot1"], "--q", "0.5", "--pairs", "20",
                    "--inner", "20"]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_psi_output_is_byte_identical(specs, tmp_path, monkeypatch):
    outs = []
    for i, threads in enumerate([None, "1", "3"]):
        out = tmp_path / f"p{i}.csv"
        argv = ["psi", "--spec", specs["dot2"], "--q", "1", "--pairs", "3000", "--inner", "100",
                "--seed", "9", "--out", str(out)]
        if threads == "3":
            monkeypatch.setenv("GRAPHON_THREADS", "3")
        elif threads:
            argv += ["--threads", threads]
        assert cli.run(argv) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_psi_to_stdout(specs, capsys):
    assert cli.run(["psi", "--spec", specs["dot1"], "--q", "0.5", "--pairs", "2000",
                    "--inner", "100", "--seed", "3"]) == 0
    cap = capsys.readouterr()
    assert cap.out.startswith("q,delta,t_value,t_stderr,n_pairs_retained,n_z,seed,verdict\n")
    assert "Finite" in cap.err


def test_holder_csv(specs, tmp_path):
    out = tmp_path / "h.csv"
    assert cli.run(["holder", "--h-alpha", "0.5", "--per-scale", "500", "--seed", "2",
                    "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "scale,oscillation,n_pairs,alpha_hat,r2,seed"
    alpha = float(rows[1].split(",")[3])
    assert 0.4 <= alpha <= 0.6
    assert cli.run(["holder", "--curve-d", "2", "--bits", "10", "--per-scale", "500",
                    "--out", str(out)]) == 0


def test_pullback_writes_spec(specs, tmp_path):
    out = tmp_path / "pb.json"
    assert cli.run(["pullback", "--spec", specs["dot2"], "--bits", "12", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc == {"kind": "pullback", "bits": 12, "inner": {"kind": "dot_product", "d": 2, "a": 0.5}}
    load_spec(str(out))
    assert cli.run(["pullback", "--spec", specs["dot1"], "--out", str(out)]) == 1


def test_cd_subcommand(capsys):
    assert cli.run(["cd", "--d", "1", "--dirs", "10", "--inner", "20000"]) == 0
    out = capsys.readouterr().out
    assert "0.4" in out or "0.5" in out


def test_verify_subset(capsys):
    assert cli.run(["verify", "--only", "5,6"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len([line for line in out if line.startswith("PASS")]) == 2
