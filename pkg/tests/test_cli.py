from pathlib import Path

import pytest
import yaml

from elitist_chain.cli import main
from elitist_chain.config import ConfigError, defaults_yaml, load_config, parse_config

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def write_config(tmp_path, doc, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return str(path)


def onemax_doc(**extra):
    doc = {"problem": {"family": "onemax", "n": 4}, "horizon": 10}
    doc.update(extra)
    return doc


@pytest.mark.parametrize("name", ["onemax-n4", "square-n4", "log-n4", "onemax-n4-explicit"])
def test_analyze_matches_pinned_output(name, tmp_path, capsys):
    out = tmp_path / "out.csv"
    assert main(["analyze", "--config", str(CONFIGS / f"{name}.yaml"), "--out", str(out)]) == 0
    assert out.read_text() == (FIXTURES / f"{name}.analyze.csv").read_text()
    assert capsys.readouterr().out == (FIXTURES / f"{name}.report.txt").read_text(encoding="utf-8")


def test_simulate_matches_pinned_output(tmp_path):
    out = tmp_path / "sim.csv"
    args = ["simulate", "--config", str(CONFIGS / "onemax-n4.yaml"), "--runs", "5000", "--out", str(out)]
    assert main(args) == 0
    assert out.read_text() == (FIXTURES / "onemax-n4.simulate-5000.csv").read_text()


def test_every_shipped_config_loads():
    for path in CONFIGS.glob("*.yaml"):
        cfg = load_config(path)
        cfg.build_problem()


def test_analyze_to_stdout(tmp_path, capsys):
    assert main(["analyze", "--config", write_config(tmp_path, onemax_doc()), "--horizon", "2"]) == 0
    cap = capsys.readouterr()
    assert cap.out.splitlines() == ["t,F,E,R", "0,0.0,1.0,", "1,1.0,0.75,0.25", "2,1.75,0.5625,0.25"]
    assert "E_t = 0.750×0.75^(t−1)" in cap.err


def test_rational_flag(tmp_path, capsys):
    assert main(["analyze", "--config", write_config(tmp_path, onemax_doc()), "--horizon", "2", "--rational"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[2] == "1,1,3/4,0.25"
    assert lines[3] == "2,7/4,9/16,0.25"


def test_duplicate_diagonal_exit_code(tmp_path, capsys):
    doc = {"problem": {"matrix": [[0.5, 0.2], [0, 0.5]], "errors": [1, 2], "f_opt": 3}}
    assert main(["analyze", "--config", write_config(tmp_path, doc)]) == 2
    assert "states 1 and 2" in capsys.readouterr().err


def test_horizon_mismatch(tmp_path, capsys):
    doc = onemax_doc(simulation={"horizon": 20})
    assert main(["analyze", "--config", write_config(tmp_path, doc)]) == 2
    assert "horizon mismatch" in capsys.readouterr().err


def test_matching_horizons_are_fine(tmp_path):
    cfg = parse_config(onemax_doc(analysis={"horizon": 10}, simulation={"horizon": 10}))
    assert cfg.horizon == 10


@pytest.mark.parametrize("doc,msg", [
    ({"problem": {"n": 4}}, "exactly one"),
    ({"problem": {"family": "onemax", "n": 4, "matrix": [[0]]}}, "exactly one"),
    ({"problem": {"family": "onemax"}}, "missing"),
    ({"problem": {"family": "onemax", "n": 4, "colour": 1}}, "unexpected"),
    ({"problem": {"family": "onemax", "n": 4}, "seeds": 1}, "unknown"),
    ({"problem": {"family": "onemax", "n": 4}, "simulation": {"runs": 0}}, "runs"),
    ({"problem": {"family": "onemax", "n": 4}, "simulation": {"seed": -3}}, "seed"),
    ({"problem": {"family": "onemax", "n": 4}, "output": {"format": "json"}}, "csv"),
    ({"problem": {"matrix": [[0.5]], "errors": [1], "f_opt": 2}, "simulation": {"path": "bitstring"}}, "family"),
    ({"problem": {"family": "onemax", "n": 4}, "horizon": 0}, "horizon"),
    ([1, 2], "mapping"),
])
def test_config_errors(doc, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config(doc)


def test_bad_yaml_and_missing_file(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("problem: [unclosed\n")
    assert main(["analyze", "--config", str(bad)]) == 2
    assert main(["analyze", "--config", str(tmp_path / "nope.yaml")]) == 2
    err = capsys.readouterr().err
    assert "malformed YAML" in err and "cannot read" in err


def test_bitwise_needs_rate(tmp_path):
    doc = {"problem": {"family": "onemax", "n": 4, "mutation": "bitwise"}}
    assert main(["analyze", "--config", write_config(tmp_path, doc)]) == 2


def test_no_command(capsys):
    assert main([]) == 2


def test_print_defaults(capsys):
    assert main(["--print-defaults"]) == 0
    out = capsys.readouterr().out
    assert out == defaults_yaml()
    parse_config(yaml.safe_load(out))


def test_compare_pass_and_fail(tmp_path, capsys):
    doc = onemax_doc(simulation={"runs": 20000, "seed": 4})
    assert main(["compare", "--config", write_config(tmp_path, doc)]) == 0
    cap = capsys.readouterr()
    assert cap.err.startswith("PASS")
    assert cap.out.splitlines()[0] == "t,F_analytic,mean_F,stderr,z"

    doc["analysis"] = {"coefficient_offset": 0.1}
    assert main(["compare", "--config", write_config(tmp_path, doc, "bad.yaml")]) == 1
    assert "FAIL" in capsys.readouterr().err


def test_compare_on_chain_path(tmp_path, capsys):
    doc = {"problem": {"matrix": [["3/4", "1/2", 0, 0], [0, "1/2", "3/4", 0], [0, 0, "1/4", 1], [0, 0, 0, 0]],
                       "errors": [1, 2, 3, 4], "f_opt": 4},
           "horizon": 15, "simulation": {"runs": 20000}}
    assert main(["compare", "--config", write_config(tmp_path, doc)]) == 0
    assert "path chain" in capsys.readouterr().err


def test_power_with_oracle(tmp_path, capsys):
    cfg = str(CONFIGS / "onemax-n4-explicit.yaml")
    assert main(["power", "--config", cfg, "-t", "2", "--oracle"]) == 0
    out = capsys.readouterr().out
    closed, _, rest = out.partition("\n\n")
    assert closed.splitlines()[0] == "9/16,5/8,3/8,0"
    assert rest.startswith("# brute-force R^t\n9/16,5/8,3/8,0")
    assert rest.rstrip().endswith("max_abs_deviation,0.0")


def test_power_exponent_must_be_positive(capsys):
    assert main(["power", "--config", str(CONFIGS / "onemax-n4-explicit.yaml"), "-t", "0"]) == 2


def test_simulate_worker_override(tmp_path):
    cfg = write_config(tmp_path, onemax_doc(simulation={"runs": 9000, "seed": 8}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(b), "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
