import json
import math

import numpy as np
import pytest

from jacobispec.cli import (ConfigError, main, parse_complex, parse_family, parse_grid,
                            parse_window)
from jacobispec.coefficients import CoefficientSequence, save_table
from jacobispec.serialize import read_curve


@pytest.mark.parametrize("text,want", [("1+2i", 1 + 2j), ("-0.5-1e-3i", complex(-0.5, -1e-3)),
                                       ("2i", 2j), ("0.5", 0.5), ("0+1i", 1j), (" 3 - 4i ", 3 - 4j),
                                       (".5+.5i", 0.5 + 0.5j)])
def test_parse_complex(text, want):
    assert parse_complex(text) == want


@pytest.mark.parametrize("text", ["i", "1+2", "1+i", "1i2", "", "1+-2i", "abc", "1++2i"])
def test_parse_complex_rejects(text):
    with pytest.raises(ConfigError):
        parse_complex(text)


def test_parse_grid_and_window():
    np.testing.assert_array_equal(parse_grid("-1:1:3"), [-1.0, 0.0, 1.0])
    for bad in ("1:2", "a:b:c", "2:1:5", "0:1:0"):
        with pytest.raises(ConfigError):
            parse_grid(bad)
    assert parse_window("2:500") == (2, 500)
    assert parse_window("1:10:3") == (1, 10, 3)
    for bad in ("0:5", "5:5", "x:3", "1:2:3:4"):
        with pytest.raises(ConfigError):
            parse_window(bad)


def test_parse_family():
    assert parse_family("hermite").kind == "hermite"
    assert parse_family("constant:0,0.5")(3) == (0.0, 0.5)
    assert parse_family("paired-growing").arrays(5)[1].tolist() == [1, 2, 2, 4, 4]
    for bad in ("nope", "constant:1,2,3", "constant:0,-1", "table:", "table:/no/such/file",
                "paired-growing:3"):
        with pytest.raises(ConfigError):
            parse_family(bad)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_resolvent_closed_form(capsys):
    code, out, _ = run(capsys, "resolvent", "--family", "constant:0,0.5", "--lambda", "0+1i")
    assert code == 0
    d = json.loads(out)
    assert d["value"]["im"] == pytest.approx(0.82843, abs=1e-5)
    assert d["metadata"]["config"]["family"] == "constant:0,0.5"


def test_resolvent_real_lambda(capsys):
    code, _, err = run(capsys, "resolvent", "--family", "hermite", "--lambda", "0.5")
    assert code == 1 and "Im lambda must be nonzero" in err


def test_resolvent_oracle(capsys):
    code, out, _ = run(capsys, "resolvent", "--family", "hermite", "--lambda", "1+1i",
                       "--oracle-n", "5000")
    assert code == 0 and json.loads(out)["oracle"]["abs_diff"] <= 1e-6


def test_resolvent_nonconvergence(capsys):
    code, _, _ = run(capsys, "resolvent", "--family", "constant:0,0.5", "--lambda", "0.1+1e-6i",
                     "--n-max", "10", "--tol", "1e-15")
    assert code == 2


def test_weights_files(tmp_path, capsys):
    prefix = tmp_path / "herm"
    code, _, _ = run(capsys, "weights", "--family", "hermite", "--n", "100", "--grid=-2:2:401",
                     "--out", str(prefix))
    assert code == 0
    cols, data = read_curve(tmp_path / "herm.weights.csv")
    assert cols == ["x", "value"] and data.shape == (401, 2) and np.all(data[:, 1] >= 0)
    meta = json.loads((tmp_path / "herm.weights.csv.json").read_text())
    assert meta["config"]["n"] == 100 and meta["version"]
    _, sig = read_curve(tmp_path / "herm.sigma.csv")
    assert np.all(np.diff(sig[:, 1]) >= -1e-13)


def test_weights_stdout_semicircle(capsys):
    code, out, _ = run(capsys, "weights", "--family", "constant:0,0.5", "--n", "10",
                       "--grid=-1:1:201")
    assert code == 0
    rows = np.array([[float(v) for v in line.split(",")] for line in out.splitlines()[1:]])
    assert rows.shape == (201, 2)
    np.testing.assert_allclose(rows[:, 1], 2 / math.pi * np.sqrt(1 - rows[:, 0] ** 2), atol=1e-12)


def test_weights_missing_grid(capsys):
    assert run(capsys, "weights", "--family", "hermite", "--n", "10")[0] == 1


def test_bad_usage_is_config_error(capsys):
    assert run(capsys, "weights", "--family", "hermite")[0] == 1
    assert run(capsys, "nonsense")[0] == 1


def test_criteria_discreteness_table(tmp_path, capsys):
    seq = CoefficientSequence.from_closure(lambda k: (float((k + 1) ** 2), float(k + 1)))
    path = tmp_path / "quad.jcoef.csv"
    save_table(seq, 600, path)
    code, out, _ = run(capsys, "criteria", "discreteness", "--family", f"table:{path}",
                       "--window", "1:500")
    assert code == 0 and json.loads(out)["verdict"] == "certified-at-scale"


def test_criteria_exit_codes(capsys):
    code, out, _ = run(capsys, "criteria", "thm39", "--family", "hermite", "--n-max", "5000")
    assert code == 0
    assert set(json.loads(out)["statistics"]["blocks"]) == {"1", "2", "3", "4", "5"}
    code, out, _ = run(capsys, "criteria", "bounded-weight", "--family", "paired-growing",
                       "--window", "1:60")
    assert code == 4 and json.loads(out)["witnesses"]
    assert run(capsys, "criteria", "discreteness", "--family", "constant:5,1")[0] == 3
    assert run(capsys, "criteria", "discreteness", "--family", "hermite")[0] == 2


@pytest.mark.parametrize("name", ["main-estimate", "transfer", "equicontinuity", "gn-bound",
                                  "asymptotic"])
def test_other_criteria_run(name, capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, out, _ = run(capsys, "criteria", name, "--family", "hermite", "--window", "1:60",
                       "--out", str(out_file))
    assert code in (0, 3, 4)
    assert json.loads(out_file.read_text()) == json.loads(out)


def test_criteria_bad_interval(capsys):
    assert run(capsys, "criteria", "bounded-weight", "--family", "hermite",
               "--interval=1,-1")[0] == 1


def test_oracle_compare(tmp_path, capsys):
    mfile = tmp_path / "m.csv"
    code, out, _ = run(capsys, "oracle-compare", "--family", "constant:0,0.5", "--N", "500",
                       "--n", "10", "--grid=-1:1:101", "--measure-out", str(mfile))
    assert code == 0
    assert json.loads(out)["kolmogorov_distance"] < 0.01
    assert mfile.read_text().startswith("lambda,weight\n")


def test_hermite_demo(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("JACOBISPEC_THREADS", "2")
    out_file = tmp_path / "h.csv"
    code, out, _ = run(capsys, "hermite-demo", "--n-values", "100,1000", "--x-values", "0,1",
                       "--out", str(out_file))
    assert code == 0
    cols, data = read_curve(out_file)
    assert cols == ["n", "x", "f_n", "target", "abs_diff"] and data.shape == (4, 5)
    assert data[0, 3] == pytest.approx(1 / math.sqrt(math.pi))
    assert (tmp_path / "h.csv.json").exists()


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("JACOBISPEC_THREADS", "zero")
    assert run(capsys, "hermite-demo", "--n-values", "10")[0] == 1


def test_version(capsys):
    assert main(["--version"]) == 0
