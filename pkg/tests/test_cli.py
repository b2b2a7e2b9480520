import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qcosamp.cli import dumps, main, parse_grid
from qcosamp.curvefit import DataSet
from qcosamp.errors import ValidationError
from qcosamp.imaging import GrayImage, read_pgm, write_pgm

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
NU2 = str(CONFIGS / "nu2.json")


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _error_line(err):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("error: code=")
    return dict(tok.split("=", 1) for tok in lines[0].split()[1:3])


def test_eval_csv(capsys):
    code, out, _ = _run(["eval", "--spec", NU2, "--grid", "0,1.5"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert [float(r["x"]) for r in rows] == [0.0, 1.5]
    assert float(rows[0]["mu"]) == pytest.approx(0.61880511831034557, abs=1e-15)


def test_sweep_is_byte_identical(tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        p = tmp_path / f"{name}.csv"
        assert main(["sweep", "--spec", NU2, "--shots", "2000", "--seed", "1", "--grid", "9",
                     "--out", str(p)]) == 0
        outs.append((p.read_bytes(), Path(str(p) + ".mse.json").read_bytes()))
    assert outs[0] == outs[1]
    doc = json.loads(outs[0][1])
    assert doc["points"] == 9 and doc["seed"] == 1 and len(doc["errors"]) == 9


def test_sweep_mse_within_budget(tmp_path):
    p = tmp_path / "s.csv"
    assert main(["sweep", "--spec", NU2, "--shots", "8192", "--seed", "1", "--out", str(p)]) == 0
    rows = list(csv.DictReader(p.open()))
    err = np.mean([(float(r["estimated"]) - float(r["exact"])) ** 2 for r in rows])
    assert err <= 2e-4
    assert json.loads(Path(str(p) + ".mse.json").read_text())["mse"] == pytest.approx(err, rel=1e-12)


def test_sample_histogram(capsys):
    code, out, _ = _run(["sample", "--spec", NU2, "--shots", "100", "--seed", "3"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert sum(int(r["count"]) for r in rows) == 100


def test_integrate(capsys):
    code, out, _ = _run(["integrate", "--spec", str(CONFIGS / "integrate_x6.json")], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["points"] == 64
    assert doc["integral"] == pytest.approx(np.pi, abs=1e-10)


def test_tree_check(capsys):
    code, out, _ = _run(["tree-check", "--spec", str(CONFIGS / "tree11.json")], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] is True and doc["sum"] == "1" and doc["leaves"] == 11


def test_map_boundary_example(capsys):
    code, out, _ = _run(["map", "--data", str(CONFIGS / "boundary_series.json")], capsys)
    doc = json.loads(out)
    assert code == 0
    c = doc["components"][0]
    assert (c["n"], c["r"], c["s"]) == (1, 0.0, 0.0)


def test_map_round_trip(tmp_path, capsys):
    src = {"lambda": [0.3, 1.1, -0.4], "gamma": [0.7, 0.2]}
    p = tmp_path / "series.json"
    p.write_text(json.dumps(src))
    q = tmp_path / "phases.json"
    assert main(["map", "--data", str(p), "--out", str(q)]) == 0
    r = tmp_path / "back.json"
    assert main(["map", "--data", str(q), "--out", str(r)]) == 0
    back = json.loads(r.read_text())
    np.testing.assert_allclose(back["lambda"], src["lambda"], atol=1e-12)
    np.testing.assert_allclose(back["gamma"], src["gamma"], atol=1e-12)


def test_fit_outputs(tmp_path):
    x = -np.pi + 2 * np.pi * np.arange(8) / 8
    DataSet(tuple(x), tuple((1 + np.cos(x)) / 2)).to_csv(str(tmp_path / "d.csv"))
    out = tmp_path / "fit.json"
    assert main(["fit", "--data", str(tmp_path / "d.csv"), "--shots", "500", "--seed", "2",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"best", "qsm", "histogram_csv_path"}
    hist = Path(doc["histogram_csv_path"]).read_text().splitlines()
    assert hist[0] == "state,count"
    first = out.read_bytes()
    main(["fit", "--data", str(tmp_path / "d.csv"), "--shots", "500", "--seed", "2",
          "--out", str(out)])
    assert out.read_bytes() == first


@pytest.mark.parametrize("binary", [False, True])
def test_filter_writes_pgm(tmp_path, binary):
    img = GrayImage(np.arange(16).reshape(4, 4) * 10, 255)
    src, dst = tmp_path / "in.pgm", tmp_path / "out.pgm"
    write_pgm(img, str(src))
    argv = ["filter", "--image", str(src), "--out", str(dst), "--window", "2"]
    assert main(argv + (["--binary"] if binary else [])) == 0
    out = read_pgm(str(dst))
    assert out.pixels.shape == (4, 4)
    assert dst.read_bytes()[:2] == (b"P5" if binary else b"P2")


@pytest.mark.parametrize("argv,code,kind", [
    (["sweep", "--spec", NU2, "--shots", "10"], 2, "schema"),
    (["eval"], 2, "schema"),
    (["eval", "--spec", "/nonexistent.json"], 2, "schema"),
    (["eval", "--spec", NU2, "--max-qubits", "1"], 3, "guardrail"),
    (["sweep", "--spec", NU2, "--grid", "abc"], 2, "schema"),
])
def test_error_exit_codes(argv, code, kind, capsys):
    c, _, err = _run(argv, capsys)
    assert c == code
    assert _error_line(err) == {"code": str(code), "kind": kind}


def test_bad_json_is_schema_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    c, _, err = _run(["tree-check", "--spec", str(p)], capsys)
    assert c == 2 and _error_line(err)["kind"] == "schema"


def test_unknown_subcommand_exit_code(capsys):
    assert main(["nope"]) == 2
    capsys.readouterr()


def test_dumps_keeps_doubles():
    v = 0.1 + 0.2
    assert json.loads(dumps({"v": v}))["v"] == v
    assert dumps(2.0) == "2.0" and dumps(3) == "3" and dumps([True, None]) == "[true, null]"
    with pytest.raises(ValidationError):
        dumps(float("nan"))


def test_parse_grid():
    assert parse_grid("3").tolist() == pytest.approx([-np.pi, 0.0, np.pi])
    assert parse_grid("0.5,1").tolist() == [0.5, 1.0]
    with pytest.raises(ValidationError):
        parse_grid("0")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qcosamp", "tree-check", "--spec",
                        str(CONFIGS / "tree11.json")], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["verdict"] is True
