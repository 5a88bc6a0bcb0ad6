import json
import subprocess
import sys

import pytest

from holoshear.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def sample(tmp_path, capsys, graph, space, lam=None, name="v.json"):
    path = tmp_path / name
    argv = ["sample", "--graph", graph, "--space", space, "--seed", "3", "--out", str(path)]
    if lam is not None:
        argv += ["--lambda", str(lam)]
    assert run(capsys, *argv)[0] == EXIT_OK
    return path


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "--graph", "punctured_torus")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert (doc["genus"], doc["punctures"], doc["edges"], doc["faces"]) == (1, 1, 3, 1)
    assert doc["pi_wp"] == [[0, 2, -2], [-2, 0, 2], [2, -2, 0]]
    assert doc["casimir_residual"] == 0 and doc["default_gauge_admissible"]


def test_validate_graph_file(tmp_path, capsys, torus):
    p = tmp_path / "g.json"
    p.write_text(json.dumps(torus.to_dict()))
    code, out, _ = run(capsys, "validate", "--graph", str(p))
    assert code == EXIT_OK and json.loads(out)["graph_fingerprint"] == torus.fingerprint


def test_validate_bad_graph(tmp_path, capsys):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"half_edges": 4, "sigma": [[0, 1], [2, 3]], "nu": [[0, 2], [1, 3]]}))
    code, _, err = run(capsys, "validate", "--graph", str(p))
    assert code == EXIT_USAGE and "valence" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "validate", "--graph", "/nonexistent/g.json")
    assert code == EXIT_USAGE and "no such file" in err


def test_sample_and_holonomy(tmp_path, capsys):
    zero = tmp_path / "zero.json"
    code, out, _ = run(capsys, "sample", "--graph", "punctured_torus", "--seed", "1")
    doc = json.loads(out)
    doc["values"] = {k: 0.0 for k in doc["values"]}
    zero.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "holonomy", "--coords", str(zero), "--path", "a -b")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["trace_re"] == pytest.approx(3.0)
    assert rep["length"] == pytest.approx(1.9248473002384139)


def test_holonomy_parabolic_length(tmp_path, capsys, torus):
    path = sample(tmp_path, capsys, "punctured_torus", "teich")
    labels = torus.face_path(0).labels(torus)
    code, out, _ = run(capsys, "holonomy", "--coords", str(path), "--path", " ".join(labels))
    rep = json.loads(out)
    # the puncture is a cusp: trace ±2 and zero length
    assert code == EXIT_OK and abs(rep["trace_re"]) == pytest.approx(2.0)
    assert rep["length"] == pytest.approx(0.0, abs=1e-5)


def test_holonomy_bad_path(tmp_path, capsys):
    path = sample(tmp_path, capsys, "punctured_torus", "teich")
    code, _, err = run(capsys, "holonomy", "--coords", str(path), "--path", "a a")
    assert code == EXIT_USAGE
    code, _, err = run(capsys, "holonomy", "--coords", str(path), "--path", "q")
    assert code == EXIT_USAGE


@pytest.mark.parametrize("space, lam", [("teich", None), ("z", -1), ("z", 1), ("xp", 0), ("lamination", 0)])
def test_moves_apply_twice_is_identity(tmp_path, capsys, space, lam):
    src = sample(tmp_path, capsys, "four_punctured_sphere", space, lam)
    mid, dst = tmp_path / "mid.json", tmp_path / "dst.json"
    assert run(capsys, "moves", "apply", "--edge", "e12", "--in", str(src), "--out", str(mid))[0] == EXIT_OK
    doc = json.loads(mid.read_text())
    assert doc["move"]["edge"] == "e12" and len(doc["move"]["frame"]) == 4
    assert run(capsys, "moves", "apply", "--edge", "e12", "--in", str(mid), "--out", str(dst))[0] == EXIT_OK
    a = json.loads(src.read_text())["values"]
    b = json.loads(dst.read_text())["values"]
    for k in a:
        assert b[k] == pytest.approx(a[k], abs=1e-12)


def test_moves_apply_errors(tmp_path, capsys):
    src = sample(tmp_path, capsys, "four_punctured_sphere", "z", 0)
    code, _, err = run(capsys, "moves", "apply", "--edge", "nope", "--in", str(src))
    assert code == EXIT_USAGE
    code, _, err = run(capsys, "moves", "apply", "--edge", "e01", "--space", "x", "--in", str(src))
    assert code == EXIT_USAGE and "does not match" in err
    lam = sample(tmp_path, capsys, "four_punctured_sphere", "lamination", 0, name="w.json")
    doc = json.loads(lam.read_text())
    del doc["base"]
    lam.write_text(json.dumps(doc))
    code, _, err = run(capsys, "moves", "apply", "--edge", "e01", "--in", str(lam))
    assert code == EXIT_USAGE and "base" in err


def test_moves_relations(tmp_path, capsys):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "moves", "relations", "--graph", "punctured_torus", "--space", "cotangent",
                       "--lambda", "1", "--samples", "5", "--report", str(report))
    assert code == EXIT_OK
    assert "[SKIP] pentagon" in out and "[PASS] involutivity" in out
    doc = json.loads(report.read_text())
    assert doc["passed"] and doc["samples"] == 5


def test_moves_relations_tight_tolerance_fails(capsys):
    code, out, _ = run(capsys, "moves", "relations", "--graph", "genus2_one_puncture", "--space", "z",
                       "--lambda", "-1", "--samples", "5", "--tol", "1e-30")
    assert code == EXIT_FAIL and "[FAIL]" in out


def test_goldman(tmp_path, capsys):
    src = sample(tmp_path, capsys, "punctured_torus", "z", 0)
    code, out, _ = run(capsys, "goldman", "--coords", str(src), "--path", "a -b", "--path", "b -c")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["residual"] < 1e-8 and rep["segments"]
    code, _, _ = run(capsys, "goldman", "--coords", str(src), "--path", "a -b")
    assert code == EXIT_USAGE


def test_accept_subset(tmp_path, capsys):
    report = tmp_path / "acc.json"
    code, out, _ = run(capsys, "accept", "--only", "4,5", "--report", str(report))
    assert code == EXIT_OK and "2/2 criteria passed" in out
    assert json.loads(report.read_text())["passed"]


def test_accept_usage_errors(capsys):
    assert run(capsys, "accept", "--only", "11")[0] == EXIT_USAGE
    assert run(capsys, "accept", "--tol", "0")[0] == EXIT_USAGE
    assert run(capsys, "accept", "--samples", "0")[0] == EXIT_USAGE
    assert run(capsys, "accept", "--graph", "/nope.json")[0] == EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "sample", "--graph", "punctured_torus", "--lambda", "2")[0] == EXIT_USAGE


def test_accept_tight_tolerance(capsys):
    code, out, _ = run(capsys, "accept", "--only", "1", "--samples", "3", "--tol", "1e-30",
                       "--graph", "four_punctured_sphere")
    assert code == EXIT_FAIL and "FAIL (tolerance)" in out


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "holoshear", "--version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("holoshear ")
