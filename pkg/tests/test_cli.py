import csv
import io
import json
import subprocess
import sys

import pytest

from becknerlab.cli import RunManifest, main
from becknerlab.errors import ConfigurationError
from becknerlab.reports import CSV_COLUMNS, from_json


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stream=out)
    return code, out.getvalue()


def test_specfun_check(tmp_path):
    path = tmp_path / "sf.json"
    code, text = run("specfun", "check", "--json", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["meta"]["suite"] == "specfun"
    assert all(r["passed"] for r in doc["reports"])


def test_specfun_fault_injection():
    code, text = run("specfun", "check", "--tolerance", "1e-20")
    assert code == 1
    assert "FAIL" in text


def test_deficit_eval():
    code, text = run("deficit", "eval", "--p", "1.5", "--s", "0", "--x", "1")
    assert code == 0 and json.loads(text)["value"] == 0.0
    code, text = run("deficit", "eval", "--p", "1.5", "--s", "1", "--x", "1")
    info = json.loads(text)
    from becknerlab.deficit import BecknerParams, big_f

    assert info["value"] == big_f(BecknerParams(1.5), 1.0, 1.0)
    assert info["provenance"]["v_nodes"] > 0 and info["provenance"]["phi_tail_bound"] < 1e-15
    code, _ = run("deficit", "eval", "--p", "1.2", "--s", "1", "--x", "1")
    assert code == 2
    code, text = run("deficit", "eval", "--p", "6/5", "--s", "1", "--x", "1", "--closed-form")
    assert code == 0 and json.loads(text)["value"] == pytest.approx(0.52, rel=1e-15)
    code, text = run("deficit", "eval", "--p", "1", "--q", "2", "--s", "1", "--x", "1")
    assert code == 0 and json.loads(text)["function"] == "J"


def test_usage_errors():
    assert run("deficit", "eval", "--p", "1.5")[0] == 2
    assert run("nonsense")[0] == 2
    assert run("verify", "mc", "--steps", "100", "--paths", "1000")[0] == 2


def test_verify_identities_outputs(tmp_path):
    jpath, cpath = tmp_path / "id.json", tmp_path / "id.csv"
    code, _ = run("verify", "identities", "--json", str(jpath), "--csv", str(cpath))
    assert code == 0
    names = [r.name for r in from_json(jpath.read_text())]
    assert any(n.startswith("cpd_normalization") for n in names)
    rows = list(csv.reader(cpath.open()))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == len(names) + 1


def test_manifest_round_trip_and_rejection(tmp_path):
    man = RunManifest("mc", {"paths": 2000, "steps": 16, "functions": [4]}, "standard", 7, str(tmp_path / "o.json"),
                      {"f004:ito": 1.0})
    assert RunManifest.from_json(man.to_json()) == man
    with pytest.raises(ConfigurationError):
        RunManifest.from_json('{"suite": "mc", "extra": 1}')
    with pytest.raises(ConfigurationError):
        RunManifest.from_json('{"suite": "mc", "grids": {"nodes_per_axis": 3}}')
    with pytest.raises(ConfigurationError):
        RunManifest.from_json('{"suite": "weather"}')
    with pytest.raises(ConfigurationError):
        RunManifest.from_json("[1]")


def test_manifest_drives_mc(tmp_path):
    out = tmp_path / "mc.json"
    man = RunManifest("mc", {"paths": 2000, "steps": 16, "functions": [4]}, "standard", 7, str(out))
    mpath = tmp_path / "m.json"
    mpath.write_text(man.to_json())
    code, _ = run("verify", "mc", "--manifest", str(mpath))
    assert code in (0, 1)
    doc = json.loads(out.read_text())
    assert doc["meta"]["seed"] == 7 and doc["meta"]["paths"] == 2000
    assert all(r["name"].startswith("f004:") for r in doc["reports"])
    assert (tmp_path / "mc.csv").exists()


def test_mc_deterministic_across_workers(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["mc", "verify", "--seed", "7", "--paths", "3000", "--steps", "16", "--functions", "3"]
    run(*args, "--json", str(a))
    run(*args, "--workers", "3", "--json", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_tolerance_override_fails_run(tmp_path):
    mpath = tmp_path / "m.json"
    mpath.write_text(RunManifest("identities", tolerance_overrides={"cpd_normalization": 0.0,
                                                                     "hoelder_constant": 0.0}).to_json())
    code, text = run("verify", "identities", "--manifest", str(mpath))
    assert code == 1


def test_corpus_parse_failure(tmp_path):
    bad = tmp_path / "c.json"
    bad.write_text("{not json")
    assert run("ineq", "verify", "--corpus", str(bad))[0] == 2
    assert run("ineq", "verify", "--corpus", str(tmp_path / "missing.json"))[0] == 2


def test_ineq_verify_small_corpus(tmp_path):
    from becknerlab.functionals import TestFunction

    doc = {"functions": [TestFunction.from_bumps(1, 0.5, [(2.0, [0.3], 0.8)]).to_dict()]}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    code, text = run("ineq", "verify", "--corpus", str(path))
    assert code == 0 and "0 failed" in text


def test_report_merge(tmp_path):
    a = tmp_path / "a.json"
    run("deficit", "asymptotics", "--json", str(a))
    out = tmp_path / "m.json"
    code, _ = run("report", "merge", str(a), str(a), "--json", str(out))
    assert len(from_json(out.read_text())) == 2 * len(from_json(a.read_text()))
    assert code == 1  # the asymptotic suite carries a known failure
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run("report", "merge", str(bad))[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "becknerlab", "deficit", "eval", "--p", "1.5", "--s", "0", "--x", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["value"] == 0.0
