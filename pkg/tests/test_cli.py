import json
import subprocess
import sys

import pytest

from matroid_lab.cli import dispatch, main
from matroid_lab.core import parse_matroid, serialize_matroid
from matroid_lab.named import u36_with_common_point, uniform, vamos

from conftest import pg, pg_minus


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, M in (
        ("u36", uniform(3, 6)),
        ("v8", vamos()),
        ("pg", pg(2)),
        ("pgm", pg_minus(2)),
        ("n1", u36_with_common_point()),
    ):
        path = tmp_path / f"{name}.m"
        path.write_text(serialize_matroid(M))
        out[name] = str(path)
    code = main(["gen", "u36-erection", "--out", str(tmp_path / "n2.m")])
    assert code == 0
    out["n2"] = str(tmp_path / "n2.m")
    out["dir"] = tmp_path
    return out


def run_json(argv, capsys):
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_gen_prints_a_matroid_file(capsys):
    assert main(["gen", "uniform", "2", "4"]) == 0
    assert parse_matroid(capsys.readouterr().out) == uniform(2, 4)


def test_gen_unknown_family_exit_2(capsys):
    code, rep = run_json(["gen", "nope"], capsys)
    assert code == 2 and rep["errors"][0]["type"] == "UnknownFamily"


def test_usage_error_exit_2(capsys):
    assert main(["frobnicate"]) == 2
    assert main(["embed-ote", "x.m"]) == 2  # needs --rank4 or --budget


def test_missing_file_exit_2(capsys, tmp_path):
    code, rep = run_json(["analyze", str(tmp_path / "missing.m")], capsys)
    assert code == 2 and rep["errors"]


def test_analyze(files, capsys):
    code, rep = run_json(["analyze", files["v8"]], capsys)
    assert code == 0
    res = rep["results"]
    assert res["rank"] == 4 and res["is_hypermodular"] is False and res["bundle_condition"] is False
    assert len(rep["inputs"][files["v8"]]) == 64


def test_amalgam_reports(files, capsys):
    code, rep = run_json(["amalgam", files["n1"], files["n2"]], capsys)
    assert code == 0 and rep["results"]["status"] == "fails"
    assert rep["results"]["violating_pair"]["deficit"] == 1
    code, _ = run_json(["amalgam", files["n1"], files["n2"], "--expect", "exists"], capsys)
    assert code == 1
    code, _ = run_json(["amalgam", files["n1"], files["n2"], "--expect", "fails"], capsys)
    assert code == 0


def test_amalgam_exists_writes_file(files, capsys, tmp_path):
    out = tmp_path / "am.m"
    code, rep = run_json(["amalgam", files["pg"], files["pg"], "--brute-check", "--samples", "2000", "--out", str(out)], capsys)
    assert code == 0 and rep["results"]["status"] == "exists"
    assert parse_matroid(out.read_text()) == pg(2)


def test_reports_are_deterministic(files, capsys):
    argv = ["amalgam", files["n1"], files["n2"], "--json"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_timings_opt_in(files, capsys):
    _, rep = run_json(["analyze", files["u36"]], capsys)
    assert "timings" not in rep
    _, rep = run_json(["analyze", files["u36"], "--timings"], capsys)
    assert "total" in rep["timings"]


def test_extend_and_cuts(files, capsys, tmp_path):
    out = tmp_path / "e.m"
    code, rep = run_json(["extend", files["u36"], "--flats", "a b; c d", "--label", "p", "--out", str(out)], capsys)
    assert code == 0
    assert parse_matroid(out.read_text()) == u36_with_common_point()
    code, rep = run_json(["extend", files["u36"], "--flats", "a b; c d", "--to-modular"], capsys)
    assert code == 0 and rep["results"]["new_elements"] == ["_p1"]
    gen = tmp_path / "u24.m"
    gen.write_text(serialize_matroid(uniform(2, 4)))
    code, rep = run_json(["cuts", str(gen), "--enumerate"], capsys)
    assert rep["results"]["count"] == 7
    assert main(["cuts", str(gen)]) == 2


def test_witness_and_certify(files, capsys, tmp_path):
    code, rep = run_json(["witness", files["u36"], "--flat", "a b", "--hyperplane", "c d"], capsys)
    assert code == 0 and rep["results"]["failed_invariants"] == []
    out = tmp_path / "n2.m"
    code, rep = run_json(["certify-nonsticky", files["v8"], "--auto-pair", "--out", str(out)], capsys)
    assert code == 0 and rep["results"]["status"] == "fails"
    log = json.loads((tmp_path / "n2.m.chain.json").read_text())
    assert log["steps"]
    code, rep = run_json(["certify-nonsticky", files["pg"]], capsys)
    assert code == 1 and rep["errors"][0]["type"] == "PreconditionFailed"


def test_embed_and_isomorphic(files, capsys, tmp_path):
    out = tmp_path / "emb.m"
    code, rep = run_json(["embed-ote", files["pgm"], "--rank4", "--out", str(out)], capsys)
    assert code == 0 and rep["results"]["steps"] == 1 and rep["results"]["status"] == "Complete"
    code, rep = run_json(["isomorphic", str(out), files["pg"], "--expect", "yes"], capsys)
    assert code == 0 and rep["results"]["isomorphic"] is True
    code, rep = run_json(["embed-ote", files["u36"], "--budget", "2"], capsys)
    assert rep["results"]["status"] == "Partial"
    code, rep = run_json(["hypermodular-complete", files["u36"], "--budget", "2"], capsys)
    assert rep["results"]["status"] == "Partial" and len(rep["results"]["chain"]["steps"]) == 2


def test_threads_setting(files, capsys, monkeypatch):
    monkeypatch.setenv("MATROID_LAB_THREADS", "3")
    _, rep = run_json(["analyze", files["u36"]], capsys)
    assert rep["config"]["threads"] == 3
    _, rep = run_json(["analyze", files["u36"], "--threads", "2"], capsys)
    assert rep["config"]["threads"] == 2
    monkeypatch.setenv("MATROID_LAB_THREADS", "many")
    code, _ = dispatch(["analyze", files["u36"]])
    assert code == 2


def test_selftest_subset(capsys):
    code = main(["selftest", "--only", "3", "11"])
    out = capsys.readouterr().out
    assert code == 0 and out.count("[PASS]") == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "matroid_lab", "gen", "vamos"], capture_output=True, text=True)
    assert proc.returncode == 0 and parse_matroid(proc.stdout) == vamos()
