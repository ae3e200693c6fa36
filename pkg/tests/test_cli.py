import csv
import json
import math
import subprocess
import sys

import pytest

from graphpot.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip().startswith("{") else None), out.err


@pytest.fixture
def p4_files(tmp_path):
    (tmp_path / "p4.tsv").write_text("0\t1\t1.0\n1\t2\t1.0\n2\t3\t1.0\n")
    (tmp_path / "s.txt").write_text("1\n2\n")
    (tmp_path / "f.txt").write_text("1\t1\n2\t1\n")
    (tmp_path / "bc.txt").write_text("0\t1\n3\t0\n")
    return tmp_path


def test_lambda1_path5(capsys):
    code, rep, _ = run(["lambda1", "--generator", "path", "--param", "5", "--q", "zero"], capsys)
    assert code == 0
    assert rep["results"]["interior"] == [1, 2, 3]
    assert abs(rep["results"]["lambda1"] - (1 - math.cos(math.pi / 4))) < 1e-12
    assert rep["schema"] == "gp-report/1"
    for c in rep["checks"]:
        assert {"value", "bound", "slack", "passed"} <= set(c)


def test_green_lattice1_growing(capsys, tmp_path):
    out = tmp_path / "seq.csv"
    code, rep, _ = run(["green", "--generator", "lattice1", "--radii", "2,4,8", "--probes", "0:0", "--csv", str(out)], capsys)
    assert code == 0
    seq = rep["results"]["sequences"]["0:0"]
    assert seq["classification"] == "GROWING" and seq["growth"] == "linear"
    rows = list(csv.DictReader(out.open()))
    assert [r["radius"] for r in rows] == ["2", "4", "8"]
    assert all(abs(float(r["value"]) - int(r["radius"])) < 1e-9 for r in rows)


def test_green_exhaustion_mode_requires_radii(capsys):
    code, _, err = run(["green", "--generator", "lattice1", "--param", "3", "--mode", "exhaustion"], capsys)
    assert code == 2 and "radii" in err


def test_solve_and_green_on_files(capsys, p4_files):
    d = p4_files
    code, rep, _ = run(["solve", "--graph", str(d / "p4.tsv"), "--interior", str(d / "s.txt"),
                        "--f", str(d / "f.txt"), "--save", str(d / "u.txt")], capsys)
    assert code == 0
    assert rep["results"]["u"] == {"1": 2.0, "2": 2.0}
    assert set(rep["inputs"]) == {"graph", "interior", "f"}
    assert rep["inputs"]["graph"].startswith("sha256:")
    assert (d / "u.txt").read_text().splitlines()[1] == "1\t2.0"
    code, rep, _ = run(["solve", "--graph", str(d / "p4.tsv"), "--interior", str(d / "s.txt"),
                        "--bc", str(d / "bc.txt")], capsys)
    assert code == 0
    assert abs(rep["results"]["u"]["1"] - 2 / 3) < 1e-15
    code, rep, _ = run(["green", "--graph", str(d / "p4.tsv"), "--interior", str(d / "s.txt"),
                        "--probes", "1:1,1:2", "--mode", "series"], capsys)
    assert code == 0
    assert abs(rep["results"]["probes"]["1:1"] - 4 / 3) < 1e-12


def test_existence_and_lambda1_exhaustion(capsys):
    code, rep, _ = run(["solve", "--generator", "tree3", "--radii", "2,3,4", "--q", "const:0.5"], capsys)
    assert code == 0
    code, rep, _ = run(["lambda1", "--family", "tree3", "--radii", "2,4,6"], capsys)
    assert code == 0 and rep["results"]["sequences"]["lambda1"]["monotone"]


def test_harnack_sampled(capsys):
    code, rep, _ = run(["harnack", "--generator", "lattice2", "--param", "2", "--seed", "3"], capsys)
    assert code == 0
    assert rep["results"]["C_sharp"] <= rep["results"]["C_paper"]


def test_harnack_from_file(capsys, tmp_path):
    (tmp_path / "p3.tsv").write_text("0\t1\t1\n1\t2\t1\n")
    (tmp_path / "u.txt").write_text("0\t1\n1\t2\n2\t1\n")
    (tmp_path / "s.txt").write_text("0\n1\n")
    code, rep, _ = run(["harnack", "--graph", str(tmp_path / "p3.tsv"), "--u", str(tmp_path / "u.txt"),
                        "--interior", str(tmp_path / "s.txt")], capsys)
    assert code == 0
    assert rep["results"]["ratio"] == rep["results"]["C_paper"] == 2.0


def test_tolerance_flag_can_fail_a_check(capsys):
    code, rep, _ = run(["lambda1", "--generator", "path", "--param", "5", "--tol-eigen-residual", "1e-30"], capsys)
    assert code == 1 and not rep["summary"]["passed"]


def test_validate_and_generate(capsys, tmp_path):
    code, rep, _ = run(["generate", "--generator", "tree3", "--param", "1", "--save", str(tmp_path / "t.tsv")], capsys)
    assert code == 0 and rep["results"]["n_vertices"] == 10
    code, rep, _ = run(["validate", "--graph", str(tmp_path / "t.tsv")], capsys)
    assert code == 0 and rep["results"]["n_edges"] == 9
    (tmp_path / "two.tsv").write_text("0\t1\t1\n2\t3\t1\n")
    code, rep, _ = run(["validate", "--graph", str(tmp_path / "two.tsv")], capsys)
    assert code == 1 and rep["results"]["kinds"] == ["disconnected"]


def test_exit_codes_input_errors(capsys, tmp_path):
    (tmp_path / "loop.tsv").write_text("0\t0\t1.0\n")
    code, _, err = run(["validate", "--graph", str(tmp_path / "loop.tsv")], capsys)
    assert code == 2 and "line 1" in err and "loop" in err
    code, _, err = run(["validate", "--graph", str(tmp_path / "missing.tsv")], capsys)
    assert code == 2
    (tmp_path / "p3.tsv").write_text("0\t1\t1\n1\t2\t1\n")
    (tmp_path / "q.txt").write_text("9\t1\n")
    code, _, err = run(["validate", "--graph", str(tmp_path / "p3.tsv"), "--q", str(tmp_path / "q.txt")], capsys)
    assert code == 2 and "9" in err
    code, _, _ = run(["lambda1", "--generator", "path"], capsys)
    assert code == 2


def test_exit_code_resource_cap(capsys, monkeypatch):
    monkeypatch.setenv("GP_MAX_VERTICES", "50")
    code, _, err = run(["generate", "--generator", "lattice3", "--param", "4"], capsys)
    assert code == 3 and "GP_MAX_VERTICES" in err


def test_report_diff(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["lambda1", "--generator", "path", "--param", "6"]
    assert main(base + ["--out", str(a)]) == 0
    assert main(base + ["--out", str(b)]) == 0
    assert main(["report-diff", str(a), str(b)]) == 0
    other = tmp_path / "c.json"
    assert main(["lambda1", "--generator", "path", "--param", "7", "--out", str(other)]) == 0
    capsys.readouterr()
    assert main(["report-diff", str(a), str(other)]) == 1
    assert "/results/lambda1" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": "gp-report/0"}))
    assert main(["report-diff", str(a), str(bad)]) == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(
        [sys.executable, "-m", "graphpot", "lambda1", "--generator", "path", "--param", "3", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(out.read_text())["results"]["lambda1"] == pytest.approx(1.0)
