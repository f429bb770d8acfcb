from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from gapforge.circuit import system_from_polynomials
from gapforge.cli import main
from gapforge.field import REAL

PASS = "in g1\nout g1\n"
UNSAT = "in g1\nnot g2 g1\nand g3 g1 g2\nout g3\n"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "pass.txt").write_text(PASS)
    (tmp_path / "unsat.txt").write_text(UNSAT)
    (tmp_path / "bad.txt").write_text("in g1\nxor g2 g1 g1\nout g2\n")
    yes = system_from_polynomials(REAL, 1, [{(0, 0): 1}], [1], witness=(1,))
    no = system_from_polynomials(REAL, 1, [{(0, 0): 1}], [-1])
    (tmp_path / "yes.json").write_text(json.dumps(yes.to_dict()))
    (tmp_path / "no.json").write_text(json.dumps(no.to_dict()))
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def test_reduce_mdp_s16(files):
    out = files / "yes.mdp.json"
    assert run("reduce", "--from", files / "pass.txt", "--target", "mdp", "--field", "2",
               "--gadget", "hadamard:m=3", "--tensor", "1", "--out", out) == 0
    d = json.loads(out.read_text())
    assert d["kind"] == "mdp" and d["s"] == 16
    assert {"circuit_hash", "system_hash", "gadget"} <= set(d["provenance"])


def test_verify_yes_no_pair(files, capsys):
    yes, no = files / "yes.json.out", files / "no.json.out"
    # the unsatisfiable circuit has 4 variables, so both sides use m = 4 (d = 8, s = 64)
    run("reduce", "--from", files / "pass.txt", "--target", "mdp", "--gadget", "hadamard:m=4", "--out", yes)
    run("reduce", "--from", files / "unsat.txt", "--target", "mdp", "--gadget", "hadamard:m=4", "--out", no)
    assert run("verify", yes, "--against", no) == 0
    text = capsys.readouterr().out
    assert "realized gap = 96/64 = 3/2" in text
    assert "provenance: circuit" in text
    assert text.rstrip().endswith("PASS")
    oracle_line = next(ln for ln in text.splitlines() if ln.startswith("oracle: "))
    assert json.loads(oracle_line[len("oracle: "):])["optimum"] == 64


def test_tampered_instance_fails(files, capsys):
    out = files / "yes.mdp.json"
    run("reduce", "--from", files / "pass.txt", "--target", "mdp", "--out", out)
    d = json.loads(out.read_text())
    i = d["planted"].index(1)
    d["planted"][i] = 0
    d["planted"][(i + 1) % len(d["planted"])] ^= 1
    out.write_text(json.dumps(d))
    assert run("verify", out) == 1
    text = capsys.readouterr().out
    assert "planted residual" in text and text.rstrip().endswith("FAIL")


def test_ncp_requires_distinguished(files):
    assert run("reduce", "--from", files / "pass.txt", "--target", "ncp") == 2
    out = files / "ncp.json"
    assert run("reduce", "--from", files / "pass.txt", "--target", "ncp", "--distinguished", "--out", out) == 0
    assert json.loads(out.read_text())["offset"][-1] == "[1]"
    assert run("verify", out) == 0


def test_real_and_svp(files, capsys):
    yes, no, svp = files / "r_yes.json", files / "r_no.json", files / "svp.json"
    for src, dst in (("yes.json", yes), ("no.json", no)):
        assert run("reduce", "--from", files / src, "--target", "real", "--gadget", "fixture:handcrafted",
                   "--out", dst) == 0
    assert run("verify", yes, "--against", no) == 0
    assert "realized gap = 8/5" in capsys.readouterr().out
    assert run("reduce", "--from", files / "yes.json", "--target", "svp", "--p", "2",
               "--gadget", "fixture:handcrafted", "--out", svp) == 0
    assert run("verify", svp) == 0
    assert "||x||_2^2 = 5" in capsys.readouterr().out


def test_parse_error_exit_code(files):
    assert run("reduce", "--from", files / "bad.txt", "--target", "mdp") == 2
    assert run("reduce", "--from", files / "missing.txt", "--target", "mdp") == 2


def test_budget_exit_code(files, monkeypatch):
    assert run("reduce", "--from", files / "unsat.txt", "--target", "mdp", "--gadget", "hadamard:m=4",
               "--out", files / "i.json") == 0
    assert run("verify", files / "i.json", "--budget", "4") == 3
    monkeypatch.setenv("GAPFORGE_BUDGET_CAP", "4")
    assert run("verify", files / "i.json") == 3


def test_gadget_fixture(files, capsys):
    assert run("gadget", "--fixture", "handcrafted") == 0
    cert = json.loads(capsys.readouterr().out)["cert"]
    assert (cert["d"], cert["d2"], cert["alpha"], cert["rho"], cert["wld"]) == (2, 4, "2/1", "1/1", True)


def test_gadget_require_cert_exit(files):
    # n=2, eps=1/2 gives h = N = 8: ker(R) is trivial at this seed, so no certificate
    assert run("gadget", "--n", "2", "--eps", "1/2", "--seed", "0", "--require-cert",
               "--out-dir", files / "g") == 4


def test_missing_seed_is_usage_error(files):
    assert run("gadget", "--n", "1") == 2
    assert run("experiment", "--sweep", "slice-count") == 2
    assert run("reduce", "--from", files / "yes.json", "--target", "real", "--gadget", "rademacher:n=1") == 2


def test_byte_identical_outputs(files):
    outs = []
    for i in range(2):
        a, b, c = files / f"a{i}.json", files / f"b{i}.csv", files / f"g{i}"
        run("reduce", "--from", files / "pass.txt", "--target", "mdp", "--tensor", "2", "--out", a)
        run("experiment", "--sweep", "slice-count", "--seeds", "20", "--seed", "7", "--out", b)
        run("gadget", "--n", "1", "--eps", "1/2", "--seed", "3", "--out-dir", c)
        outs.append([a.read_bytes(), b.read_bytes(), (c / "gadget.json").read_bytes(), (c / "cert.json").read_bytes()])
    assert outs[0] == outs[1]


def test_experiment_csv(files, capsys):
    out = files / "sweep.csv"
    assert run("experiment", "--sweep", "slice-count", "--N", "12", "--k", "2", "--h", "3",
               "--seeds", "50", "--seed", "0", "--out", out) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 50
    assert {"seed", "h", "N", "k", "d", "d2", "alpha", "slice_count", "wld"} <= set(rows[0])
    assert "exact expectation 33/4" in capsys.readouterr().err


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "gapforge", "gadget", "--fixture", "handcrafted"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["cert"]["slice_count"] == 2
