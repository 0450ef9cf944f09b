import json
import subprocess
import sys
from fractions import Fraction

import pytest

from invsem.cli import main
from invsem.decide.folner import certificate_for
from invsem.decide.lp import check_certificate
from invsem.decide.measures import day_invariance_constraints
from invsem.presets import bicyclic_on_N, cuntz2_on_N, day2
from invsem.typesem import paradox_from_json, verify_paradox


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_day_certificate_rechecks(capsys):
    code, out = run(capsys, "check-day", "--preset", "day2")
    assert code == 0 and out["status"] == "Infeasible" and out["verified"]
    cert = [(c["constraint_id"], Fraction(c["coefficient"]))
            for c in out["certificate"]["combination"]]
    assert check_certificate(2, day_invariance_constraints(day2()), cert)


def test_measure_commands(capsys):
    code, out = run(capsys, "check-domain-measure", "--preset", "symmetric_inverse(2)")
    assert code == 0 and out["status"] == "Feasible"
    code, out = run(capsys, "check-amenable", "--preset", "cyclic(3)")
    assert code == 0 and out["measure"]["atoms"] == ["1/3"] * 3
    code, out = run(capsys, "check-amenable", "--preset", "bicyclic_on_N", "--bounds", "p=4,t=1")
    assert code == 0 and out["status"] == "Feasible"


def test_folner_certificate_rechecks(capsys):
    code, out = run(capsys, "folner", "--preset", "bicyclic_on_N", "--eps", "1/8",
                    "--window", "64", "--split-eps", "--max-size", "64")
    assert code == 0
    cert = out["certificate"]
    assert cert["set"] == list(range(16))
    fresh = certificate_for(bicyclic_on_N(), cert["set"])
    assert [d["leak"] for d in cert["defects"]] == [d.leak for d in fresh.defects]


def test_folner_exhausted_exit_code(capsys):
    code, out = run(capsys, "folner", "--preset", "cuntz2_on_N", "--eps", "1/4",
                    "--window", "0:10", "--exhaustive")
    assert code == 2 and out["status"] == "Exhausted"


def test_paradox_search_then_verify(capsys, tmp_path):
    path = tmp_path / "pw.json"
    code, out = run(capsys, "paradox", "search", "--preset", "cuntz2_on_N",
                    "--bounds", "L=2,p=2,k=2", "--out", str(path))
    assert code == 0 and out["status"] == "Found"
    assert json.loads(path.read_text()) == out
    assert verify_paradox(paradox_from_json(out["witness"], cuntz2_on_N()), cuntz2_on_N())
    code, out = run(capsys, "paradox", "verify", "--preset", "cuntz2_on_N", "--witness", str(path))
    assert code == 0 and out["valid"]
    code, out = run(capsys, "roe", "isometries", "--preset", "cuntz2_on_N", "--witness", str(path),
                    "--window", "64")
    assert code == 0 and out["interior"] == [0, 32] and all(out["checks"].values())
    code, out = run(capsys, "paradox", "search", "--preset", "bicyclic_on_N",
                    "--bounds", "L=2,p=2,k=2")
    assert code == 2


def test_typesem_commands(capsys, tmp_path):
    sb = {"A": "{0 mod 1}", "B": "{0 mod 1 | n >= 1}",
          "w1": {"pieces": [{"set": "{0 mod 1}", "word": "a", "level_from": 0, "level_to": 0}],
                 "source": "{0 mod 1}", "target": "{0 mod 1 | n >= 1}"},
          "w2": {"pieces": [{"set": "{0 mod 1}", "word": "1", "level_from": 0, "level_to": 0}],
                 "source": "{0 mod 1}", "target": "{0 mod 1}"}}
    path = tmp_path / "sb.json"
    path.write_text(json.dumps(sb))
    code, out = run(capsys, "typesem", "sb", "--preset", "bicyclic_on_N", "--witness", str(path))
    assert code == 0 and out["verified"] and out["iterations"] == 0
    # three copies of N into two, on the doubling maps
    emb = {"pieces": [{"set": "{0 mod 1}", "word": w, "level_from": i, "level_to": t}
                      for i, (w, t) in enumerate([("1", 1), ("d0", 0), ("d1", 0)])],
           "source": [{"level": l, "set": "{0 mod 1}"} for l in range(3)],
           "target": [{"level": l, "set": "{0 mod 1}"} for l in range(2)]}
    path = tmp_path / "absorb.json"
    path.write_text(json.dumps({"n": 2, "A": "{0 mod 1}", "embedding": emb}))
    code, out = run(capsys, "typesem", "absorb", "--preset", "cuntz2_on_N", "--witness", str(path))
    assert code == 0 and out["verified"]
    assert verify_paradox(paradox_from_json(out["paradox"], cuntz2_on_N()), cuntz2_on_N())


def test_ring_commands(capsys):
    code, out = run(capsys, "ring", "annihilator", "--n-max", "3", "--word-len", "3")
    assert code == 0 and out["passed"] and out["checked"] == 56
    code, out = run(capsys, "ring", "defect", "--subspace", "1*(0,a) - 1*(1,a)",
                    "--element", "1*(3,b)")
    assert code == 0 and out["ratio"] == "1"
    code, out = run(capsys, "counterexample-folner-bound", "--n-max", "1", "--word-len", "2",
                    "--max-size", "3")
    assert code == 0 and out["counterexamples"] == 0 and out["enumerated"] == 12 + 66 + 220


def test_roe_commands(capsys):
    code, out = run(capsys, "roe", "relations", "--preset", "bicyclic_on_N", "--window", "8",
                    "--words", "a;a*", "--sets", "{0 mod 2}")
    assert code == 0 and out["passed"] and out["interior_size"] == 7
    code, out = run(capsys, "roe", "traces", "--preset", "symmetric_inverse(2)")
    assert code == 0 and out["diagonal_weights"] == [["1/2", "1/2"]]
    code, out = run(capsys, "roe", "corner", "--preset", "symmetric_inverse(3)",
                    "--f1", "0,1,2", "--f2", "0,1,2")
    assert code == 0 and out["rank"] == 9
    code, out = run(capsys, "roe", "hs-defect", "--preset", "bicyclic_on_N", "--F", "0:16",
                    "--word", "a")
    assert code == 0 and out["defect"] == out["bound"] == "1/16"


@pytest.mark.parametrize("argv", [
    ["no-such-command"],
    ["check-day", "--preset", "nonsense"],
    ["folner", "--preset", "bicyclic_on_N"],
    ["check-day", "--preset", "day2", "--unknown-flag"],
    ["paradox", "verify", "--preset", "cuntz2_on_N", "--witness", "/nonexistent.json"],
])
def test_invalid_input_exits_one(argv, capsys):
    assert main(argv) == 1


def test_output_is_byte_identical_across_runs():
    cmd = [sys.executable, "-m", "invsem", "paradox", "search", "--preset", "cuntz2_on_N",
           "--bounds", "L=2,p=2,k=2"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first.endswith(b"\n")
