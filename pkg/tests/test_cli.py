import json

import pytest

from lambek.cli import main
from lambek.core import DISJ_SEQUENT_TEXT
from lambek.calculi import check_derivation, loads_derivation
from lambek.core import CalculusId

LOOP = {"states": 2, "instructions": [{"op": "dec", "from": 1, "reg": 1, "to": 1},
                                      {"op": "jz", "from": 1, "reg": 1, "to": 0}]}


@pytest.fixture
def loop_file(tmp_path):
    path = tmp_path / "loop.json"
    path.write_text(json.dumps(LOOP))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_prove_lstar(capsys):
    code, out, _ = run(capsys, "prove", "--calculus", "lstar", "--sequent", "(p\\p)\\q |- q")
    assert code == 0 and out.startswith("derivable")


def test_prove_l_fails(capsys):
    code, _, _ = run(capsys, "prove", "--calculus", "l", "--sequent", "(p\\p)\\q |- q")
    assert code == 1


def test_prove_json_and_emit(capsys, tmp_path):
    target = tmp_path / "d.json"
    code, out, _ = run(capsys, "prove", "--calculus", "malc", "--sequent", "p & q |- q | r",
                       "--format", "json", "--emit-derivation", str(target))
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "derivable"
    d = loads_derivation(target.read_text())
    assert check_derivation(d, CalculusId.MALC).valid


def test_prove_unknown_on_tiny_budget(capsys):
    code, out, _ = run(capsys, "prove", "--calculus", "malc", "--sequent", DISJ_SEQUENT_TEXT, "--budget-nodes", "3")
    assert code == 2 and "budget" in out


def test_prove_malc_d(capsys):
    code, _, _ = run(capsys, "prove", "--calculus", "malc_d", "--sequent", DISJ_SEQUENT_TEXT)
    assert code == 0


@pytest.mark.parametrize(
    "argv, code",
    [
        (["prove", "--calculus", "nope", "--sequent", "p |- p"], 64),
        (["prove", "--sequent", "p |- p"], 64),
        (["frobnicate"], 64),
        (["prove", "--calculus", "l", "--sequent", "p |- "], 65),
        (["prove", "--calculus", "l", "--sequent", "p & q |- p"], 65),
        (["prove", "--calculus", "l", "--sequent", "p |- p", "--budget-nodes", "0"], 64),
        (["lattice", "validate", "--lattice", "/no/such/file.json"], 65),
        (["repro", "--only", "nothing"], 64),
    ],
)
def test_error_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_lattice_commands(capsys, tmp_path):
    assert run(capsys, "lattice", "validate", "--lattice", "r5")[0] == 0
    code, out, _ = run(capsys, "lattice", "falsify", "--lattice", "r5", "--sequent", DISJ_SEQUENT_TEXT)
    assert code == 1
    assert "w=a,x=a,y=b,z=c" in out.splitlines()
    code, _, _ = run(capsys, "lattice", "eval", "--lattice", "r5", "--assign", "y=b,z=c,x=a,w=a",
                     "--sequent", DISJ_SEQUENT_TEXT)
    assert code == 1
    code, out, _ = run(capsys, "lattice", "builtin", "r5")
    assert code == 0
    path = tmp_path / "r5.json"
    path.write_text(out)
    assert run(capsys, "lattice", "validate", "--lattice", str(path))[0] == 0
    assert run(capsys, "lattice", "eval", "--lattice", "r5", "--assign", "p=zz", "--sequent", "p |- p")[0] == 65


def test_lattice_validate_reports_failures(capsys, tmp_path):
    from lambek.lattice import paper_lattice_r5

    path = tmp_path / "bad.json"
    path.write_text(json.dumps(paper_lattice_r5().with_prod("a", "b", "c").to_dict()))
    code, out, _ = run(capsys, "lattice", "validate", "--lattice", str(path), "--format", "json")
    assert code == 1
    assert any(f["law"] == "residuation" for f in json.loads(out)["failures"])


def test_model_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "model", "random", "--seed", "4", "--class", "commutative", "--vars", "p,q")
    assert code == 0
    path = tmp_path / "m.json"
    path.write_text(out)
    assert run(capsys, "model", "classcheck", "--model", str(path), "--class", "commutative")[0] == 0
    assert run(capsys, "model", "eval", "--model", str(path), "--sequent", "p & q |- p")[0] == 0
    assert run(capsys, "model", "eval", "--model", str(path), "--sequent", "p |- r")[0] == 65


def test_model_eval_false(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"alphabet": ["a", "b"], "vars": {"p": "ab"}}))
    assert run(capsys, "model", "classcheck", "--model", str(path), "--class", "monotone")[0] == 1
    assert run(capsys, "model", "eval", "--model", str(path), "--sequent", "p, p |- p")[0] == 1


def test_minsky_commands(capsys, loop_file):
    code, out, _ = run(capsys, "minsky", "derive", "--machine", loop_file, "--from", "1,3,0", "--check")
    assert code == 0 and "checker accepts" in out
    code, out, _ = run(capsys, "minsky", "simulate", "--machine", loop_file, "--from", "1,3,0", "--format", "json")
    assert code == 0 and len(json.loads(out)["trace"]) == 4
    code, out, _ = run(capsys, "minsky", "encode", "--machine", loop_file, "--from", "0,0,0")
    assert code == 0 and out.strip().endswith("e1, l0, e2 |- b")
    assert run(capsys, "minsky", "simulate", "--machine", loop_file, "--from", "1,0,1")[0] == 2
    assert run(capsys, "minsky", "simulate", "--machine", loop_file, "--from", "7,0,0")[0] == 65


def test_repro_single_case(capsys):
    code, out, _ = run(capsys, "repro", "--only", "lambek-restriction")
    assert code == 0
    assert out.splitlines()[0].startswith("PASS")
