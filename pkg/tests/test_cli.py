import json

import pytest

from Picard.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_picgroup_json(capsys):
    code, out, _ = _run(capsys, "picgroup", "--r", "2", "--g", "2", "--n", "3", "--json")
    assert code == 0
    assert out.startswith('{"r":2,"g":2,"n":3,"d":3,"free_rank":3,"torsion":[20],')
    payload = json.loads(out)
    assert payload["free_basis"] == ["Z^{1,2}", "Z^{1,3}", "Z^{2,3}"]
    assert json.dumps(payload, separators=(",", ":")) == out.strip()


def test_picgroup_text(capsys):
    code, out, _ = _run(capsys, "picgroup", "--r", "2", "--d", "3", "--n", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "r=2 g=2 n=1 d=3"
    assert lines[1] == "Pic = Z (+) Z/10"
    assert "torsion origin: pullback_from_unpointed" in lines


def test_picgroup_empty_stack(capsys):
    code, out, err = _run(capsys, "picgroup", "--r", "3", "--g", "3", "--n", "0")
    assert code == 1
    assert out == ""
    assert "empty stack: d not integral" in err


def test_picgroup_empty_stack_json(capsys):
    code, out, _ = _run(capsys, "picgroup", "--r", "3", "--g", "3", "--n", "0", "--json")
    assert code == 1
    assert json.loads(out) == {"error": "empty_stack", "message": "empty stack: d not integral"}


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["picgroup", "--r", "two", "--g", "2", "--n", "0"],
        ["picgroup", "--r", "2", "--g", "2", "--n", "0", "--colour"],
        ["picgroup", "--r", "2", "--g", "2", "--d", "4", "--n", "0"],
        ["picgroup", "--r", "2", "--n", "0"],
        ["disc", "--coeffs", "1,x,2"],
        ["disc", "--coeffs", "1/0,1,1"],
        ["verify", "lattice", "--r", "2", "--d", "3", "--n", "-1"],
        ["picgroup", "--r", "2", "--g", "-2", "--n", "0"],
        ["verify", "elimination", "--r", "2", "--d", "3", "--n", "5", "--trials", "0"],
        ["verify", "elimination", "--r", "2", "--d", "3", "--n", "5", "--seed", "-1"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err


def test_consistent_g_and_d(capsys):
    code, out, _ = _run(capsys, "picgroup", "--r", "2", "--g", "2", "--d", "3", "--n", "0")
    assert code == 0
    assert "Pic = Z/10" in out


def test_verify_elimination_golden(capsys):
    code, out, _ = _run(
        capsys, "verify", "elimination", "--r", "2", "--d", "3", "--n", "5", "--trials", "20", "--seed", "42"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("verify elimination seed=42 trials=20")
    assert lines[-1] == "ALL CHECKS PASSED"


def test_verify_is_deterministic(capsys):
    argv = ["verify", "elimination", "--r", "3", "--d", "2", "--n", "4", "--trials", "5", "--seed", "7", "--json"]
    first = _run(capsys, *argv)
    second = _run(capsys, *argv)
    assert first == second
    assert json.loads(first[1])["passed"] is True


def test_verify_discriminant(capsys):
    code, out, _ = _run(capsys, "verify", "discriminant", "--r", "2", "--d", "3", "--trials", "3", "--seed", "1")
    assert code == 0
    assert out.splitlines()[-1] == "ALL CHECKS PASSED"


def test_verify_elimination_out_of_range(capsys):
    code, _, err = _run(capsys, "verify", "elimination", "--r", "2", "--d", "3", "--n", "9")
    assert code == 1
    assert "rd+1" in err


def test_disc(capsys):
    code, out, _ = _run(capsys, "disc", "--coeffs", "1,0,1")
    assert (code, out) == (0, "disc = 4\n")
    code, out, _ = _run(capsys, "disc", "--coeffs", "1/4,0,1/9", "--json")
    assert code == 0
    assert json.loads(out) == {"degree": 2, "coefficients": ["1/4", "0", "1/9"], "discriminant": "1/9"}


def test_disc_degree_too_small(capsys):
    code, out, _ = _run(capsys, "disc", "--coeffs", "1,2", "--json")
    assert code == 1
    assert json.loads(out)["error"] == "degree_too_small"


def test_relations(capsys):
    code, out, _ = _run(capsys, "relations", "--r", "2", "--n", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "relations r=2 n=4: 3 rows, 6 columns"
    assert "rank = 2" in lines
    assert "quotient = Z^4" in lines


def test_relations_json(capsys):
    code, out, _ = _run(capsys, "relations", "--r", "3", "--n", "4", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["rank"] == 2
    assert payload["quotient"] == {"free_rank": 10, "torsion": []}
    assert len(payload["columns"]) == 12


def test_phi(capsys):
    code, out, _ = _run(capsys, "phi", "--r", "2", "--d", "3", "--n", "4")
    assert code == 0
    lines = out.splitlines()
    assert [line.split("=")[0] for line in lines] == [
        "phi[1]", "lambda[1]", "psi[1]", "phi[0]", "lambda[0]", "psi[0]",
    ]
    assert "lambda[0]=1" in lines
    assert all(" = " not in line for line in lines)
