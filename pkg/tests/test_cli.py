import json
import subprocess
import sys

import pytest

from ellbeta.cli import main

import oracles


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_eisenstein_odd(capsys):
    code, out = run(capsys, "eisenstein", "--weight", "3", "--prec", "6")
    assert code == 0
    obj = json.loads(out)
    assert obj["name"] == "E3"
    assert obj["series"]["coeffs"][:3] == [{"re": "1/1", "im": "0/1"}, {"re": "-9/1", "im": "0/1"},
                                           {"re": "27/1", "im": "0/1"}]
    want = oracles.eisenstein_oracle(3, 6)
    assert [c["re"] for c in obj["series"]["coeffs"]] == [f"{x.numerator}/{x.denominator}" for x in want]


def test_eisenstein_even_and_usage(capsys):
    code, out = run(capsys, "eisenstein", "--weight", "2", "--prec", "3")
    assert code == 0 and json.loads(out)["name"] == "G*2"
    assert main(["eisenstein", "--weight", "0", "--prec", "3"]) == 2


def test_genus(capsys):
    code, out = run(capsys, "genus", "--xmax", "2")
    assert code == 0
    coeffs = json.loads(out)["coefficients"]
    assert len(coeffs) == 3 and coeffs[2]["weight"] == 2


def test_finv_admissible(capsys):
    code, out = run(capsys, "finv", "--s", "1", "--n", "1", "--j", "2", "--i", "0", "--kind", "simple")
    obj = json.loads(out)
    assert code == 0 and obj["match"] is True and obj["case"] == "simple i=0 n=1"


def test_finv_inadmissible(capsys):
    code, out = run(capsys, "finv", "--s", "1", "--n", "2", "--j", "5", "--i", "0", "--kind", "simple")
    obj = json.loads(out)
    assert code == 1 and obj["admissible"] is False and "2^n" in obj["diagnostic"]


def test_verify_csv(capsys):
    code, out = run(capsys, "verify", "--suite", "identities", "--max-weight", "12", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0].startswith("suite,label,match")


def test_verify_rejects_weight_above_ceiling(capsys):
    assert main(["verify", "--suite", "theorem1", "--max-weight", "1000"]) == 2


def test_lattice(capsys):
    code, out = run(capsys, "lattice", "--weight", "3", "--dump")
    obj = json.loads(out)
    assert code == 0 and obj["dimension"] == 5 and obj["elementary_exponents"] == [0, 0, 0, 0, 1]
    assert len(obj["basis_matrix"]) == 5


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_subprocess_output_is_byte_identical():
    cmd = [sys.executable, "-m", "ellbeta.cli", "verify", "--suite", "theorem1", "--max-weight", "12",
           "--no-timings"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd + ["--jobs", "2"], capture_output=True, check=False)
    assert a.returncode == 0 and b.returncode == 0
    assert a.stdout == b.stdout
    assert json.loads(a.stdout)
