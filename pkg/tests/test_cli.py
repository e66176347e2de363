import json
import subprocess
import sys

import jsonschema
import pytest

from lensorder.cli import main
from lensorder.schemas import load, validate


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_by_degree(text):
    rows = {}
    for line in text.splitlines():
        parts = line.split()
        if parts and parts[0].isdigit():
            rows[int(parts[0])] = parts
    return rows


def test_homology_equivariant(capsys):
    code, out, _ = run(capsys, "homology", "-n", "2", "-k", "3", "-R", "7/10", "-a", "1",
                       "--max-degree", "12", "--equivariant")
    assert code == 0
    rows = rows_by_degree(out)
    assert rows[8][1:] == ["F_3", "1", "agree"]
    assert rows[4][1:] == ["0", "0", "agree"]
    assert rows[12][1:] == ["F_3", "1", "agree"]
    assert rows[11][-1] == "tower-sensitive"
    assert "balls_homology_eq" in out


def test_homology_nonequivariant(capsys):
    code, out, _ = run(capsys, "homology", "-n", "1", "-k", "2", "-R", "5/2", "--max-degree", "6")
    assert code == 0
    rows = rows_by_degree(out)
    assert [d for d, r in rows.items() if r[2] == "1"] == [2]
    assert all(r[-1] == "agree" for r in rows.values())


def test_homology_integral(capsys):
    code, out, _ = run(capsys, "homology", "-n", "2", "-k", "3", "-R", "0.7",
                       "--max-degree", "10", "--coeff", "Z", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["agree"]
    assert doc["chain"]["coefficients"] == "Z" and doc["chain"]["ranks"] == {"8": 1}


@pytest.mark.parametrize("argv", [
    ["homology", "-n", "2", "-k", "4", "-R", "1/2", "--max-degree", "4"],
    ["homology", "-n", "2", "-k", "3", "-R", "1/2", "--max-degree", "4"],
    ["homology", "-n", "2", "-k", "3", "--weights", "1,3", "-R", "7/10", "--max-degree", "4"],
    ["homology", "-n", "2", "-k", "3", "-R", "7/10", "--max-degree", "0"],
    ["squeeze", "-n", "2", "-R", "4/5", "--Rp", "1/10", "--equivariant"],
    ["squeeze", "-n", "2", "-R", "1/5", "--Rp", "1/2"],
    ["verify-contact", "-k", "6"],
    ["verify-contact", "--map", "bhupal", "--corrupt", "sigma"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["homology", "-n", "2", "-k", "3", "-R", "seven", "--max-degree", "4"])
    assert exc.value.code == 2


def test_squeeze_examples(capsys):
    code, out, _ = run(capsys, "squeeze", "-n", "2", "-k", "3", "-R", "4/5", "--Rp", "1/10",
                       "--equivariant", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert (doc["status"], doc["witness"], doc["degree"]) == ("Obstructed", 2, 8)
    assert doc["diagram"] == {"Rpp": 1, "R": 1, "Rp": 0}
    code, out, _ = run(capsys, "squeeze", "-n", "2", "-R", "4/5", "--Rp", "1/10")
    assert code == 0 and "SqueezablePerEKP" in out
    code, out, _ = run(capsys, "squeeze", "-n", "2", "-R", "3/2", "--Rp", "1/2")
    assert code == 0 and "Obstructed" in out and "m=1" in out
    code, out, _ = run(capsys, "squeeze", "-n", "2", "-k", "3", "-R", "4/5", "--Rp", "3/5",
                       "--equivariant")
    assert code == 0 and "NoVerdict" in out


def test_verify_contact_default(capsys):
    code, out, _ = run(capsys, "verify-contact")
    assert code == 0
    assert out.count("PASS") == 2 and "max_residual" in out


def test_verify_contact_negative_controls(capsys):
    code, out, _ = run(capsys, "verify-contact", "--corrupt", "sigma", "--points", "200")
    assert code == 1 and "FAIL" in out
    code, out, _ = run(capsys, "verify-contact", "--map", "bhupal", "--check", "equivariance",
                       "--points", "200")
    assert code == 0 and "FAIL (expected-negative)" in out


def test_verify_contact_json_and_workers(capsys, tmp_path):
    args = ["verify-contact", "--points", "300", "--seed", "9", "--format", "json", "--records"]
    code, serial, _ = run(capsys, *args)
    code2, parallel, _ = run(capsys, *args, "--workers", "3")
    assert code == code2 == 0
    assert serial == parallel
    doc = json.loads(serial)
    validate(doc, "residual_report")
    assert len(doc["reports"][0]["records"]) == 300
    target = tmp_path / "report.json"
    run(capsys, *args, "--output", str(target))
    assert target.read_text() == serial


def test_determinism_across_processes():
    cmd = [sys.executable, "-m", "lensorder", "homology", "-n", "2", "-k", "5", "-R", "13/10",
           "--max-degree", "16", "--equivariant", "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b
    doc = json.loads(a)
    validate(doc["chain"], "homology_table")
    validate(doc["oracle"], "homology_table")


def test_schemas_reject_bad_documents():
    with pytest.raises(jsonschema.ValidationError):
        validate({"status": "NoVerdict", "witness": 3, "degree": None, "diagram": None},
                 "squeeze_verdict")
    with pytest.raises(jsonschema.ValidationError):
        validate({"coefficients": "F3", "ranks": {"1": -1}, "torsion": {}, "annotations": {}},
                 "homology_table")
    with pytest.raises(KeyError):
        load("profile")
