import json
import subprocess
import sys

import pytest

from bicross.cli import run

Z6Z6 = ["--group", "product:dihedral:3,dihedral:3", "--factor", "z6z6"]


def _run(tmp_path, *argv):
    code = run([*argv, "--output-dir", str(tmp_path)])
    path = tmp_path / f"{argv[0]}.json"
    return code, (json.loads(path.read_text()) if path.exists() else None)


def test_factorize_lists_z6z6(tmp_path):
    code, out = _run(tmp_path, "factorize", "--group", "product:dihedral:3,dihedral:3")
    assert code == 0 and out["passed"]
    rows = out["results"]["factorizations"]
    assert any(r["G_order"] == r["M_order"] == 6 and r["G_cyclic"] and r["M_cyclic"] for r in rows)
    assert set(out) == {"command", "config", "passed", "report", "results"}


def test_check_trivial_group(tmp_path):
    code, out = _run(tmp_path, "check", "--group", "cyclic:1")
    assert code == 0 and out["passed"]


def test_braiding_minpoly(tmp_path):
    code, out = _run(tmp_path, "braiding", *Z6Z6, "--minpoly")
    assert code == 0
    assert out["results"]["minimal_polynomial_int"] == [-1, 0, -1, 0, 0, 0, 1, 0, 1]


def test_braiding_full(tmp_path):
    code, out = _run(tmp_path, "braiding", *Z6Z6)
    assert code == 0
    assert out["results"]["cycles"] == {"1": 36, "2": 306, "3": 12, "4": 108, "6": 30}
    assert any(c["name"].startswith("(ψ⊗id)") and c["passed"] for c in out["report"]["checks"])


def test_selfdual(tmp_path):
    code, out = _run(tmp_path, "selfdual", *Z6Z6, "--export-pairing")
    assert code == 0
    res = out["results"]
    assert res["factor_reversing"] == 4 and res["preserving_or_reversing"] == 8
    assert res["preserving_or_reversing_is_dihedral"]
    assert res["distinct_pairings"] == 4
    assert (tmp_path / "pairing_3.json").exists()


def test_build_and_double_on_s3(tmp_path):
    assert _run(tmp_path, "build", "--group", "sym:3", "--export")[0] == 0
    hopf = json.loads((tmp_path / "H.json").read_text())
    assert hopf["dim"] == 6
    code, out = _run(tmp_path, "double", "--group", "sym:3", "--r-element")
    assert code == 0 and out["results"]["dim"] == 36
    assert (tmp_path / "R.json").exists()


def test_modules_export_and_reload(tmp_path):
    code, _ = _run(tmp_path, "modules", "--group", "sym:3", "--export")
    assert code == 0
    path = tmp_path / "schrodinger_module.json"
    code, out = _run(tmp_path, "modules", "--group", "sym:3", "--module", str(path))
    assert code == 0 and out["passed"]
    obj = json.loads(path.read_text())
    obj["gradeM"][0] = (obj["gradeM"][0] + 1) % 2 if max(obj["gradeM"]) < 2 else (obj["gradeM"][0] + 1) % 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, out = _run(tmp_path, "modules", "--group", "sym:3", "--module", str(bad))
    assert code == 1 and not out["passed"]


def test_twist_check_s3(tmp_path):
    code, out = _run(tmp_path, "twist-check", "--group", "sym:3", "--export-F")
    assert code == 0
    assert (tmp_path / "F.json").exists()


def test_twist_check_trivial_factor_is_vacuous(tmp_path):
    code, out = _run(tmp_path, "twist-check", "--group", "sym:3", "--factor", "0")
    assert code == 0
    assert out["results"]["coboundary"].startswith("vacuous")


@pytest.mark.parametrize("argv", [["nonsense"], ["check", "--bogus"], ["factorize"],
                                  ["factorize", "--group", "foo:3"], ["build", "--group", "sym:3", "--factor", "99"],
                                  ["check", "--group", "cyclic:1", "--sample-size", "0"]])
def test_usage_errors(tmp_path, argv):
    assert run([*argv, "--output-dir", str(tmp_path)]) == 2


def test_malformed_files(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run(["factorize", "--group", str(broken), "--output-dir", str(tmp_path)]) == 2
    assert run(["modules", "--group", "sym:3", "--module", str(broken), "--output-dir", str(tmp_path)]) == 2


def test_group_from_file(tmp_path):
    from bicross.groups import group_to_json, symmetric_group
    path = tmp_path / "s3.json"
    path.write_text(json.dumps(group_to_json(symmetric_group(3))))
    code, out = _run(tmp_path, "factorize", "--group", str(path))
    assert code == 0 and len(out["results"]["factorizations"]) == 8


def test_same_config_gives_identical_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(["double", "--group", "sym:3", "--output-dir", str(a)])
    run(["double", "--group", "sym:3", "--output-dir", str(b)])
    assert (a / "double.json").read_bytes() == (b / "double.json").read_bytes()


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("BICROSS_OUTPUT_DIR", str(tmp_path / "env"))
    proc = subprocess.run([sys.executable, "-m", "bicross", "factorize", "--group", "sym:3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "env" / "factorize.json").exists()


def test_help_exits_zero():
    proc = subprocess.run([sys.executable, "-m", "bicross", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "twist-check" in proc.stdout
