"""The ``analyze`` command and the JSON report."""
from __future__ import annotations

import json
import subprocess
import sys

import pytest

from newtoninf.cli import main
from newtoninf.report import SCHEMA, Options, analyze, build_report, dumps

from conftest import FIXTURES, MAPS, load

PROVENANCE = {"exact", "float", "empirical"}


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def bare_floats(node, path="$"):
    """Paths of floats not wrapped in a provenance record."""
    if isinstance(node, dict):
        if set(node) == {"value", "provenance"}:
            assert node["provenance"] in PROVENANCE, path
            return []
        return [p for k, v in node.items() for p in bare_floats(v, f"{path}.{k}")]
    if isinstance(node, list):
        return [p for i, v in enumerate(node) for p in bare_floats(v, f"{path}[{i}]")]
    return [path] if isinstance(node, float) else []


def test_bad_map_exit_code(capsys):
    code, _, err = run_cli(capsys, "analyze", str(MAPS / "bad.map"))
    assert code == 2
    assert "bad.map:4" in err and "NonzeroConstantTerm" in err


def test_missing_file_exit_code(capsys, tmp_path):
    code, _, err = run_cli(capsys, "analyze", str(tmp_path / "none.map"))
    assert code == 2 and "cannot read" in err


def test_guard_exit_code(capsys, tmp_path):
    names = " ".join(f"x{i}" for i in range(9))
    path = tmp_path / "big.map"
    path.write_text(f"setting: real\nvars: {names}\nmap:\nf = " + " + ".join(names.split()) + "\n")
    code, _, err = run_cli(capsys, "analyze", str(path))
    assert code == 3 and "DimensionTooLarge" in err


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as info:
        main(["analyze", str(MAPS / "ex53.map"), "--no-such-flag"])
    assert info.value.code == 2


def test_bad_radii_rejected(capsys):
    with pytest.raises(SystemExit):
        main(["analyze", str(MAPS / "ex53.map"), "--radii", "10:10"])


def test_ex55_bound(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, text, _ = run_cli(capsys, "analyze", str(MAPS / "ex55.map"), "--bound", "--check-nd", "--json", str(out))
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["N"]["pieces"] == [[2], [3]]
    assert rep["invertibility"]["tag"] == "ConditionalDiffeo"
    assert rep["invertibility"]["determinant"]["text"] == "1"
    facts = {e["fact"]: e["value"] for e in rep["invertibility"]["evidence"]}
    assert facts["sing"].startswith("empty")
    assert "N(F) = {c2 = 0} u {c3 = 0}" in text


def test_ex53_compare(capsys):
    code, text, _ = run_cli(capsys, "analyze", str(MAPS / "ex53.map"), "--compare-definitions", "--json", "-", "-q")
    assert code == 0
    rep = json.loads(text)
    cmp = rep["comparison"]
    assert cmp["torus_condition"]["verdict"]["tag"] == "NonDegenerate"
    full = cmp["all_components_condition"]["verdict"]
    assert full["tag"] == "Degenerate"
    assert [c["value"] for c in full["witness"]["point"]] == [1.0, 1.0]
    assert cmp["gap"] is True


def test_summary_goes_to_stderr_with_json_stdout(capsys):
    code, out, err = run_cli(capsys, "analyze", str(MAPS / "ex53.map"), "--json", "-")
    assert code == 0
    json.loads(out)
    assert err.startswith("map: real")


def test_export_systems(capsys, tmp_path):
    path = tmp_path / "m.map"
    path.write_text("setting: real\nvars: x y z\nmap:\nf = x^2*y + y^2*z + z^2*x - x*y*z\n")
    out = tmp_path / "systems"
    code, _, _ = run_cli(capsys, "analyze", str(path), "--check-nd", "--export-systems", str(out), "--nd-restarts", "2")
    assert code == 0
    assert sorted(p.name for p in out.iterdir())


def test_translate_constants(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run_cli(capsys, "analyze", str(MAPS / "bad.map"), "--translate-constants", "--json", str(out))
    assert code == 0
    assert json.loads(out.read_text())["input"]["translated_constants"] == {"f": {"value": "1", "provenance": "exact"}}


@pytest.mark.parametrize("name", FIXTURES)
def test_report_provenance(name):
    opts = Options(check_nd=True, bound=True, compare=load(name).setting.value == "real")
    rep = build_report(analyze(load(name), opts), None, opts)
    assert rep["schema"] == SCHEMA
    assert bare_floats(rep) == []
    assert dumps(rep) == dumps(json.loads(dumps(rep)))


def test_mixed_report_lists_realified_convenience():
    opts = Options(check_nd=True)
    rep = build_report(analyze(load("ex54"), opts), None, opts)
    assert [c["convenient"] for c in rep["convenience"]] == [True, True]
    assert [c["convenient"] for c in rep["realified"]["convenience"]] == [False] * 4
    assert rep["nondegeneracy"]["sing_convention"] == "realified Jacobian rank"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "newtoninf", "analyze", str(MAPS / "x2.map"), "--bound"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "SingularityFound" in proc.stdout
