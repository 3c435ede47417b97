import json

import pytest
from click.testing import CliRunner

from satellite_hfk.cli import REPORT_SCHEMA, SweepConfig, main


def run(*args, **kwargs):
    return CliRunner().invoke(main, list(args), **kwargs)


def test_compute_json():
    result = run("compute", "--companion", "T23", "--i", "0", "--j", "1", "--n", "0", "--format", "json")
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["schema"] == REPORT_SCHEMA
    assert (doc["genus"], doc["tau"], doc["epsilon"]) == (2, 2, 1)
    assert sum(e["rank"] for e in doc["ranks"]) % 2 == 1


def test_compute_text():
    result = run("compute", "--companion", "unknot", "--n", "-1")
    assert result.exit_code == 0
    assert result.output.startswith("Q^{0,1}_-1(unknot)")
    assert "THIN" in result.output


def test_bad_input_exit_code(tmp_path):
    assert run("compute", "--companion", "nope").exit_code == 2
    assert run("compute", "--companion", "T23", "--j", "0").exit_code == 2
    bad = tmp_path / "bad.knot"
    bad.write_text("gen a A=0 M=0\ngen b A=0 M=0\n")
    result = run("compute", "--companion", str(bad))
    assert result.exit_code == 2
    assert "invalid companion" in result.output


def test_companion_file(tmp_path):
    path = tmp_path / "trefoil.knot"
    path.write_text("gen x0 A=1 M=0\ngen x1 A=0 M=-1\ngen x2 A=-1 M=-2\narrow x1 x0 U^1\narrow x1 x2 V^1\n")
    result = run("compute", "--companion", str(path), "--format", "json")
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["companion"] == "trefoil"


def test_verify_passing_grid():
    result = run("verify", "--companion", "mT23", "--i-range", "0", "--j-range", "1..2", "--n-range", "-1,1")
    assert result.exit_code == 0, result.output
    assert result.output.strip().endswith("4/4 cases passed")


def test_verify_reports_mismatch():
    result = run("verify", "--companion", "unknot", "--i-range", "0", "--j-range", "1", "--n-range", "1", "--checks", "epsilon")
    assert result.exit_code == 1
    assert "FAIL (unknot, 0, 1, 1, epsilon)" in result.output


def test_verify_rejects_bad_options():
    assert run("verify", "--checks", "bogus").exit_code == 2
    assert run("verify", "--j-range", "0..1").exit_code == 2
    assert run("verify", "--n-range", "x").exit_code == 2


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig((), (0,), (1,), (0,), ("tau",))
    with pytest.raises(ValueError):
        SweepConfig(("T23",), (0,), (1,), (0,), ("tau",), parallelism=0)


def test_render(tmp_path):
    out = tmp_path / "d.svg"
    result = run("render", "--companion", "T23", "--out", str(out))
    assert result.exit_code == 0
    assert out.read_text().startswith("<svg")
    missing = tmp_path / "no" / "such" / "dir.svg"
    assert run("render", "--companion", "T23", "--out", str(missing)).exit_code == 4


def test_list():
    result = run("list", "--format", "json", "--verify")
    assert result.exit_code == 0
    rows = {r["name"]: r for r in json.loads(result.output)}
    assert rows["fig8"]["hat_rank"] == 5
    assert rows["T25"]["tau"] == 2
