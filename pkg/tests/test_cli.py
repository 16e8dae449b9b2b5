from __future__ import annotations

import json

from click.testing import CliRunner

from osce_trainer import fixture_path
from osce_trainer.cli import bench_cli, scenario_cli


def test_scenario_validate_ok():
    result = CliRunner().invoke(scenario_cli, ["validate", str(fixture_path("upper_limb_neuro.json"))])
    assert result.exit_code == 0
    assert "valid: upper_limb_neuro (4 checklist items)" in result.output


def test_scenario_validate_reports_violations(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"id": "x", "checklist": []}), encoding="utf-8")
    result = CliRunner().invoke(scenario_cli, ["validate", str(bad)])
    assert result.exit_code == 1
    assert "checklist must be non-empty" in result.output + (result.stderr or "")


def test_scenario_import(tmp_path):
    result = CliRunner().invoke(
        scenario_cli,
        ["import", str(fixture_path("upper_limb_neuro.json")), "--store-dir", str(tmp_path)],
    )
    assert result.exit_code == 0
    assert (tmp_path / "upper_limb_neuro.json").exists()


def test_bench_wer(tmp_path):
    pairs = tmp_path / "pairs.tsv"
    pairs.write_text("the cat sat\tthe cat sat\na b c d\ta x c\n", encoding="utf-8")
    result = CliRunner().invoke(bench_cli, ["wer", "--pairs", str(pairs)])
    assert result.exit_code == 0
    assert "pair-1" in result.output and "0.000" in result.output
    assert "0.500" in result.output


def test_bench_rtf(tmp_path):
    records = tmp_path / "records.tsv"
    records.write_text("whisper-tiny\t3.25\t10.0\nwhisper-small\t19.1\t10.0\n", encoding="utf-8")
    result = CliRunner().invoke(bench_cli, ["rtf", "--records", str(records)])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert any("whisper-tiny" in l and "0.325" in l and "yes" in l for l in lines)
    assert any("whisper-small" in l and "1.910" in l and "no" in l for l in lines)


def test_bench_latency_stub():
    result = CliRunner().invoke(bench_cli, ["latency", "--provider", "stub", "--n", "3", "--delay", "0.01"])
    assert result.exit_code == 0
    assert "Response Time" in result.output
    assert "s ± " in result.output
