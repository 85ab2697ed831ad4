#!/usr/bin/env python3

from __future__ import annotations

import io
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

# Ensure we can import from src without installing the package
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
sys.path.insert(0, str(SRC))

from brokenarrow import __version__
from brokenarrow.__main__ import main


def _run_json(capsys, argv):
    rc = main(["--quiet", *argv])
    out = capsys.readouterr().out
    assert rc == 0
    return json.loads(out)


def test_chains_hu_quarter_pi(capsys):
    doc = _run_json(capsys, ["chains", "--family", "hu", "--alpha", "pi/4", "--format", "json"])
    assert doc["meta"]["version"] == __version__
    assert doc["meta"]["command"] == "chains"
    broken = doc["chains"]["broken"]
    assert len(broken) == 1
    assert broken[0]["arrow"] == "A_{a+} -/-> B_{a+}"
    assert broken[0]["witness_probability"] == pytest.approx(1 / 12, abs=1e-12)


def test_chains_status_goes_to_stderr(capsys):
    assert main(["chains", "--family", "hu", "--alpha", "0.7854"]) == 0
    captured = capsys.readouterr()
    assert "[chains]" in captured.err
    assert "[chains]" not in captured.out


def test_lhv_feasibility_kwiat_hardy(capsys):
    doc = _run_json(capsys, ["lhv", "feasibility", "--family", "hardy", "--alpha-cos", "sqrt(2/5)"])
    assert doc["feasibility"]["feasible"] is False
    assert doc["chsh"]["inside"] is False


def test_lhv_sample_counts(capsys):
    doc = _run_json(capsys, ["lhv", "sample", "--draws", "2000", "--seed", "3"])
    assert int(np.array(doc["sample"]["counts"]).sum()) == 2000
    assert doc["sample"]["seed"] == 3


def test_lhv_sample_with_one_draw_succeeds(capsys):
    doc = _run_json(capsys, ["lhv", "sample", "--shared", "--draws", "1"])
    assert len(doc["sample"]["undrawn"]) == 8
    assert int(np.array(doc["sample"]["counts"]).sum()) == 1


def test_lhv_shared_tickets(capsys):
    doc = _run_json(capsys, ["lhv", "tickets", "--shared"])
    assert len(doc["tickets"]) == 4


def test_curve_csv(capsys):
    rc = main(["--quiet", "curve", "--points", "101", "--format", "csv"])
    assert rc == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert len(frame) == 101
    np.testing.assert_allclose(frame["lhs"], -2 - 4 * frame["witness"], atol=1e-12)


def test_geometry_point(capsys):
    doc = _run_json(capsys, ["geometry", "--point=0.5,0.5,0.5"])
    assert doc["report"]["label"] == "Q"
    assert doc["report"]["setup"] == "mermin"


def test_regions_csv(capsys):
    rc = main(["--quiet", "regions", "--mode", "grid", "--resolution", "5", "--format", "csv"])
    assert rc == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert len(frame) == 125


def test_singlet_array(capsys):
    doc = _run_json(capsys, ["array", "--family", "singlet"])
    assert doc["nonsignaling"]["passed"] is True
    assert doc["array"]["settingsA"] == ["a", "b", "c"]
    assert len(doc["array"]["cells"]) == 9


def test_out_file(capsys, tmp_path):
    target = tmp_path / "nested" / "state.json"
    rc = main(["--quiet", "state", "--family", "hardy", "--alpha", "0.5", "--out", str(target)])
    assert rc == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(target.read_text(encoding="utf-8"))
    assert "state" in doc


def test_sweep_is_deterministic(capsys):
    argv = ["--quiet", "sweep", "--target", "chains", "--family", "hu", "--points", "5", "--format", "csv"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    assert len(pd.read_csv(io.StringIO(first))) == 5


def test_bad_alpha_is_a_usage_error(capsys):
    rc = main(["--quiet", "chains", "--family", "hu", "--alpha", "2"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_missing_family_is_a_usage_error(capsys):
    rc = main(["--quiet", "chains"])
    assert rc == 2
    assert "needs --family" in capsys.readouterr().err


def test_alpha_and_alpha_cos_together(capsys):
    rc = main(["--quiet", "chains", "--family", "hu", "--alpha", "0.3", "--alpha-cos", "0.5"])
    assert rc == 2


@pytest.mark.parametrize("argv", [
    ["lhv", "sample", "--raffle", "uniform", "--draws", "0", "--format", "csv"],
    ["regions", "--mode", "grid", "--resolution", "0", "--format", "csv"],
])
def test_zero_counts_are_rejected_not_defaulted(capsys, argv):
    rc = main(["--quiet", *argv])
    captured = capsys.readouterr()
    assert rc == 2
    assert captured.out == ""
    assert "must be > 0" in captured.err


def test_missing_config_file_is_a_usage_error(capsys, tmp_path):
    rc = main(["--quiet", "--config", str(tmp_path / "nonexistent.yaml"), "curve"])
    assert rc == 2
    assert "Config not found" in capsys.readouterr().err


def test_bad_config_documents_are_usage_errors(capsys, tmp_path):
    not_a_mapping = tmp_path / "list.yaml"
    not_a_mapping.write_text("- 1\n- 2\n", encoding="utf-8")
    assert main(["--quiet", "--config", str(not_a_mapping), "curve"]) == 2
    broken = tmp_path / "broken.yaml"
    broken.write_text("grid: {points: 5\n", encoding="utf-8")
    assert main(["--quiet", "--config", str(broken), "curve"]) == 2
    assert capsys.readouterr().err.count("error:") == 2


def test_config_file_overrides_defaults(capsys, tmp_path):
    custom = tmp_path / "defaults.yaml"
    custom.write_text("grid:\n  points: 7\n", encoding="utf-8")
    rc = main(["--quiet", "--config", str(custom), "curve", "--format", "csv"])
    assert rc == 0
    assert len(pd.read_csv(io.StringIO(capsys.readouterr().out))) == 7


def test_no_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
