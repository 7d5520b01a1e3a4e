"""Command-line driver: modes, exit codes, deterministic certificates."""

from __future__ import annotations

import json

import pytest

from hopfstokes.cli import EXIT_GATE, EXIT_INCONCLUSIVE, EXIT_INTEGRATOR, EXIT_OK, build_parser, main

# start points at Re s = -+50: the (x, y) boxes are wide there, so the window
# and width cap are widened and the run ends inconclusive
SHORT = ["--re-s", "50", "--rho-bar", "16.0", "--half-width", "5e-3", "--width-cap", "0.1"]


def test_thresholds_mode(capsys):
    assert main(["run", "--problem", "example1", "--mode", "thresholds"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["problem"] == "example1"
    assert set(data["thresholds"]) >= {"rho1", "rho2", "rho_star", "rho0"}


def test_oracle_mode_is_labelled(capsys, tmp_path):
    out = tmp_path / "oracle.json"
    assert main(["run", "--problem", "example1", "--mode", "oracle", *SHORT, "--out", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert text.startswith("NON-RIGOROUS")
    assert json.loads(out.read_text())["oracle"]["rigorous"] is False


def test_rho_bar_below_rho0_is_a_gate_failure(capsys):
    assert main(["run", "--problem", "example1", "--rho-bar", "5"]) == EXIT_GATE
    report = json.loads(capsys.readouterr().err)
    assert report["error"] == "ThresholdError" and report["gate"] == "rho0" and report["exit_code"] == EXIT_GATE


def test_rho_bar_beyond_start_is_a_gate_failure(capsys):
    assert main(["run", "--problem", "example2", "--re-s", "10", "--rho-bar", "16"]) == EXIT_GATE
    assert json.loads(capsys.readouterr().err)["gate"] == "shooting"


def test_tiny_width_cap_is_an_integrator_failure(capsys):
    assert main(["run", "--problem", "example1", *SHORT, "--width-cap", "1e-12"]) == EXIT_INTEGRATOR
    report = json.loads(capsys.readouterr().err)
    assert report["error"] == "WrappingFailure" and report["exit_code"] == EXIT_INTEGRATOR


def test_refine_needs_refinement_data():
    with pytest.raises(SystemExit):
        main(["run", "--problem", "example2", "--mode", "refine", *SHORT])


def test_parser_rejects_unknown_problem():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["run", "--problem", "example3"])


def test_short_runs_are_bit_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    codes = [main(["run", "--problem", "example1", *SHORT, "--out", str(p)]) for p in paths]
    assert codes == [EXIT_INCONCLUSIVE, EXIT_INCONCLUSIVE]
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    cert = json.loads(a)
    assert cert["schema_version"] == "1.0" and cert["problem"] == "example1"
    assert cert["parameters"]["shooting"]["s_plus_re"] == "50.0"
    assert cert["conclusion"] == "INCONCLUSIVE"
    assert "example1: INCONCLUSIVE" in capsys.readouterr().out
