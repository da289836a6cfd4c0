"""Tests for the command-line interface."""

from pathlib import Path

import pytest
from typer.testing import CliRunner

from intellicar import __version__
from intellicar.cli import app
from intellicar.config import load_world_config
from intellicar.models import LightColor
from intellicar.signals import read_ppm
from intellicar.vision import classify

runner = CliRunner()

SCENARIOS = Path(__file__).parent.parent / "scenarios"
CONFIGS = Path(__file__).parent.parent / "configs"


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_init_writes_a_loadable_config(workdir):
    result = runner.invoke(app, ["init", "--preset", "degraded"])
    assert result.exit_code == 0
    cfg = load_world_config(workdir / "world.env")
    assert cfg.p_loss == 0.8
    assert cfg.lane_count == 1


def test_run_writes_one_row(workdir):
    out = workdir / "run.csv"
    result = runner.invoke(
        app, ["run", "--scenario", str(SCENARIOS / "platoon.txt"), "-n", "30", "-o", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "Run complete" in result.output
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# config_hash=")
    assert "scenario=platoon.txt" in lines[0]
    assert len(lines) == 3


def test_run_defaults_to_the_results_directory(workdir):
    result = runner.invoke(app, ["run", "-n", "5"])
    assert result.exit_code == 0, result.output
    assert (workdir / "results" / "run.csv").exists()


def test_run_is_deterministic(workdir):
    args = ["run", "--config", str(CONFIGS / "degraded.env"), "-n", "40"]
    runner.invoke(app, [*args, "-o", "a.csv"])
    runner.invoke(app, [*args, "-o", "b.csv"])
    assert (workdir / "a.csv").read_bytes() == (workdir / "b.csv").read_bytes()


def test_sweep_rounds(workdir):
    out = workdir / "rounds.csv"
    result = runner.invoke(
        app,
        ["sweep-rounds", "--rounds", "1,2", "--seeds", "2", "-n", "10", "-o", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert "spearman" in result.output
    lines = out.read_text(encoding="utf-8").splitlines()
    assert "grid=decision_rounds" in lines[0]
    assert len(lines) == 2 + 6


def test_sweep_cars(workdir):
    out = workdir / "cars.csv"
    result = runner.invoke(
        app, ["sweep-cars", "--counts", "2,3", "--seeds", "1", "-n", "5", "-o", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert len(out.read_text(encoding="utf-8").splitlines()) == 2 + 4


def test_timeline(workdir):
    out = workdir / "timeline.csv"
    result = runner.invoke(
        app,
        ["timeline", "--scenario", str(SCENARIOS / "stoplight.txt"), "-n", "50", "-o", str(out)],
    )
    assert result.exit_code == 0, result.output
    lines = out.read_text(encoding="utf-8").splitlines()
    assert "interval=1.0" in lines[0]
    assert lines[1] == "interval,start,decision_count"
    assert len(lines) == 2 + 5


def test_patch(workdir):
    out = workdir / "green.ppm"
    result = runner.invoke(app, ["patch", "--phase", "green", "-o", str(out)])
    assert result.exit_code == 0, result.output
    assert classify(read_ppm(out)) is LightColor.GREEN


@pytest.mark.parametrize(
    "args, message",
    [
        (["run", "--config", "missing.env"], "config file not found"),
        (["run", "--scenario", "missing.txt"], "scenario file not found"),
        (["run", "--preset", "nope"], "preset"),
        (["sweep-rounds", "--rounds", "4,2"], "ascending"),
        (["timeline", "--interval", "0.01"], "interval"),
    ],
)
def test_input_errors_exit_one(args, message):
    result = runner.invoke(app, args)
    assert result.exit_code == 1
    assert "Error:" in result.output
    assert message in result.output


def test_bad_scenario_reports_the_pair(workdir):
    bad = workdir / "bad.txt"
    bad.write_text("car 0 0 0 0 900\ncar 1 0 3 0 900\n", encoding="utf-8")
    result = runner.invoke(app, ["run", "--scenario", str(bad), "-n", "1"])
    assert result.exit_code == 1
    assert "cars 0 and 1 overlap" in result.output


def test_malformed_list_is_a_usage_error():
    result = runner.invoke(app, ["sweep-cars", "--counts", "2,x"])
    assert result.exit_code == 2
