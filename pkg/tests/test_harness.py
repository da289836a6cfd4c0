"""Tests for scored runs, sweeps and the decision timeline."""

import math
from pathlib import Path

import pandas as pd
import pytest
from conftest import scenario_of
from pydantic import ValidationError

from intellicar.config import WorldConfig
from intellicar.harness import (
    SWEEP_COLUMNS,
    MetricsReport,
    decisions_timeline,
    default_scenario,
    run_scenario,
    run_seed,
    spearman,
    sweep_car_count,
    sweep_decision_time,
    sweep_metadata,
    sweep_seeds,
    write_csv,
)
from intellicar.models import EngineState
from intellicar.scenario import CarSpec, load_scenario, random_scenario

SCENARIOS = Path(__file__).parent.parent / "scenarios"

PERFECT = WorldConfig(sensor_noise_sigma=0.0, p_loss=0.0, comms_radius=5000.0)


class TestRunScenario:
    def test_zero_steps(self, cfg):
        report = run_scenario(cfg, default_scenario(cfg), 0)
        assert report.epochs == 0
        assert report.accuracy == 1.0
        assert report.decisions == 0
        assert report.decisions_per_interval == []

    def test_epochs_count_every_car_every_step(self, cfg):
        report = run_scenario(cfg, default_scenario(cfg), 25)
        assert report.car_count == 10
        assert report.epochs == 250
        assert report.steps == 25
        assert report.seed == cfg.rng_seed

    @pytest.mark.parametrize("seed", range(10))
    def test_perfect_information_is_fully_accurate(self, seed):
        scenario = random_scenario(PERFECT, 15, seed, span=300.0)
        report = run_seed(PERFECT, scenario, 100, seed)
        assert report.accuracy == 1.0
        assert report.run_id == f"seed-{seed}"

    def test_all_stopped_cars_take_no_decisions(self, cfg):
        spec = scenario_of(
            *(CarSpec(i, 0, 10.0 * i, 0.0, 900.0, EngineState.STOP) for i in range(4))
        )
        report = run_scenario(cfg, spec, 50)
        assert report.decisions == 0
        assert report.accuracy == 1.0
        assert report.collisions == 0

    def test_same_inputs_same_report(self):
        cfg = WorldConfig.preset("degraded")
        scenario = default_scenario(cfg)
        assert run_scenario(cfg, scenario, 60) == run_scenario(cfg, scenario, 60)

    def test_rejects_bad_arguments(self, cfg):
        with pytest.raises(ValueError, match="steps"):
            run_scenario(cfg, default_scenario(cfg), -1)
        with pytest.raises(ValueError, match="interval"):
            run_scenario(cfg, default_scenario(cfg), 10, interval=0.05)

    def test_report_validation(self):
        with pytest.raises(ValidationError):
            MetricsReport(
                run_id="x",
                seed=0,
                car_count=1,
                decision_rounds=1,
                steps=1,
                epochs=1,
                accuracy=1.5,
                decisions=0,
                interval=1.0,
                collisions=0,
                near_misses=0,
            )

    def test_single_car_matches_the_no_comms_baseline(self):
        cfg = WorldConfig(sensor_noise_sigma=0.3, sensor_range=30.0)
        scenario = random_scenario(cfg, 1, seed=4)
        deaf = cfg.model_copy(update={"comms_radius": 1e-6})
        assert run_scenario(cfg, scenario, 80).accuracy == run_scenario(deaf, scenario, 80).accuracy

    def test_row_leaves_out_the_timeline(self, cfg):
        row = run_scenario(cfg, default_scenario(cfg), 5).to_row()
        assert "decisions_per_interval" not in row
        assert set(SWEEP_COLUMNS[1:]) <= set(row)


class TestTimeline:
    def test_counts_add_up_to_the_run(self, cfg):
        scenario = default_scenario(cfg)
        frame = decisions_timeline(cfg, scenario, 95, 1.0)
        assert list(frame.columns) == ["interval", "start", "decision_count"]
        assert len(frame) == 10
        assert frame["start"].tolist() == pytest.approx([float(i) for i in range(10)])
        report = run_scenario(cfg, scenario, 95, 1.0)
        assert int(frame["decision_count"].sum()) == report.decisions

    def test_bucket_never_exceeds_cars_times_steps(self, cfg):
        frame = decisions_timeline(cfg, default_scenario(cfg), 40, 0.5)
        assert (frame["decision_count"] <= 10 * 5).all()

    def test_stoplight_counts_vary(self, cfg):
        scenario = load_scenario(SCENARIOS / "stoplight.txt")
        frame = decisions_timeline(cfg, scenario, 300, 1.0)
        counts = frame["decision_count"]
        assert len(frame) == 30
        assert counts.nunique() > 1
        # only the three moving cars decide while the light is red
        assert counts.iloc[0] == 30
        assert counts.iloc[-1] > counts.iloc[0]


class TestSweeps:
    def test_seed_vector(self, cfg):
        assert sweep_seeds(cfg, 3) == [42, 43, 44]

    def test_decision_time_shape(self, cfg):
        frame = sweep_decision_time(cfg, default_scenario(cfg), [1, 2], [0, 1], steps=15)
        assert list(frame.columns) == SWEEP_COLUMNS
        assert frame["row"].tolist() == ["seed", "seed", "mean"] * 2
        assert frame["decision_rounds"].tolist() == [1, 1, 1, 2, 2, 2]
        seeds = frame[frame["row"] == "seed"]
        assert seeds["seed"].tolist() == [0, 1, 0, 1]
        assert frame[frame["row"] == "mean"]["seed"].isna().all()
        first = seeds[seeds["decision_rounds"] == 1]
        mean = frame.iloc[2]
        assert mean["accuracy"] == pytest.approx(first["accuracy"].mean())

    def test_car_count_shape(self, cfg):
        frame = sweep_car_count(cfg, [2, 4], [5, 6, 7], steps=10)
        assert len(frame) == 8
        assert frame["car_count"].tolist() == [2, 2, 2, 2, 4, 4, 4, 4]
        seeds = frame[frame["row"] == "seed"]
        assert (seeds["epochs"] == seeds["car_count"] * 10).all()

    @pytest.mark.parametrize("grid", [[], [4, 2]])
    def test_grid_must_be_ascending(self, cfg, grid):
        with pytest.raises(ValueError):
            sweep_decision_time(cfg, default_scenario(cfg), grid, [0], steps=5)
        with pytest.raises(ValueError):
            sweep_car_count(cfg, grid, [0], steps=5)

    def test_workers_do_not_change_results(self, cfg):
        serial = sweep_car_count(cfg, [2, 3], [0, 1], steps=10, workers=1)
        parallel = sweep_car_count(cfg, [2, 3], [0, 1], steps=10, workers=2)
        pd.testing.assert_frame_equal(serial, parallel)


class TestSpearman:
    @staticmethod
    def frame(accuracies):
        return pd.DataFrame(
            {
                "row": ["mean"] * len(accuracies),
                "decision_rounds": list(range(1, len(accuracies) + 1)),
                "accuracy": accuracies,
            }
        )

    def test_increasing(self):
        assert spearman(self.frame([0.5, 0.6, 0.9]), "decision_rounds") == pytest.approx(1.0)

    def test_decreasing(self):
        assert spearman(self.frame([0.9, 0.6, 0.5]), "decision_rounds") == pytest.approx(-1.0)

    def test_undefined(self):
        assert math.isnan(spearman(self.frame([0.7]), "decision_rounds"))
        assert math.isnan(spearman(self.frame([0.7, 0.7, 0.7]), "decision_rounds"))


class TestCsv:
    def test_bytes_are_reproducible(self, cfg, tmp_path):
        seeds = sweep_seeds(cfg, 2)
        paths = []
        for name in ("a.csv", "b.csv"):
            frame = sweep_decision_time(cfg, default_scenario(cfg), [1, 2], seeds, steps=10)
            paths.append(tmp_path / "out" / name)
            write_csv(frame, paths[-1], sweep_metadata(cfg, "decision_rounds", seeds))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_metadata_line(self, cfg, tmp_path):
        path = tmp_path / "run.csv"
        frame = pd.DataFrame([{"accuracy": 0.5, "epochs": 4}])
        write_csv(frame, path, sweep_metadata(cfg, "car_count", [1, 2]))
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("# config_hash=")
        assert lines[0].endswith("grid=car_count seeds=1,2")
        assert lines[1:] == ["accuracy,epochs", "0.500000,4"]


def _mean_accuracy(frame: pd.DataFrame) -> list[float]:
    return frame[frame["row"] == "mean"]["accuracy"].tolist()


@pytest.mark.slow
def test_more_rounds_help_under_loss():
    cfg = WorldConfig.preset("degraded")
    frame = sweep_decision_time(
        cfg, default_scenario(cfg), [1, 2, 4, 8], sweep_seeds(cfg, 10), workers=4
    )
    means = _mean_accuracy(frame)
    assert spearman(frame, "decision_rounds") > 0
    assert means[3] - means[0] >= 0.02


@pytest.mark.slow
def test_saturated_tables_plateau():
    cfg = WorldConfig.preset("degraded")
    seeds = sweep_seeds(cfg, 10)
    frame = sweep_decision_time(cfg, default_scenario(cfg), [32, 64], seeds, workers=4)
    means = _mean_accuracy(frame)
    assert means[1] == pytest.approx(means[0], abs=0.02)


@pytest.mark.slow
def test_more_cars_help_with_partial_sensing():
    cfg = WorldConfig.preset("degraded")
    frame = sweep_car_count(cfg, [2, 5, 10, 20], sweep_seeds(cfg, 10), workers=4)
    assert spearman(frame, "car_count") > 0


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_perfect_information_is_fully_accurate_acceptance(seed):
    scenario = random_scenario(PERFECT, 30, seed, span=600.0)
    assert run_seed(PERFECT, scenario, 1000, seed).accuracy == 1.0
