"""Experiment harness: scored runs, paired-seed sweeps and decision timelines."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from multiprocessing import Pool
from pathlib import Path
from typing import Any

import pandas as pd
import scipy.stats as st
from pydantic import BaseModel, Field

from intellicar.config import WorldConfig, config_hash
from intellicar.scenario import ScenarioSpec, random_scenario
from intellicar.world import World

logger = logging.getLogger(__name__)

# Generated sweep scenarios place every car in the first SWEEP_SPAN meters of one lane.
SWEEP_SPAN = 240.0
SWEEP_STEPS = 200
SWEEP_CAR_COUNT = 10

SWEEP_COLUMNS = [
    "row",
    "seed",
    "decision_rounds",
    "car_count",
    "accuracy",
    "epochs",
    "decisions",
    "collisions",
    "near_misses",
]


class MetricsReport(BaseModel):
    """Outcome of one scored run."""

    run_id: str = Field(description="Free-form run label")
    seed: int = Field(description="rng_seed the run used")
    car_count: int = Field(ge=0)
    decision_rounds: int = Field(ge=1)
    steps: int = Field(ge=0)
    epochs: int = Field(ge=0, description="Scored decision epochs, one per car per step")
    accuracy: float = Field(
        ge=0.0, le=1.0, description="Onboard/oracle agreements over epochs; 1.0 when epochs is 0"
    )
    decisions: int = Field(ge=0, description="Non-Hold decisions taken")
    interval: float = Field(gt=0, description="Timeline bucket width in seconds")
    decisions_per_interval: list[tuple[int, int]] = Field(default_factory=list)
    collisions: int = Field(ge=0)
    near_misses: int = Field(ge=0)

    def to_row(self) -> dict[str, Any]:
        return self.model_dump(exclude={"decisions_per_interval"})


def _steps_per_interval(config: WorldConfig, interval: float) -> int:
    if interval < config.time_step:
        raise ValueError("interval must be >= time_step")
    return max(1, round(interval / config.time_step))


def run_scenario(
    config: WorldConfig,
    scenario: ScenarioSpec,
    steps: int,
    interval: float = 1.0,
    run_id: str = "run",
) -> MetricsReport:
    """Drive the world for ``steps`` steps, scoring every decision against the oracle."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    per_bucket = _steps_per_interval(config, interval)
    world = World(config, scenario, driver="onboard", score=True)

    epochs = agreements = collisions = near_misses = 0
    buckets = [0] * math.ceil(steps / per_bucket)
    for _ in range(steps):
        report = world.step()
        oracle = report.oracle_decisions or {}
        for car_id, decision in report.decisions.items():
            epochs += 1
            agreements += decision is oracle[car_id]
        buckets[report.step_index // per_bucket] += report.active_decisions
        collisions += len(report.collisions)
        near_misses += report.near_misses

    result = MetricsReport(
        run_id=run_id,
        seed=config.rng_seed,
        car_count=len(scenario.cars),
        decision_rounds=config.decision_rounds,
        steps=steps,
        epochs=epochs,
        accuracy=agreements / epochs if epochs else 1.0,
        decisions=sum(buckets),
        interval=interval,
        decisions_per_interval=list(enumerate(buckets)),
        collisions=collisions,
        near_misses=near_misses,
    )
    logger.debug(
        "%s seed=%d rounds=%d cars=%d accuracy=%.4f",
        run_id,
        result.seed,
        result.decision_rounds,
        result.car_count,
        result.accuracy,
    )
    return result


def run_seed(
    config: WorldConfig,
    scenario: ScenarioSpec,
    steps: int,
    seed: int,
    interval: float = 1.0,
) -> MetricsReport:
    """``run_scenario`` with ``rng_seed`` replaced by ``seed``."""
    seeded = config.model_copy(update={"rng_seed": seed})
    return run_scenario(seeded, scenario, steps, interval, run_id=f"seed-{seed}")


def _count_run(config: WorldConfig, count: int, steps: int, seed: int) -> MetricsReport:
    scenario = random_scenario(config, count, seed, span=SWEEP_SPAN, lanes=1)
    return run_seed(config, scenario, steps, seed)


def sweep_seeds(config: WorldConfig, count: int) -> list[int]:
    """Seed vector shared by every grid point of a sweep."""
    return [config.rng_seed + i for i in range(count)]


def default_scenario(config: WorldConfig, car_count: int = SWEEP_CAR_COUNT) -> ScenarioSpec:
    return random_scenario(config, car_count, config.rng_seed, span=SWEEP_SPAN, lanes=1)


def _run_jobs(func: Any, jobs: list[tuple[Any, ...]], workers: int) -> list[MetricsReport]:
    if workers > 1 and len(jobs) > 1:
        with Pool(workers) as pool:
            return list(pool.starmap(func, jobs))
    return [func(*job) for job in jobs]


def _sweep_frame(grid: list[tuple[int, list[MetricsReport]]], key: str) -> pd.DataFrame:
    rows: list[dict[str, Any]] = []
    for _, reports in grid:
        seed_rows = [
            {"row": "seed", **{col: r.to_row()[col] for col in SWEEP_COLUMNS[1:]}}
            for r in reports
        ]
        rows.extend(seed_rows)
        frame = pd.DataFrame(seed_rows)
        mean = {"row": "mean", "seed": None}
        for col in SWEEP_COLUMNS[2:]:
            mean[col] = frame[col].iloc[0] if col == key else float(frame[col].mean())
        rows.append(mean)
    frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    frame["seed"] = frame["seed"].astype("Int64")
    return frame


def sweep_decision_time(
    config: WorldConfig,
    scenario: ScenarioSpec,
    rounds_list: Sequence[int],
    seeds: Sequence[int],
    steps: int = SWEEP_STEPS,
    workers: int = 1,
) -> pd.DataFrame:
    """Accuracy per ``decision_rounds`` value, every value run on the same seeds."""
    if not rounds_list:
        raise ValueError("rounds_list must not be empty")
    if list(rounds_list) != sorted(rounds_list):
        raise ValueError("rounds_list must be ascending")
    jobs = [
        (config.model_copy(update={"decision_rounds": rounds}), scenario, steps, seed)
        for rounds in rounds_list
        for seed in seeds
    ]
    reports = _run_jobs(run_seed, jobs, workers)
    grid = []
    for i, rounds in enumerate(rounds_list):
        chunk = reports[i * len(seeds) : (i + 1) * len(seeds)]
        logger.info(
            "rounds=%d mean accuracy %.4f", rounds, sum(r.accuracy for r in chunk) / len(chunk)
        )
        grid.append((rounds, chunk))
    return _sweep_frame(grid, "decision_rounds")


def sweep_car_count(
    config: WorldConfig,
    counts_list: Sequence[int],
    seeds: Sequence[int],
    steps: int = SWEEP_STEPS,
    workers: int = 1,
) -> pd.DataFrame:
    """Accuracy per car count; each seed generates its own placement."""
    if not counts_list:
        raise ValueError("counts_list must not be empty")
    if list(counts_list) != sorted(counts_list):
        raise ValueError("counts_list must be ascending")
    jobs = [(config, count, steps, seed) for count in counts_list for seed in seeds]
    reports = _run_jobs(_count_run, jobs, workers)
    grid = []
    for i, count in enumerate(counts_list):
        chunk = reports[i * len(seeds) : (i + 1) * len(seeds)]
        logger.info(
            "cars=%d mean accuracy %.4f", count, sum(r.accuracy for r in chunk) / len(chunk)
        )
        grid.append((count, chunk))
    return _sweep_frame(grid, "car_count")


def decisions_timeline(
    config: WorldConfig,
    scenario: ScenarioSpec,
    steps: int,
    interval: float,
) -> pd.DataFrame:
    """Non-Hold decisions bucketed by ``interval`` seconds of simulated time."""
    report = run_scenario(config, scenario, steps, interval, run_id="timeline")
    per_bucket = _steps_per_interval(config, interval)
    return pd.DataFrame(
        [
            {
                "interval": index,
                "start": index * per_bucket * config.time_step,
                "decision_count": count,
            }
            for index, count in report.decisions_per_interval
        ],
        columns=["interval", "start", "decision_count"],
    )


def spearman(frame: pd.DataFrame, key: str) -> float:
    """Rank correlation of ``key`` against mean accuracy over the mean rows of a sweep."""
    means = frame[frame["row"] == "mean"]
    if len(means) < 2 or means["accuracy"].nunique() < 2:
        return math.nan
    rho, _ = st.spearmanr(means[key], means["accuracy"])
    return float(rho)


def write_csv(frame: pd.DataFrame, path: Path, metadata: dict[str, Any]) -> None:
    """Write ``frame`` preceded by one ``#`` metadata line."""
    path.parent.mkdir(parents=True, exist_ok=True)
    header = "# " + " ".join(f"{key}={value}" for key, value in metadata.items())
    body = frame.to_csv(index=False, float_format="%.6f", lineterminator="\n")
    path.write_text(header + "\n" + body, encoding="utf-8")


def sweep_metadata(config: WorldConfig, grid: str, seeds: Sequence[int]) -> dict[str, Any]:
    return {
        "config_hash": config_hash(config),
        "grid": grid,
        "seeds": ",".join(str(seed) for seed in seeds),
    }


__all__ = [
    "MetricsReport",
    "decisions_timeline",
    "default_scenario",
    "run_scenario",
    "run_seed",
    "spearman",
    "sweep_car_count",
    "sweep_decision_time",
    "sweep_metadata",
    "sweep_seeds",
    "write_csv",
]
