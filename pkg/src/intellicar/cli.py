"""CLI interface for intellicar."""

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import pandas as pd
import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel

from intellicar import __version__
from intellicar.config import (
    PRESETS,
    Settings,
    WorldConfig,
    config_hash,
    load_world_config,
)
from intellicar.errors import IntellicarError
from intellicar.harness import (
    decisions_timeline,
    default_scenario,
    run_scenario,
    spearman,
    sweep_car_count,
    sweep_decision_time,
    sweep_metadata,
    sweep_seeds,
    write_csv,
)
from intellicar.models import LightColor
from intellicar.scenario import ScenarioSpec, load_scenario
from intellicar.signals import TrafficLight, render_patch, write_ppm

app = typer.Typer(
    name="intellicar",
    help="Seeded simulator of cooperative intelligent cars",
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True)


def version_callback(value: bool) -> None:
    if value:
        console.print(f"intellicar version {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: bool = typer.Option(
        None,
        "--version",
        "-v",
        callback=version_callback,
        is_eager=True,
        help="Show version and exit",
    ),
) -> None:
    """intellicar - V2V collision-avoidance simulator and experiment harness."""


def _setup(env_file: Path | None) -> Settings:
    settings = Settings.from_env(env_file)
    logging.basicConfig(
        level=logging.DEBUG if settings.debug else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )
    return settings


@contextmanager
def _input_errors() -> Iterator[None]:
    """Report input errors as one red line and exit 1."""
    try:
        yield
    except (IntellicarError, ValueError) as e:
        err_console.print(f"Error: {e}", style="red", markup=False, highlight=False)
        raise typer.Exit(1) from None


def _world_config(config: Path | None, preset: str) -> WorldConfig:
    if config is not None:
        return load_world_config(config)
    return WorldConfig.preset(preset)


def _scenario(path: Path | None, cfg: WorldConfig) -> tuple[ScenarioSpec, str]:
    if path is None:
        return default_scenario(cfg), "generated"
    return load_scenario(path), path.name


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise typer.BadParameter(f"expected comma-separated integers, got '{text}'") from None


CONFIG_OPTION = typer.Option(None, "--config", "-c", help="Key=value world config file")
PRESET_OPTION = typer.Option(
    "default", "--preset", "-p", help=f"Named preset ({', '.join(PRESETS)}) when no --config"
)
SCENARIO_OPTION = typer.Option(
    None, "--scenario", "-s", help="Scenario file (default: generated single-lane platoon)"
)
OUT_OPTION = typer.Option(None, "--out", "-o", help="Output CSV path")
ENV_OPTION = typer.Option(None, "--env", "-e", help="Path to .env file for settings")


@app.command()
def run(
    config: Path | None = CONFIG_OPTION,
    preset: str = PRESET_OPTION,
    scenario: Path | None = SCENARIO_OPTION,
    steps: int = typer.Option(1000, "--steps", "-n", min=0, help="Steps to simulate"),
    interval: float = typer.Option(1.0, "--interval", help="Timeline bucket in seconds"),
    out: Path | None = OUT_OPTION,
    env_file: Path | None = ENV_OPTION,
) -> None:
    """Run one scored simulation and write its metrics row."""
    settings = _setup(env_file)
    with _input_errors():
        cfg = _world_config(config, preset)
        spec, name = _scenario(scenario, cfg)
        report = run_scenario(cfg, spec, steps, interval, run_id=name)
        out = out or settings.output_dir / "run.csv"
        write_csv(
            pd.DataFrame([report.to_row()]),
            out,
            {"config_hash": config_hash(cfg), "scenario": name},
        )

    console.print(
        Panel(
            f"Cars: {report.car_count}   Steps: {report.steps}\n"
            f"Accuracy: {report.accuracy:.4f} over {report.epochs} epochs\n"
            f"Decisions: {report.decisions}   Collisions: {report.collisions}   "
            f"Near misses: {report.near_misses}\n\n"
            f"Written: {out}",
            title="Run complete",
        )
    )


@app.command("sweep-rounds")
def sweep_rounds(
    rounds: str = typer.Option("1,2,4,8", "--rounds", help="Comms rounds per step, ascending"),
    seeds: int | None = typer.Option(None, "--seeds", min=1, help="Seeds per grid point"),
    steps: int = typer.Option(200, "--steps", "-n", min=1, help="Steps per run"),
    config: Path | None = CONFIG_OPTION,
    preset: str = PRESET_OPTION,
    scenario: Path | None = SCENARIO_OPTION,
    workers: int | None = typer.Option(None, "--workers", "-w", min=1, help="Parallel runs"),
    out: Path | None = OUT_OPTION,
    env_file: Path | None = ENV_OPTION,
) -> None:
    """Accuracy versus decision time (comms rounds per step) on paired seeds."""
    settings = _setup(env_file)
    grid = _int_list(rounds)
    with _input_errors():
        cfg = _world_config(config, preset)
        spec, _ = _scenario(scenario, cfg)
        seed_vector = sweep_seeds(cfg, seeds or settings.seeds)
        frame = sweep_decision_time(
            cfg, spec, grid, seed_vector, steps, workers or settings.workers
        )
        out = out or settings.output_dir / "sweep_rounds.csv"
        write_csv(frame, out, sweep_metadata(cfg, "decision_rounds", seed_vector))

    rho = spearman(frame, "decision_rounds")
    console.print(f"[green]Wrote {out}[/green]  spearman(rounds, accuracy) = {rho:.3f}")


@app.command("sweep-cars")
def sweep_cars(
    counts: str = typer.Option("2,5,10,20", "--counts", help="Car counts, ascending"),
    seeds: int | None = typer.Option(None, "--seeds", min=1, help="Seeds per grid point"),
    steps: int = typer.Option(200, "--steps", "-n", min=1, help="Steps per run"),
    config: Path | None = CONFIG_OPTION,
    preset: str = PRESET_OPTION,
    workers: int | None = typer.Option(None, "--workers", "-w", min=1, help="Parallel runs"),
    out: Path | None = OUT_OPTION,
    env_file: Path | None = ENV_OPTION,
) -> None:
    """Accuracy versus number of cars; every seed generates its own placement."""
    settings = _setup(env_file)
    grid = _int_list(counts)
    with _input_errors():
        cfg = _world_config(config, preset)
        seed_vector = sweep_seeds(cfg, seeds or settings.seeds)
        frame = sweep_car_count(cfg, grid, seed_vector, steps, workers or settings.workers)
        out = out or settings.output_dir / "sweep_cars.csv"
        write_csv(frame, out, sweep_metadata(cfg, "car_count", seed_vector))

    rho = spearman(frame, "car_count")
    console.print(f"[green]Wrote {out}[/green]  spearman(cars, accuracy) = {rho:.3f}")


@app.command()
def timeline(
    interval: float = typer.Option(1.0, "--interval", help="Bucket width in seconds"),
    steps: int = typer.Option(300, "--steps", "-n", min=0, help="Steps to simulate"),
    config: Path | None = CONFIG_OPTION,
    preset: str = PRESET_OPTION,
    scenario: Path | None = SCENARIO_OPTION,
    out: Path | None = OUT_OPTION,
    env_file: Path | None = ENV_OPTION,
) -> None:
    """Non-Hold decisions per time interval."""
    settings = _setup(env_file)
    with _input_errors():
        cfg = _world_config(config, preset)
        spec, name = _scenario(scenario, cfg)
        frame = decisions_timeline(cfg, spec, steps, interval)
        out = out or settings.output_dir / "timeline.csv"
        write_csv(
            frame,
            out,
            {"config_hash": config_hash(cfg), "scenario": name, "interval": interval},
        )

    total = int(frame["decision_count"].sum())
    console.print(f"[green]Wrote {out}[/green]  {len(frame)} intervals, {total} decisions")


@app.command()
def patch(
    phase: LightColor = typer.Option(LightColor.RED, "--phase", help="Lit lamp"),
    sigma: float = typer.Option(0.0, "--sigma", min=0.0, help="Noise std (fraction of 255)"),
    seed: int = typer.Option(0, "--seed", min=0, help="Noise seed"),
    out: Path = typer.Option(Path("patch.ppm"), "--out", "-o", help="Output PPM path"),
) -> None:
    """Render one traffic-light camera patch as a binary PPM."""
    with _input_errors():
        light = TrafficLight(0, 0, 0.0, phase, 1.0, (1.0, 1.0, 1.0))
        write_ppm(out, render_patch(light, sigma, seed))
    console.print(f"[green]Wrote {phase.value} patch: {out}[/green]")


@app.command()
def init(
    output: Path = typer.Option(
        Path("world.env"),
        "--output",
        "-o",
        help="Output path for the example world config",
    ),
    preset: str = PRESET_OPTION,
) -> None:
    """Generate an example key=value world configuration file."""
    with _input_errors():
        cfg = WorldConfig.preset(preset)
    content = (
        "# intellicar world configuration\n"
        "# Pass with --config; missing keys take their defaults.\n"
        "# Harness settings come from the environment (or .env):\n"
        "#   INTELLICAR_SEEDS, INTELLICAR_WORKERS, INTELLICAR_OUTPUT_DIR, INTELLICAR_DEBUG\n\n"
    ) + cfg.to_file_text()

    output.write_text(content, encoding="utf-8")
    console.print(f"[green]Created example config: {output}[/green]")
    console.print("\nTo use:")
    console.print(f"  intellicar run --config {output} --steps 500")


if __name__ == "__main__":
    app()
