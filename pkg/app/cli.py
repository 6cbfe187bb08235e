"""
CLI interface for the opportunistic scheduler toolkit.
Runs optimization, sweep, simulation, violation-boundary, buffer-search and finite-K
experiments from a JSON config and writes the result tables.
"""

import json
from typing import List, Optional

import click
from pydantic import ValidationError

from app.logging_config import get_logger, setup_logging
from app.repositories.results_repository import ResultsRepository
from app.schemas.experiment import ExperimentConfig
from app.services.experiment_service import ConfigurationError, ExperimentService

logger = get_logger(__name__)

CONFIG_ERROR = 2
SWEEP_AXES = ("N", "B", "epsilon", "beta2", "zeta2", "nu_d")


def parse_list(text: str, kind=float) -> List:
    try:
        return [kind(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise click.BadParameter(f"expected a comma-separated list, got {text!r}") from e


def load_config(
    path: Optional[str],
    out: Optional[str],
    seeds: Optional[str],
    slots: Optional[int],
    axis: Optional[str] = None,
    values: Optional[str] = None,
) -> ExperimentConfig:
    """Read the config file (defaults when none is given) and apply command-line overrides."""
    data = {}
    if path is not None:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    if out is not None:
        data["output_dir"] = out
    if seeds is not None:
        data["seeds"] = parse_list(seeds, int)
    if slots is not None:
        data["slots"] = slots
    if axis is not None or values is not None:
        sweep = dict(data.get("sweep") or {})
        if axis is not None:
            sweep["axis"] = axis
        if values is not None:
            sweep["values"] = parse_list(values)
        data["sweep"] = sweep
    return ExperimentConfig.model_validate(data)


EXPERIMENT_OPTIONS = (
    click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="Experiment config (JSON)"),
    click.option("--out", type=click.Path(file_okay=False), help="Output directory (overrides the config)"),
    click.option("--seeds", help="Comma-separated RNG seeds (overrides the config)"),
    click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes"),
)


def experiment_options(func):
    for option in reversed(EXPERIMENT_OPTIONS):
        func = option(func)
    return func


def run_command(
    command: str,
    config_path: Optional[str],
    out: Optional[str],
    seeds: Optional[str],
    jobs: int,
    slots: Optional[int] = None,
    axis: Optional[str] = None,
    values: Optional[str] = None,
) -> None:
    ctx = click.get_current_context()
    try:
        config = load_config(config_path, out, seeds, slots, axis, values)
        service = ExperimentService(config)
        service.check(command)
    except (ValidationError, ConfigurationError, json.JSONDecodeError, click.BadParameter) as e:
        if isinstance(e, ValidationError):
            message = f"{e.error_count()} error(s), first: {e.errors()[0]['msg']}"
        else:
            message = str(e)
        logger.error(f"{command}: invalid configuration: {message}")
        click.echo(f"Error: invalid configuration: {message}", err=True)
        ctx.exit(CONFIG_ERROR)

    outcomes = service.run(command, jobs=jobs)
    repository = ResultsRepository(config.output_dir)
    rows = [row for outcome in outcomes for row in outcome.rows]
    repository.save_results(rows)
    repository.save_summary(service.summarize(outcomes))
    repository.save_finite_k([user for outcome in outcomes for user in outcome.finite_k_rows])
    repository.save_config(config)

    for outcome in outcomes:
        for note in outcome.notes:
            click.echo(note)
    feasible = sum(row.feasible for row in rows)
    click.echo(f"{command}: {len(rows)} rows ({feasible} feasible) written to {config.output_dir}")


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Logging level (defaults to LOG_LEVEL)",
)
def cli(log_level: Optional[str]):
    """Opportunistic scheduler CLI - optimize, simulate and sweep scheduling policies"""
    setup_logging(level=log_level)


@cli.command()
@experiment_options
def optimize(config_path, out, seeds, jobs):
    """Anneal the energy-optimal policy at the configured design point"""
    run_command("optimize", config_path, out, seeds, jobs)


@cli.command()
@experiment_options
@click.option("--axis", type=click.Choice(SWEEP_AXES), help="Sweep axis (overrides the config)")
@click.option("--values", help="Comma-separated sweep values (overrides the config)")
def sweep(config_path, out, seeds, jobs, axis, values):
    """Anneal at every sweep value and seed"""
    run_command("sweep", config_path, out, seeds, jobs, axis=axis, values=values)


@cli.command()
@experiment_options
@click.option("--slots", type=click.IntRange(min=1), help="Simulated slots (overrides the config)")
def simulate(config_path, out, seeds, jobs, slots):
    """Simulate the configured (or annealed) policy packet by packet"""
    run_command("simulate", config_path, out, seeds, jobs, slots=slots)


@cli.command(name="gamma-max")
@experiment_options
def gamma_max(config_path, out, seeds, jobs):
    """Violation probability of the unconstrained optimum"""
    run_command("gamma-max", config_path, out, seeds, jobs)


@cli.command(name="buffer-search")
@experiment_options
def buffer_search(config_path, out, seeds, jobs):
    """Smallest buffer reaching the configured energy gain"""
    run_command("buffer-search", config_path, out, seeds, jobs)


@cli.command(name="finite-k")
@experiment_options
def finite_k(config_path, out, seeds, jobs):
    """Per-user SIC energies, exact and approximate"""
    run_command("finite-k", config_path, out, seeds, jobs)


if __name__ == "__main__":
    cli()
