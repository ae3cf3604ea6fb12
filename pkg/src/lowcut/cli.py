"""Command-line entry point.

Subcommands: ``run`` (execute a JSON experiment config), ``demo`` (run a
shipped desk-scale experiment), ``list`` (show built-in names).  All
randomness flows from the config's master seed (or ``--seed``); nothing is
seeded from the clock.  Diagnostics go to standard error, controlled by the
``LOWCUT_LOG`` environment variable (error / info / debug); data files never
do.

Exit codes: 0 success, 2 invalid config or arguments, 3 oracle degeneracy
refusal.
"""

from __future__ import annotations

import logging
import os
import sys
from pathlib import Path

import click

from .experiments import (
    ConfigError,
    DegenerateOracleError,
    config_from_dict,
    load_config,
    run_experiment,
    write_records,
    write_summary,
)

log = logging.getLogger("lowcut")

DEMOS = {
    "convergence-1d": {
        "experiment": "convergence",
        "id": "convergence-1d",
        "density": "thm2",
        "estimator": "bucketing",
        "schedule": "cbrt",
        "sample_sizes": [1000, 10000, 100000],
        "trials": 100,
        "epsilon": 0.05,
        "distances": ["dE", "df"],
        "seed": 1,
    },
    "convergence-nd": {
        "experiment": "convergence",
        "id": "convergence-nd",
        "density": {
            "kind": "gmm",
            "d": 2,
            "components": [
                {"w": 0.5, "mean": [2.0, 0.0], "cov": [[1.0, 0.0], [0.0, 1.0]]},
                {"w": 0.5, "mean": [-2.0, 0.0], "cov": [[1.0, 0.0], [0.0, 1.0]]},
            ],
        },
        "estimator": "soft",
        "schedule": "cbrt",
        "sample_sizes": [100, 1000, 10000, 30000],
        "trials": 20,
        "epsilon": 0.05,
        "grid_size": 360,
        "oracle_grid_size": 3600,
        "seed": 2,
    },
    "failure": {
        "experiment": "failure",
        "id": "failure",
        "sample_sizes": [2000],
        "schedules": ["identity", "cbrt"],
        "trials": 200,
        "seed": 1,
    },
    "coupon": {
        "experiment": "coupon",
        "id": "coupon",
        "n": 10000,
        "c_values": [-1.0, 0.0, 1.0, 2.0],
        "trials": 2000,
        "seed": 1,
    },
    "gaps": {
        "experiment": "gaps",
        "id": "gaps",
        "m": 100000,
        "epsilons": [0.3, 0.1],
        "trials": 500,
        "seed": 1,
    },
    "lowerbound": {
        "experiment": "lowerbound",
        "id": "lowerbound",
        "n": 1000,
        "m": 100,
        "estimators": ["bucketing", "hard1d"],
        "trials": 2000,
        "seed": 1,
    },
}


def _setup_logging() -> None:
    level = os.environ.get("LOWCUT_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(
        stream=sys.stderr,
        level=levels.get(level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _execute(config, out_dir: str, seed: int | None, parallel: int, force: bool) -> None:
    if seed is not None:
        config.seed = seed
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = config.output or config.id
    csv_path = out / f"{base}.csv"
    summary_path = out / f"{base}.summary.json"
    if csv_path.exists() and not force:
        raise click.ClickException(
            f"refusing to overwrite {csv_path}; pass --force to allow"
        )
    log.info("running %s (seed %d, %d workers)", config.id, config.seed, parallel)
    try:
        result = run_experiment(config, workers=parallel)
    except DegenerateOracleError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    write_records(csv_path, result.records)
    write_summary(summary_path, result.summary)
    click.echo(str(csv_path))
    click.echo(str(summary_path))


def _config_fail(exc: ConfigError) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


@click.group()
def cli() -> None:
    """Low-density cut experiments."""
    _setup_logging()


@cli.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default="results", show_default=True)
@click.option("--seed", type=int, default=None, help="Override the config's master seed.")
@click.option("--parallel", type=int, default=1, show_default=True)
@click.option("--force", is_flag=True, help="Overwrite existing record files.")
def cmd_run(config_path, out_dir, seed, parallel, force) -> None:
    """Run the experiment described by a JSON config file."""
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        _config_fail(exc)
    _execute(config, out_dir, seed, parallel, force)


@cli.command("demo")
@click.argument("name")
@click.option("--out", "out_dir", default="results", show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--parallel", type=int, default=1, show_default=True)
@click.option("--force", is_flag=True)
def cmd_demo(name, out_dir, seed, parallel, force) -> None:
    """Run a shipped desk-scale experiment by name."""
    if name not in DEMOS:
        click.echo(
            f"error: unknown demo {name!r}; valid names: {', '.join(sorted(DEMOS))}",
            err=True,
        )
        sys.exit(2)
    config = config_from_dict(DEMOS[name], source=f"<demo:{name}>")
    _execute(config, out_dir, seed, parallel, force)


@cli.command("list")
def cmd_list() -> None:
    """List built-in demos, density builders, estimators, and schedules."""
    from .densities import builder_names
    from .estimators import ESTIMATOR_NAMES

    click.echo("demos: " + ", ".join(sorted(DEMOS)))
    click.echo("densities: " + ", ".join(builder_names()))
    click.echo("estimators: " + ", ".join(ESTIMATOR_NAMES))
    click.echo("schedules: cbrt, identity, custom:<expr>")
    click.echo("distances: dE, df, dmu")


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
