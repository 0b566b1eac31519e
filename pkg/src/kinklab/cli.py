"""Command-line entry point."""

from __future__ import annotations

import sys

import click

from . import config as C
from .harness import run as run_scenario
from .harness import sweep as run_sweep


def _load(path, out, seed):
    cfg = C.load(path)
    over = {}
    if out is not None:
        over["out"] = out
    if seed is not None:
        over["seed"] = seed
    return (cfg.replace(**over) if over else cfg).validate()


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Moving-kink experiments: runs, sweeps and identity checks."""


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--seed", type=int, default=None, help="RNG seed override.")
def run(config_path, out, seed):
    """Run the scenario described by CONFIG_PATH."""
    try:
        cfg = _load(config_path, out, seed)
    except C.ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    status, man = run_scenario(cfg)
    for name, ok in man.checks.items():
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name}")
    if man.failed_stage:
        click.echo(f"failed stage: {man.failed_stage}: {man.error}", err=True)
    click.echo(f"artifacts in {cfg.out} ({man.wall_time:.1f} s)")
    sys.exit(status)


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("grid_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--seed", type=int, default=None, help="RNG seed override.")
@click.option("--threads", type=int, default=1, show_default=True, help="Worker processes.")
def sweep(config_path, grid_path, out, seed, threads):
    """Run CONFIG_PATH over the parameter grid in GRID_PATH."""
    try:
        cfg = _load(config_path, out, seed)
        spec = C.load_sweep(grid_path)
    except C.ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    status, summary = run_sweep(cfg, spec, cfg.out, threads=max(1, threads))
    click.echo(f"{summary['runs']} runs, {summary['failed']} failed")
    if "observed_orders" in summary:
        click.echo("observed orders: " + ", ".join(f"{p:.3f}" for p in summary["observed_orders"]))
    sys.exit(status)


@main.command()
@click.option("--out", type=click.Path(file_okay=False), default="runs/verify", show_default=True,
              help="Output directory.")
def verify(out):
    """Run the identity oracles only."""
    cfg = C.ExperimentConfig(scenario="verify-identities", out=out)
    status, man = run_scenario(cfg)
    for name, ok in man.checks.items():
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name}")
    sys.exit(status)


if __name__ == "__main__":
    main()
