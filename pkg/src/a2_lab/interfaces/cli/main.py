# Author: Green Mountain Systems AI Inc.

"""CLI interface for the Matrix A2 Lab.

Provides commands for:
- Running a named experiment and writing its results
- Listing the available experiments
- Printing the Hilbert kernel constants
- Dumping the leaf values of a materialized weight
"""

import logging
from pathlib import Path
from typing import Any, Optional

# Load .env file before any other imports that might need env vars
from dotenv import find_dotenv, load_dotenv

load_dotenv(find_dotenv(usecwd=True))

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from ...config import get_settings, load_run_file
from ...errors import DomainError
from ...models.core import ExperimentName, SeedConvention
from ...models.experiment import ExperimentResult, ExperimentSpec

app = typer.Typer(
    name="a2-lab",
    help="Matrix A2 Lab CLI - Build the counterexample weight and measure its operators",
)
console = Console()

EXIT_CHECKS_FAILED = 1
EXIT_USAGE = 2


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def _usage_error(message: str) -> typer.Exit:
    console.print(f"[red]Usage error:[/red] {message}")
    return typer.Exit(code=EXIT_USAGE)


def build_spec(config: Optional[Path], overrides: dict[str, Any]) -> ExperimentSpec:
    """Merge settings defaults, the run file and command-line flags.

    Flags that were not given are None and leave the run file value in place.

    Raises:
        ValueError: On a malformed run file or a missing experiment name
        ValidationError: On values ExperimentSpec rejects
    """
    settings = get_settings()
    values: dict[str, Any] = {"seed": settings.seed, "out": settings.out_dir}
    if config is not None:
        values.update(load_run_file(config))
    values.update({key: value for key, value in overrides.items() if value is not None})
    if "experiment" not in values:
        raise ValueError("no experiment given (use --experiment or an 'experiment' key)")
    return ExperimentSpec(**values)


def _checks_table(result: ExperimentResult) -> Table:
    table = Table(title=f"Acceptance checks: {result.experiment.value}")
    table.add_column("Check")
    table.add_column("Result")
    for name, ok in result.checks.items():
        table.add_row(name, "[green]pass[/green]" if ok else "[red]FAIL[/red]")
    return table


def _fits_table(result: ExperimentResult) -> Table:
    table = Table(title="Exponent fits")
    table.add_column("Quantity")
    table.add_column("Slope", justify="right")
    table.add_column("95% interval", justify="right")
    table.add_column("Points", justify="right")
    for name, fit in result.fits.items():
        table.add_row(
            name,
            f"{fit['slope']:.4f}",
            f"[{fit['ci_low']:.4f}, {fit['ci_high']:.4f}]",
            str(fit["points"]),
        )
    return table


@app.command()
def run(
    experiment: Optional[ExperimentName] = typer.Option(
        None, "--experiment", "-e", help="Experiment to run"
    ),
    q_grid: Optional[str] = typer.Option(None, "--q-grid", help="Comma separated Q values"),
    delta0: Optional[float] = typer.Option(None, "--delta0", help="Initial rotation parameter"),
    nmax: Optional[int] = typer.Option(None, "--nmax", help="Number of stopping generations"),
    witness: Optional[str] = typer.Option(None, "--witness", help="Witness vector: a0 or a0+b0"),
    evaluator: Optional[str] = typer.Option(
        None, "--evaluator", help="brute or frame-recursion"
    ),
    frequencies: Optional[str] = typer.Option(
        None, "--frequencies", help="Comma separated frequency vector"
    ),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Output directory"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Agreement tolerance"),
    depth: Optional[int] = typer.Option(None, "--depth", help="Working depth"),
    rounds: Optional[int] = typer.Option(None, "--rounds", help="Remodel repair rounds"),
    rotate: Optional[bool] = typer.Option(
        None, "--rotate/--no-rotate", help="Enable the generation rotations"
    ),
    convention: Optional[str] = typer.Option(
        None, "--convention", help="Seed convention: symmetric or alpha0-fixed"
    ),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Run file"),
    store: Optional[str] = typer.Option(None, "--store", help="filesystem or memory"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Logging level"),
) -> None:
    """Run one experiment and write results.csv, summary.json and plotdata.csv."""
    from ...engines.experiments import run as run_experiment
    from ...storage import get_result_store

    settings = get_settings()
    _configure_logging(log_level or settings.log_level)

    overrides = {
        "experiment": experiment,
        "q_grid": q_grid,
        "delta0": delta0,
        "nmax": nmax,
        "witness": witness,
        "evaluator": evaluator,
        "frequencies": frequencies,
        "out": out,
        "seed": seed,
        "tol": tol,
        "depth": depth,
        "rounds": rounds,
        "rotate": rotate,
        "convention": convention,
    }
    try:
        spec = build_spec(config, overrides)
        result_store = get_result_store(store, spec.out)
    except (ValidationError, ValueError, OSError) as exc:
        raise _usage_error(str(exc)) from exc

    console.print(Panel(f"Running {spec.experiment.value}...", title="Matrix A2 Lab"))
    result = run_experiment(spec)
    written = result_store.save_result(result)

    console.print(_checks_table(result))
    if result.fits:
        console.print(_fits_table(result))
    for error in result.errors():
        console.print(f"[yellow]row error:[/yellow] {error}")
    console.print(f"[green]✓[/green] Wrote {', '.join(written)} to {spec.out}")
    console.print(f"Runtime: {result.runtime_s:.2f}s")

    if not result.passed:
        console.print(f"[red]Failed checks:[/red] {', '.join(result.failed_checks())}")
        raise typer.Exit(code=EXIT_CHECKS_FAILED)


@app.command()
def experiments() -> None:
    """List the available experiments."""
    from ...engines.experiments import DEFAULT_Q_GRIDS, EXPERIMENTS

    table = Table(title="Experiments")
    table.add_column("Name")
    table.add_column("Default Q grid")
    table.add_column("Description")
    for name, runner in EXPERIMENTS.items():
        doc = (runner.__doc__ or "").strip().splitlines()
        table.add_row(
            name.value,
            ", ".join(f"{q:g}" for q in DEFAULT_Q_GRIDS[name]),
            doc[0] if doc else "",
        )
    console.print(table)


@app.command()
def constants(
    terms: Optional[int] = typer.Option(None, "--terms", help="Circle pairing truncation"),
) -> None:
    """Print the Hilbert kernel constants c0, c1 and c2."""
    from ...engines.hilbert_kernels import compute_constants

    settings = get_settings()
    try:
        result = compute_constants(terms=terms or settings.circle_terms)
    except ValueError as exc:
        raise _usage_error(str(exc)) from exc

    table = Table(title="Hilbert kernel constants")
    table.add_column("Constant")
    table.add_column("Value", justify="right")
    table.add_column("Error", justify="right")
    table.add_row("c0", f"{result.c0:.12f}", "")
    table.add_row("c1", f"{result.c1:.12f}", f"{result.c1_error:.2e}")
    table.add_row("c2", f"{result.c2:.12f}", f"{result.c2_error:.2e}")
    console.print(table)


@app.command()
def dump(
    q: float = typer.Option(..., "--q", help="Target dyadic A2 characteristic Q"),
    delta0: Optional[float] = typer.Option(None, "--delta0", help="Initial rotation parameter"),
    nmax: Optional[int] = typer.Option(None, "--nmax", help="Number of stopping generations"),
    rotate: bool = typer.Option(True, "--rotate/--no-rotate", help="Enable the generation rotations"),
    convention: SeedConvention = typer.Option(
        SeedConvention.SYMMETRIC, "--convention", help="Seed convention"
    ),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Output directory"),
    store: Optional[str] = typer.Option(None, "--store", help="filesystem or memory"),
) -> None:
    """Write the leaf values of W and W^-1 as weight.csv and inverse_weight.csv."""
    from ...engines.weight_forge import build_weight
    from ...models.construction import ConstructionParams
    from ...storage import get_result_store

    settings = get_settings()
    _configure_logging(settings.log_level)
    out_dir = out or settings.out_dir
    try:
        params = ConstructionParams(
            Q=q,
            delta0=delta0 if delta0 is not None else settings.default_delta0(q),
            q=settings.q,
            n_max=nmax if nmax is not None else settings.default_nmax(q),
            convention=convention,
            rotate=rotate,
        )
        w, v = build_weight(params).materialize()
        result_store = get_result_store(store, out_dir)
    except (ValidationError, DomainError, ValueError, OSError) as exc:
        raise _usage_error(str(exc)) from exc

    written = result_store.save_weight(w, v)
    console.print(f"[green]✓[/green] Wrote {w.cells} cells to {', '.join(written)} in {out_dir}")


if __name__ == "__main__":
    app()
