from importlib.metadata import version as get_version
from enum import Enum
from pathlib import Path
from typing import Any, Optional
import json
import logging

import numpy as np
import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from .experiments import (
    ConvergenceRecord,
    Method,
    ProblemName,
    ProblemSetup,
    curve_ratio,
    default_solver,
    run_sweep,
)
from .operators import SolverConfig, SolverFailureError, SolverMethod, assemble_fd_laplacian_1d
from .smoothing import smoothing_rate_study
from .store import (
    RunManifest,
    RunLedger,
    TransactionalLedger,
    records_to_csv,
    write_results,
    write_table,
)
from .verify import SUITES, run_suite

app = typer.Typer(name="rkrylov", help="Resolvent Krylov approximation of semigroup actions")
console = Console()
err_console = Console(stderr=True)


class MethodChoice(str, Enum):
    KRYLOV = "krylov"
    EULER = "euler"
    BOTH = "both"

    def methods(self) -> list[Method]:
        if self == MethodChoice.BOTH:
            return [Method.KRYLOV, Method.EULER]
        return [Method(self.value)]


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class WaveSolver(str, Enum):
    DST = "dst"
    CG = "cg"
    DIRECT = "direct"


def _handle_run_error(e: Exception) -> None:
    if isinstance(e, SolverFailureError):
        err_console.print(f"[red]Solver failed:[/red] {e}")
        raise typer.Exit(3)
    if isinstance(e, ValueError):
        err_console.print(f"[red]Invalid input:[/red] {e}")
        raise typer.Exit(2)
    err_console.print(f"[red]Failed:[/red] {e}")
    raise typer.Exit(3)


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show debug logging"),
):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def _emit(
    subcommand: str,
    parameters: dict[str, Any],
    records: list[ConvergenceRecord],
    output: Optional[Path],
    fmt: OutputFormat,
    record: bool,
    extras: Optional[dict[str, Any]] = None,
) -> None:
    manifest = RunManifest(
        subcommand=subcommand,
        parameters=parameters,
        tool_version=__version__,
        output=str(output) if output else None,
    )
    if output:
        write_results(output, records, manifest, fmt.value, extras)
        err_console.print(f"[green]Wrote {len(records)} records:[/green] {output}")
    elif fmt == OutputFormat.JSON:
        payload = {
            "manifest": manifest.to_dict(),
            "records": [r.to_row() for r in records],
            "extras": extras or {},
        }
        typer.echo(json.dumps(payload, indent=2))
    else:
        typer.echo(records_to_csv(records), nl=False)

    if record:
        with TransactionalLedger() as ledger:
            ledger.add_run(manifest)
        err_console.print(f"  Run: {manifest.id}")


def _flatten(curves: list[list[ConvergenceRecord]]) -> list[ConvergenceRecord]:
    return [r for curve in curves for r in curve]


@app.command()
def schrodinger(
    grid_size: int = typer.Option(4096, "--grid-size", "-N", help="Number of Fourier modes"),
    tau: float = typer.Option(0.02, "--tau", help="Time step"),
    gamma: float = typer.Option(1.0, "--gamma", help="Resolvent shift"),
    q: list[int] = typer.Option([2, 4, 6, 8], "--q", help="Smoothness index (repeatable)"),
    n_max: int = typer.Option(60, "--n-max", help="Largest Krylov dimension or step count"),
    method: MethodChoice = typer.Option(MethodChoice.KRYLOV, "--method", help="Approximation"),
    phi_index: int = typer.Option(0, "--phi-index", help="Approximate phi_j instead of exp"),
    workers: int = typer.Option(1, "--workers", help="Parallel runs"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Data file path"),
    fmt: OutputFormat = typer.Option(OutputFormat.CSV, "--format", help="Data file format"),
    no_record: bool = typer.Option(False, "--no-record", help="Skip the run ledger"),
):
    try:
        setups = [
            ProblemSetup(
                name=ProblemName.SCHRODINGER,
                size=grid_size,
                tau=tau,
                gamma=gamma,
                q=qi,
                phi_index=phi_index,
            )
            for qi in q
        ]
        if n_max < 1:
            raise ValueError(f"--n-max must be positive, got {n_max}")
        curves = run_sweep(setups, range(1, n_max + 1), method.methods(), workers)
    except Exception as e:
        _handle_run_error(e)

    parameters = {
        "problem": ProblemName.SCHRODINGER.value,
        "grid_size": grid_size,
        "tau": tau,
        "gamma": gamma,
        "q": list(q),
        "n_max": n_max,
        "method": method.value,
        "phi_index": phi_index,
        "solver": default_solver(ProblemName.SCHRODINGER).method.value,
    }
    _emit("schrodinger", parameters, _flatten(curves), output, fmt, not no_record)


@app.command(name="wave-fd")
def wave_fd(
    grid: list[int] = typer.Option([31, 63], "--grid", "-d", help="Interior grid size (repeatable)"),
    tau: float = typer.Option(0.5, "--tau", help="Time step"),
    gamma: float = typer.Option(1.0, "--gamma", help="Resolvent shift"),
    q: list[int] = typer.Option([2, 4], "--q", help="Smoothness index (repeatable)"),
    n_max: int = typer.Option(40, "--n-max", help="Largest Krylov dimension or step count"),
    solver: WaveSolver = typer.Option(WaveSolver.DST, "--solver", help="Shifted solver"),
    cg_tol: float = typer.Option(1e-12, "--cg-tol", help="CG relative tolerance"),
    cg_maxiter: int = typer.Option(10_000, "--cg-maxiter", help="CG iteration cap"),
    method: MethodChoice = typer.Option(MethodChoice.KRYLOV, "--method", help="Approximation"),
    phi_index: int = typer.Option(0, "--phi-index", help="Approximate phi_j instead of exp"),
    workers: int = typer.Option(1, "--workers", help="Parallel runs"),
    ratio_from: int = typer.Option(10, "--ratio-from", help="Smallest n in the grid ratio"),
    ratio_to: int = typer.Option(30, "--ratio-to", help="Largest n in the grid ratio"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Data file path"),
    fmt: OutputFormat = typer.Option(OutputFormat.CSV, "--format", help="Data file format"),
    no_record: bool = typer.Option(False, "--no-record", help="Skip the run ledger"),
):
    try:
        cfg = SolverConfig(
            method=SolverMethod(solver.value), tolerance=cg_tol, max_iterations=cg_maxiter
        )
        setups = [
            ProblemSetup(
                name=ProblemName.WAVE_FD,
                size=d,
                tau=tau,
                gamma=gamma,
                q=qi,
                solver=cfg,
                phi_index=phi_index,
            )
            for qi in q
            for d in grid
        ]
        if n_max < 1:
            raise ValueError(f"--n-max must be positive, got {n_max}")
        if ratio_to < ratio_from:
            raise ValueError(f"--ratio-to {ratio_to} is below --ratio-from {ratio_from}")
        methods = method.methods()
        curves = run_sweep(setups, range(1, n_max + 1), methods, workers)
    except Exception as e:
        _handle_run_error(e)

    # curves are ordered (q, d, method); ratios compare grids at fixed q
    ratios = {}
    per_q = len(grid) * len(methods)
    for i, qi in enumerate(q):
        block = curves[i * per_q : (i + 1) * per_q]
        krylov = [c for c in block if c and c[0].method == Method.KRYLOV]
        if len(krylov) >= 2:
            ratios[str(qi)] = curve_ratio(krylov, n_min=ratio_from, n_max=ratio_to)
            err_console.print(
                f"Grid ratio q={qi} ({ratio_from} <= n <= {ratio_to}): {ratios[str(qi)]:.3f}"
            )

    parameters = {
        "problem": ProblemName.WAVE_FD.value,
        "grid": list(grid),
        "tau": tau,
        "gamma": gamma,
        "q": list(q),
        "n_max": n_max,
        "method": method.value,
        "phi_index": phi_index,
        "solver": solver.value,
        "cg_tol": cg_tol,
        "cg_maxiter": cg_maxiter,
        "ratio_from": ratio_from,
        "ratio_to": ratio_to,
    }
    _emit(
        "wave-fd",
        parameters,
        _flatten(curves),
        output,
        fmt,
        not no_record,
        extras={"grid_ratio": ratios},
    )


@app.command()
def smoothing(
    grid: int = typer.Option(255, "--grid", "-d", help="Interior points of the 1D grid"),
    q: list[int] = typer.Option([1, 2], "--q", help="Smoothing order (repeatable)"),
    n: list[int] = typer.Option([4, 16, 64, 256, 1024], "--n", help="Shift parameter (repeatable)"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="CSV file path"),
):
    try:
        lap = assemble_fd_laplacian_1d(grid)
        x = lap.spacing * np.arange(1, grid + 1)
        rows = []
        for qi in q:
            v = x ** (2 * qi) * (1 - x) ** (2 * qi)
            for ni, scaled in smoothing_rate_study(lap, v, qi, list(n)):
                rows.append([qi, ni, float(scaled)])
    except Exception as e:
        _handle_run_error(e)

    if output:
        write_table(output, ["q", "n", "scaled_error"], rows)
        console.print(f"[green]Wrote {len(rows)} rows:[/green] {output}")
        return

    table = Table()
    table.add_column("q")
    table.add_column("n")
    table.add_column("n^(q/2) |H v - v| / |A^q v|")
    for qi, ni, scaled in rows:
        table.add_row(str(qi), str(ni), f"{scaled:.4e}")
    console.print(table)


@app.command()
def verify(
    suite: str = typer.Option(
        "all", "--suite", "-s", help=f"One of: {', '.join(SUITES)}, all"
    ),
    seed: int = typer.Option(0, "--seed", help="Seed for randomised properties"),
):
    try:
        results = run_suite(suite, seed)
    except Exception as e:
        _handle_run_error(e)

    failed = 0
    for r in results:
        marker = "[green]PASS[/green]" if r.passed else "[red]FAIL[/red]"
        console.print(f"{marker} {r.name}: {r.detail}")
        failed += not r.passed
    if failed:
        console.print(f"[red]{failed} of {len(results)} properties failed[/red]")
        raise typer.Exit(1)
    console.print(f"[green]All {len(results)} properties passed[/green]")


@app.command()
def runs():
    ledger = RunLedger.load()
    if not ledger.runs:
        console.print("[dim]No recorded runs[/dim]")
        return

    table = Table()
    table.add_column("ID")
    table.add_column("Command")
    table.add_column("Output")
    table.add_column("Timestamp")

    for manifest in ledger.runs.values():
        table.add_row(
            manifest.id,
            manifest.subcommand,
            manifest.output or "[dim]stdout[/dim]",
            manifest.timestamp,
        )

    console.print(table)


@app.command()
def show(run_id: str = typer.Argument(..., help="Run ID")):
    manifest = RunLedger.load().get_run(run_id)
    if not manifest:
        console.print(f"[yellow]Not found:[/yellow] {run_id}")
        raise typer.Exit(1)
    typer.echo(json.dumps(manifest.to_dict(), indent=2))


@app.command()
def rm(run_id: str = typer.Argument(..., help="Run ID")):
    with TransactionalLedger() as ledger:
        removed = ledger.remove_run(run_id)
    if removed:
        console.print(f"[green]Removed:[/green] {run_id}")
    else:
        console.print(f"[yellow]Not found:[/yellow] {run_id}")
        raise typer.Exit(1)


@app.command()
def version():
    console.print(get_version("resolvent-krylov"))


if __name__ == "__main__":
    app()
