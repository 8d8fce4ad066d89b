"""CLI application for rlift."""

import logging
from pathlib import Path
from typing import Any

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from rlift.core.config import EXIT_INPUT_ERROR, EXIT_OK, MAX_DEGREE
from rlift.core.documents import InputFormatError, dump_document, load_bialgebra
from rlift.core.models import JobConfig, OutputFormat
from rlift.core.settings import get_settings, reset_settings, update_settings
from rlift.services.liebialg import LieBialgebraError, validation_gate
from rlift.services.pipeline import PipelineError, run_job
from rlift.utils.paths import PathValidationError, validate_input_path, validate_output_path

app = typer.Typer(
    name="rlift",
    help="Exact lifts of quasitriangular Lie bialgebras and their braidings",
    no_args_is_help=True,
)
console = Console()
err_console = Console(stderr=True)


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _write(data: dict[str, Any], output_format: OutputFormat, out: Path | None) -> None:
    text = dump_document(data, output_format)
    if out is None:
        typer.echo(text, nl=False)
        return
    try:
        out.write_text(text, encoding="utf-8")
    except OSError as e:
        err_console.print(f"[red]Error:[/red] Cannot write {out}: {e}")
        raise typer.Exit(EXIT_INPUT_ERROR)


def _status(passed: bool) -> str:
    return "[green]✓[/green] pass" if passed else "[red]✗[/red] fail"


@app.command()
def run(
    input_path: Path = typer.Argument(
        ...,
        help="Lie bialgebra document (JSON or YAML)",
    ),
    degree: int | None = typer.Option(
        None,
        "--degree",
        "-n",
        help=f"Truncation degree N, from 3 to {MAX_DEGREE} (settings default)",
    ),
    emit: str = typer.Option(
        "lift,report",
        "--emit",
        "-e",
        help="Comma-separated artifacts: lift, braiding, report, audit",
    ),
    skip_validation: bool = typer.Option(
        False,
        "--skip-validation",
        help="Skip the Jacobi / co-Jacobi / CYBE input gate",
    ),
    out: Path | None = typer.Option(
        None,
        "--out",
        "-o",
        help="Write the artifact document here instead of stdout",
    ),
    output_format: str | None = typer.Option(
        None,
        "--format",
        "-f",
        help="Artifact format: json or yaml (settings default)",
    ),
    seed_check: int | None = typer.Option(
        None,
        "--seed-check",
        help="Rebuild the lift with random sections drawn from this seed and compare",
    ),
) -> None:
    """Construct the lift and the braiding, verify them and emit the artifacts.

    Exit codes: 0 all checks passed, 1 an axiom check failed, 2 input error,
    3 internal invariant violation.

    Examples:
        rlift run sl2.yaml                          # lift and report to stdout
        rlift run sl2.yaml -n 5 -e lift,braiding    # degree 5, lift and braiding
        rlift run sl2.yaml --seed-check 7 -o out.json
    """
    settings = get_settings()
    fmt = OutputFormat.JSON
    target: Path | None = None
    try:
        fmt = OutputFormat(output_format or settings.output_format)
        target = validate_output_path(out) if out is not None else None
        job = JobConfig.from_options(
            input_path,
            degree=degree if degree is not None else settings.default_degree,
            emit=emit,
            skip_validation=skip_validation,
            out=target,
            output_format=fmt.value,
            seed_check=seed_check,
        )
    except (ValueError, PathValidationError) as e:
        err_console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_INPUT_ERROR)

    try:
        result = run_job(job)
    except PipelineError as e:
        err_console.print(f"[red]Error:[/red] {e.stage}: {e}")
        if e.failed:
            err_console.print(f"  Failed: {', '.join(e.failed)}")
        if target is not None:
            _write(e.to_dict(), fmt, target)
        raise typer.Exit(e.exit_code)

    _write(result.document, fmt, target)
    if result.exit_code == EXIT_OK:
        err_console.print(f"[green]✓[/green] Lift and braiding verified mod m^{job.degree + 1}")
    else:
        err_console.print(f"[red]✗[/red] Failed checks: {', '.join(result.failures())}")
    raise typer.Exit(result.exit_code)


@app.command()
def validate(
    input_path: Path = typer.Argument(
        ...,
        help="Lie bialgebra document (JSON or YAML)",
    ),
) -> None:
    """Run the input gate and show one row per check."""
    try:
        L = load_bialgebra(validate_input_path(input_path))
        report = validation_gate(L)
    except (InputFormatError, PathValidationError, LieBialgebraError) as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_INPUT_ERROR)

    table = Table(title=f"Input gate (dim {L.dim})")
    table.add_column("Check", style="cyan")
    table.add_column("Nonzero entries", justify="right")
    table.add_column("Status")
    for name, entry in report.to_dict().items():
        table.add_row(name, str(entry["nonzero_entries"]), _status(entry["passed"]))
    console.print(table)

    if not report.passed:
        console.print(f"[red]Error:[/red] Failed checks: {', '.join(report.failures())}")
        raise typer.Exit(EXIT_INPUT_ERROR)


@app.command()
def cohomology(
    dim: int = typer.Option(
        ...,
        "--dim",
        "-d",
        min=1,
        help="Dimension of the Lie algebra",
    ),
    max_degree: int = typer.Option(
        4,
        "--max-degree",
        "-n",
        min=1,
        help="Largest total degree to tabulate",
    ),
) -> None:
    """Tabulate the co-Hochschild cohomology of the formal coordinate ring."""
    from rlift.services.cohochschild import cohomology_check

    table = Table(title=f"Co-Hochschild cohomology, d = {dim}")
    table.add_column("Degree", justify="right")
    table.add_column("H^0", justify="right")
    table.add_column("H^1", justify="right")
    table.add_column("Antisymmetric rank", justify="right")
    for n in range(1, max_degree + 1):
        dims = cohomology_check(dim, n)
        table.add_row(str(n), str(dims.h0), str(dims.h1), str(dims.antisymmetric_rank))
    console.print(table)


@app.command()
def config(
    action: str = typer.Argument(
        "show",
        help="Action: show, set, reset",
    ),
    key: str | None = typer.Argument(
        None,
        help="Setting name (for set)",
    ),
    value: str | None = typer.Argument(
        None,
        help="New value (for set)",
    ),
) -> None:
    """Show or change the persisted settings.

    Examples:
        rlift config                          # Show settings
        rlift config set default_degree 6     # Change the default degree
        rlift config set keep_audit false     # Drop the audit trail
        rlift config reset                    # Restore defaults
    """
    if action == "show":
        settings = get_settings()
        table = Table(title="Settings")
        table.add_column("Key", style="cyan")
        table.add_column("Value")
        for name, current in settings.to_dict().items():
            table.add_row(name, str(current))
        console.print(table)

    elif action == "set":
        if key is None or value is None:
            console.print("[red]Error:[/red] Usage: rlift config set KEY VALUE")
            raise typer.Exit(EXIT_INPUT_ERROR)
        current_settings = get_settings().to_dict()
        if key not in current_settings:
            console.print(
                f"[red]Error:[/red] Unknown setting '{key}' "
                f"(choose from {', '.join(current_settings)})"
            )
            raise typer.Exit(EXIT_INPUT_ERROR)
        try:
            parsed = _parse_setting(current_settings[key], value)
        except ValueError as e:
            console.print(f"[red]Error:[/red] {e}")
            raise typer.Exit(EXIT_INPUT_ERROR)
        updated = update_settings(**{key: parsed})
        console.print(f"[green]✓[/green] {key} = {getattr(updated, key)}")

    elif action == "reset":
        reset_settings()
        console.print("[green]✓[/green] Settings restored to defaults")

    else:
        console.print(f"[red]Error:[/red] Unknown action '{action}'")
        console.print("Valid actions: show, set, reset")
        raise typer.Exit(EXIT_INPUT_ERROR)


def _parse_setting(current: Any, value: str) -> Any:
    """Convert a command line string to the type of the current setting value."""
    if isinstance(current, bool):
        lowered = value.lower()
        if lowered in ("true", "yes", "on", "1"):
            return True
        if lowered in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"Expected a boolean, got '{value}'")
    if isinstance(current, int):
        try:
            return int(value)
        except ValueError:
            raise ValueError(f"Expected an integer, got '{value}'")
    return value


@app.callback()
def main(
    verbose: bool = typer.Option(
        False,
        "--verbose",
        "-v",
        help="Log every stage at DEBUG level to stderr",
    ),
) -> None:
    """rlift - exact lifts rho and braidings exp(V_rho) of quasitriangular Lie bialgebras."""
    _configure_logging(verbose)


if __name__ == "__main__":
    app()
