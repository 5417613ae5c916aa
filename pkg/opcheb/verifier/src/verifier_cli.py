from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Callable, Dict, Optional

import numpy as np
import typer
from rich.markup import escape
from rich.table import Table

from .campaign import Campaign, CampaignResult
from .core.chebyshev import example_gap_raw, example_sides, replay as replay_digest
from .core.config import OutputFormat, build_config, env_tolerances, parse_float_list, parse_int_list
from .core.errors import ConfigError, DigestError, HypothesisViolation, UnknownGenerator, UnknownInequality
from .core.fields import WeightVector, gen_triangular_pair
from .core.render import load_report, save_report
from .report_diff import compare_reports, render_diff_summary

app = typer.Typer(
    help="Operator Chebyshev verifier - certify noncommutative Chebyshev inequalities as PSD gap matrices.",
    add_completion=False,
)

EXIT_OK = 0
EXIT_PURPOSE_FAILED = 1
EXIT_USAGE = 2

DEMO_POINTS = 16


class DemoVariant(str, Enum):
    default = "default"
    constant = "constant"
    increasing_g = "increasing-g"


@app.callback(invoke_without_command=True)
def main(ctx: typer.Context):
    """Operator Chebyshev verifier CLI."""
    if ctx.invoked_subcommand is None:
        typer.echo(ctx.get_help())
        raise typer.Exit(0)


def _usage_error(message: str) -> None:
    console = Campaign.get_console()
    console.print(f"[bold red]Error:[/bold red] {escape(message)}")
    raise typer.Exit(code=EXIT_USAGE)


def _resolve(
    config: Optional[Path],
    inequality: Optional[str],
    generator: Optional[str],
    trials: Optional[int],
    seed: Optional[int],
    dims: Optional[str],
    points: Optional[str],
    r_grid: Optional[str],
    lambda_grid: Optional[str],
    fmt: Optional[OutputFormat],
    out: Optional[str],
):
    try:
        overrides: Dict[str, Any] = {
            "inequality": inequality,
            "generator": generator,
            "trials": trials,
            "seed": seed,
            "dims": parse_int_list(dims, "--dims") if dims is not None else None,
            "n_points": parse_int_list(points, "--points") if points is not None else None,
            "r_grid": parse_float_list(r_grid, "--r-grid") if r_grid is not None else None,
            "lambda_grid": parse_float_list(lambda_grid, "--lambda-grid") if lambda_grid is not None else None,
            "output_format": fmt.value if fmt is not None else None,
            "output_path": out,
        }
        return build_config(config, overrides)
    except (ConfigError, UnknownInequality, UnknownGenerator) as e:
        _usage_error(str(e))


def _run(config, action: Callable[[Campaign], CampaignResult]) -> None:
    campaign = Campaign(config)
    try:
        result = action(campaign)
    except (HypothesisViolation, UnknownInequality, UnknownGenerator) as e:
        _usage_error(str(e))
    path = save_report(result.report, config.output_format.value, config.output_path)
    if path is not None:
        campaign.console.print(f"  Report saved to {path}")
    raise typer.Exit(code=result.exit_code)


ConfigOpt = Annotated[Optional[Path], typer.Option("--config", help="JSON campaign config file")]
InequalityOpt = Annotated[Optional[str], typer.Option("--inequality", help="thm21, cor22, ineq15, thm31, thm41 or thm41_two_weight")]
GeneratorOpt = Annotated[Optional[str], typer.Option("--generator", help="scaled_pair, increasing_pair or nonsynchronous_pair")]
TrialsOpt = Annotated[Optional[int], typer.Option("--trials", help="Number of seeds (falsify: number of trials)")]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", help="First seed")]
DimsOpt = Annotated[Optional[str], typer.Option("--dims", help="Comma-separated matrix dimensions")]
PointsOpt = Annotated[Optional[str], typer.Option("--points", help="Comma-separated field sizes")]
RGridOpt = Annotated[Optional[str], typer.Option("--r-grid", help="Comma-separated power exponents in [-1, 1]")]
LambdaGridOpt = Annotated[Optional[str], typer.Option("--lambda-grid", help="Comma-separated mean parameters in [0, 1]")]
FormatOpt = Annotated[Optional[OutputFormat], typer.Option("--format", help="Report format: json or csv")]
OutOpt = Annotated[Optional[str], typer.Option("--out", help="Report path (default: stdout)")]


@app.command("verify")
def verify(
    config: ConfigOpt = None,
    inequality: InequalityOpt = None,
    generator: GeneratorOpt = None,
    trials: TrialsOpt = None,
    seed: SeedOpt = None,
    dims: DimsOpt = None,
    points: PointsOpt = None,
    r_grid: RGridOpt = None,
    lambda_grid: LambdaGridOpt = None,
    fmt: FormatOpt = None,
    out: OutOpt = None,
):
    """
    Run an inequality campaign over the (seed, dim, n, r, lambda) grid.

    Exit 0 when every asserted cell passes, 1 when any fails, 2 on usage errors.

    Example:
        opcheb verify --inequality thm21 --seed 42 --out report.json
    """
    resolved = _resolve(config, inequality, generator, trials, seed, dims, points, r_grid, lambda_grid, fmt, out)
    _run(resolved, Campaign.verify)


@app.command("axioms")
def axioms(
    config: ConfigOpt = None,
    trials: TrialsOpt = None,
    seed: SeedOpt = None,
    dims: DimsOpt = None,
    r_grid: RGridOpt = None,
    lambda_grid: LambdaGridOpt = None,
    fmt: FormatOpt = None,
    out: OutOpt = None,
):
    """
    Check the mean axioms and the path identity of m_{r,t} for every r in
    the r grid and t in the lambda grid.
    """
    resolved = _resolve(config, None, None, trials, seed, dims, None, r_grid, lambda_grid, fmt, out)
    _run(resolved, Campaign.axioms)


@app.command("falsify")
def falsify(
    config: ConfigOpt = None,
    inequality: InequalityOpt = None,
    generator: GeneratorOpt = None,
    trials: TrialsOpt = None,
    seed: SeedOpt = None,
    dims: DimsOpt = None,
    points: PointsOpt = None,
    r_grid: RGridOpt = None,
    lambda_grid: LambdaGridOpt = None,
    fmt: FormatOpt = None,
    out: OutOpt = None,
):
    """
    Search for a violation with hypotheses unchecked.

    Exit 0 when a violation is found (the replay digest is printed), 1 when
    the trials are exhausted.

    Example:
        opcheb falsify --inequality thm21 --generator nonsynchronous_pair --trials 1000
    """
    resolved = _resolve(config, inequality, generator, trials, seed, dims, points, r_grid, lambda_grid, fmt, out)
    _run(resolved, Campaign.falsify)


@app.command("oracle")
def oracle(
    fmt: FormatOpt = None,
    out: OutOpt = None,
):
    """Run the scalar oracle for the pointwise mean inequality and list refuted (r, lambda) cells."""
    resolved = _resolve(None, None, None, None, None, None, None, None, None, fmt, out)
    _run(resolved, Campaign.oracle)


@app.command("replay")
def replay(
    digest: str = typer.Argument(..., help="inputs_digest of a report record"),
):
    """Recompute one cell from its digest. Exit 0 on pass, 1 on fail."""
    console = Campaign.get_console()
    try:
        report = replay_digest(digest, env_tolerances())
    except (DigestError, ConfigError, UnknownInequality, UnknownGenerator, HypothesisViolation) as e:
        _usage_error(str(e))
    console.print(f"[bold]Replayed[/bold] {report.inputs_digest}")
    console.print(f"  min_eig: {report.min_eig!r}")
    console.print(f"  scale: {report.scale!r}")
    if report.residual is not None:
        console.print(f"  residual: {report.residual!r}")
    typer.echo(f"{report.verdict.value} {report.min_eig!r}")
    raise typer.Exit(code=EXIT_OK if report.passed else EXIT_PURPOSE_FAILED)


@app.command("diff")
def diff(
    report_a: Path = typer.Argument(..., help="First JSON report"),
    report_b: Path = typer.Argument(..., help="Second JSON report"),
):
    """Compare two JSON reports ignoring generated_at. Exit 0 identical, 1 different."""
    console = Campaign.get_console()
    for path in (report_a, report_b):
        if not path.exists():
            _usage_error(f"Report not found: {path}")
    try:
        result = compare_reports(load_report(report_a), load_report(report_b))
    except ValueError as e:
        _usage_error(f"Could not read reports: {e}")
    for line in render_diff_summary(result):
        console.print(f"  {line}")
    if result["identical"]:
        console.print("[bold green]Reports match.[/bold green]")
        raise typer.Exit(code=EXIT_OK)
    console.print("[bold red]Reports differ.[/bold red]")
    raise typer.Exit(code=EXIT_PURPOSE_FAILED)


def _demo_series(variant: DemoVariant, t: np.ndarray):
    if variant is DemoVariant.constant:
        f = np.full_like(t, 0.5)
        g = np.full_like(t, 0.5)
        return f, g, f, g
    if variant is DemoVariant.increasing_g:
        return t, t, t, t
    return t, 1.0 - t, t, 1.0 - t


@app.command("demo-example")
def demo_example(
    variant: DemoVariant = typer.Option(DemoVariant.default, "--variant", help="default, constant or increasing-g"),
):
    """
    Evaluate the 2x2 triangular example on 16 points of [0, 1] with unit
    weights and print both sides of the diagonal inequality.
    """
    console = Campaign.get_console()
    tol = env_tolerances()
    t = np.linspace(0.0, 1.0, DEMO_POINTS)
    f1, g1, f2, g2 = _demo_series(variant, t)
    F, G = gen_triangular_pair(
        f1, g1, np.sin(t), f2, g2, np.cos(t),
        points=tuple(t), strict=variant is not DemoVariant.increasing_g,
    )
    alpha = WeightVector((1.0,) * DEMO_POINTS)
    beta = WeightVector((1.0,) * DEMO_POINTS)
    lhs, rhs = example_sides(F, G, alpha, beta)
    report = example_gap_raw(F, G, alpha, beta, tol)

    table = Table(title=f"Triangular example ({variant.value}, n={DEMO_POINTS})")
    table.add_column("slot")
    table.add_column("left side")
    table.add_column("right side")
    table.add_column("gap")
    for slot, label in ((0, "f"), (1, "g")):
        left = float(lhs[slot, slot].real)
        right = float(rhs[slot, slot].real)
        table.add_row(label, f"{left:.10g}", f"{right:.10g}", f"{left - right:.6e}")
    console.print(table)

    gaps = [float((lhs - rhs)[k, k].real) for k in range(2)]
    bound = tol.psd_tol * max(1.0, report.scale)
    if all(g >= -bound for g in gaps):
        console.print("[bold green]Both diagonal gaps are nonnegative.[/bold green]")
        raise typer.Exit(code=EXIT_OK)
    console.print("[bold red]A diagonal gap is negative.[/bold red]")
    raise typer.Exit(code=EXIT_PURPOSE_FAILED)


if __name__ == "__main__":
    app()
