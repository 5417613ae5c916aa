import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from dotenv import load_dotenv
from rich.console import Console

from .core.chebyshev import Cell, falsify, get_inequality, run_cell
from .core.config import CampaignConfig
from .core.hermat import HermitianMatrix
from .core.means import MeanSpec, check_mean_axioms, check_path_identity
from .core.oracle import DEFAULT_RATIO_GRID, is_validated, run_oracle_study
from .core.render import build_report, make_record, print_failures, print_oracle, summarize
from .core.sampling import make_rng, random_strictly_positive

load_dotenv()

# Stream tag separating path-identity draws from generator and weight draws.
_PATH_STREAM = 3


@dataclass
class CampaignResult:
    report: Dict[str, Any]
    exit_code: int
    failures: List[Dict[str, Any]] = field(default_factory=list)


class Campaign:
    """
    Runs one command over a resolved CampaignConfig.

    Records are produced in sorted-cell order so identical configs give
    identical reports; only generated_at differs between runs.
    """

    def __init__(self, config: CampaignConfig, console: Optional[Console] = None):
        self.config = config
        self.tol = config.tolerances
        self.console = console or self.get_console()

    @staticmethod
    def get_console() -> Console:
        return Console(file=sys.stderr)

    def cells(self) -> List[Cell]:
        config = self.config
        info = get_inequality(config.inequality)
        generator = config.effective_generator
        seeds = range(config.seed, config.seed + config.effective_trials)
        cells = []
        if info.uses_mean_grid:
            # (dim, n) cycles with the seed so campaign size is trials x |r| x |lambda|.
            for i, seed in enumerate(seeds):
                dim = config.dims[i % len(config.dims)]
                n = config.n_points[i % len(config.n_points)]
                for r in config.r_grid:
                    for lam in config.lambda_grid:
                        cells.append(Cell(config.inequality, generator, seed, dim, n, float(r), float(lam)))
        else:
            for seed in seeds:
                for dim in config.dims:
                    for n in config.n_points:
                        cells.append(Cell(config.inequality, generator, seed, dim, n))
        return sorted(set(cells), key=Cell.sort_key)

    def _oracle_gate(self, cells: List[Cell]) -> Tuple[List[Cell], List[Dict[str, Any]], Dict[str, Any]]:
        self.console.print("[bold]Step 1: Running pointwise oracle study...[/bold]")
        study = run_oracle_study(tol=self.tol)
        refuted = study.refuted
        self.console.print(
            f"  {len(study.cells) - len(refuted)} validated, {len(refuted)} refuted "
            f"out of {len(study.cells)} (r, lambda) cells"
        )

        verdicts: Dict[Tuple[float, float], bool] = {}
        excluded = []
        for cell in cells:
            key = (cell.r, cell.lam)
            if key not in verdicts:
                verdicts[key] = is_validated(cell.r, cell.lam, DEFAULT_RATIO_GRID, self.tol)
                if not verdicts[key]:
                    excluded.append({
                        "r": cell.r,
                        "lambda": cell.lam,
                        "reason": "pointwise mean inequality refuted by the scalar oracle",
                    })
                    self.console.print(
                        f"  [yellow]Excluded:[/yellow] r={cell.r}, lambda={cell.lam} "
                        "(scalar oracle finds a violation)"
                    )
        kept = [c for c in cells if verdicts[(c.r, c.lam)]]
        return kept, excluded, study.to_dict()

    def verify(self) -> CampaignResult:
        config = self.config
        info = get_inequality(config.inequality)
        cells = self.cells()
        excluded: List[Dict[str, Any]] = []
        oracle = None
        step = 1
        if info.uses_mean_grid:
            cells, excluded, oracle = self._oracle_gate(cells)
            step = 2

        self.console.print(
            f"[bold]Step {step}: Verifying {config.inequality} on {len(cells)} cells "
            f"({config.effective_generator})...[/bold]"
        )
        records = [make_record(cell, run_cell(cell, self.tol)) for cell in cells]

        summary = summarize(records, asserted=info.asserted, excluded=len(excluded))
        failed = [r for r in records if r["verdict"] == "fail"]
        print_failures(self.console, records)
        if not info.asserted:
            self.console.print("[yellow]Exploratory inequality: verdicts are reported, not asserted.[/yellow]")
            exit_code = 0
        elif failed:
            self.console.print(f"[bold red]{len(failed)} of {len(records)} cells failed.[/bold red]")
            exit_code = 1
        else:
            self.console.print(f"[bold green]All {len(records)} cells passed.[/bold green]")
            exit_code = 0

        report = build_report(
            "verify", config.to_dict(), records, summary,
            inequality=config.inequality,
            generator=config.effective_generator,
            oracle=oracle,
            excluded_cells=excluded if info.uses_mean_grid else None,
        )
        return CampaignResult(report=report, exit_code=exit_code, failures=failed)

    def _path_trial(self, r: float, index: int) -> Dict[str, Any]:
        """One randomized path-identity trial; odd trials use commuting inputs."""
        config = self.config
        seed = config.seed + index
        dim = config.dims[index % len(config.dims)]
        rng = make_rng([seed, _PATH_STREAM])
        A = random_strictly_positive(rng, dim)
        if index % 2:
            B = HermitianMatrix._trusted(A.entries @ A.entries) + HermitianMatrix.identity(dim)
        else:
            B = random_strictly_positive(rng, dim)
        p, q, s = (float(x) for x in rng.uniform(0.0, 1.0, 3))
        residual = check_path_identity(r, p, q, s, A, B, self.tol)
        bound = 1e-8 * max(1.0, A.frobenius, B.frobenius)
        return {
            "inequality": "path_identity",
            "seed": seed,
            "dim": dim,
            "n": 0,
            "r": float(r),
            "lambda": s,
            "min_eig": None,
            "scale": A.frobenius,
            "verdict": "pass" if residual <= bound else "fail",
            "inputs_digest": None,
            "residual": residual,
        }

    def axioms(self) -> CampaignResult:
        config = self.config
        trials = config.axiom_trials
        records: List[Dict[str, Any]] = []

        self.console.print("[bold]Step 1: Checking mean axioms...[/bold]")
        for r in config.r_grid:
            for t in config.lambda_grid:
                for dim in config.dims:
                    axiom_report = check_mean_axioms(MeanSpec(r, t), trials, dim, config.seed, self.tol)
                    for failure in axiom_report.failures:
                        self.console.print(
                            f"  [red]{failure.axiom} failed[/red] r={r}, t={t}, dim={dim}, "
                            f"trial {failure.trial}: min eig {failure.min_eig:.3e}"
                        )
                    records.append({
                        "inequality": "mean_axioms",
                        "seed": config.seed,
                        "dim": dim,
                        "n": trials,
                        "r": float(r),
                        "lambda": float(t),
                        "min_eig": axiom_report.worst_min_eig,
                        "scale": axiom_report.worst_scale,
                        "verdict": "pass" if axiom_report.passed else "fail",
                        "inputs_digest": None,
                        "residual": None,
                    })

        self.console.print("[bold]Step 2: Checking path identity...[/bold]")
        for r in config.r_grid:
            for index in range(trials):
                records.append(self._path_trial(r, index))

        records.sort(key=lambda rec: (rec["inequality"], rec["seed"], rec["dim"], rec["r"], rec["lambda"]))
        summary = summarize(records, asserted=True)
        failed = [r for r in records if r["verdict"] == "fail"]
        if failed:
            self.console.print(f"[bold red]{len(failed)} of {len(records)} axiom checks failed.[/bold red]")
        else:
            self.console.print(f"[bold green]All {len(records)} axiom checks passed.[/bold green]")
        report = build_report("axioms", {**config.to_dict(), "trials": trials}, records, summary)
        return CampaignResult(report=report, exit_code=1 if failed else 0, failures=failed)

    def falsify(self) -> CampaignResult:
        config = self.config
        generator = config.effective_generator
        trials = config.effective_trials
        self.console.print(
            f"[bold]Step 1: Searching for a violation of {config.inequality} "
            f"with {generator} ({trials} trials)...[/bold]"
        )
        result = falsify(
            config.inequality, generator, trials, config.seed, self.tol,
            dims=tuple(config.dims), n_points=tuple(config.n_points),
            r=config.r_grid[0], lam=config.lambda_grid[len(config.lambda_grid) // 2],
        )
        records = []
        digest = None
        if result.violated:
            found = result.found
            digest = found.inputs_digest
            records.append(make_record(result.cell, found))
            self.console.print(
                f"[bold green]Violation found[/bold green] after {result.trials_run} trial(s): "
                f"min eig {found.min_eig:.3e}"
            )
            self.console.print(f"  Replay: {digest}")
        else:
            self.console.print(f"[yellow]No violation in {trials} trials.[/yellow]")

        report = build_report(
            "falsify", config.to_dict(), records, summarize(records, asserted=False),
            inequality=config.inequality,
            generator=generator,
            falsification={
                "trials_requested": result.trials_requested,
                "trials_run": result.trials_run,
                "violated": result.violated,
                "digest": digest,
            },
        )
        return CampaignResult(report=report, exit_code=0 if result.violated else 1, failures=records)

    def oracle(self) -> CampaignResult:
        self.console.print("[bold]Step 1: Running pointwise oracle study...[/bold]")
        study = run_oracle_study(tol=self.tol)
        oracle = study.to_dict()
        print_oracle(self.console, oracle)
        for cell in study.refuted:
            self.console.print(
                f"  [yellow]Refuted:[/yellow] r={cell.r}, lambda={cell.lam} "
                f"(gap {cell.worst_gap:.3e} at b/a={cell.worst_ratio:.4g})"
            )
        report = build_report(
            "oracle", self.config.to_dict(), [], summarize([], asserted=False), oracle=oracle,
        )
        return CampaignResult(report=report, exit_code=0)
