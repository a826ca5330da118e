import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from cautious.config import env_seed, load_environment, read_config_file, resolve_run_config
from cautious.decision.metrics import report_metrics
from cautious.errors import CautiousError
from cautious.models.config import RunConfig
from cautious.models.dataset import ALPHA_PRESETS
from cautious.models.posterior import Status
from cautious.models.report import ConfusionCounts, SelectionReport
from cautious.models.synth import SYNTH_PRESETS, SynthSpec, SynthTruth
from cautious.plotdata import FIGURES, write_series
from cautious.probes.csv_loader import load_comparison, load_csv
from cautious.probes.synthetic import generate_synthetic, load_truth, save_csv
from cautious.refinery.engine import select
from cautious.renderer.engine import render_to_markdown
from cautious.renderer.manifest import create_manifest

console = Console(stderr=True)
logger = logging.getLogger("cautious")

EXIT_OK, EXIT_USAGE = 0, 1
STATUS_STYLE = {Status.ACTIVE: "green", Status.INACTIVE: "dim", Status.INDETERMINATE: "yellow"}


class UsageError(Exception):
    """Bad invocation: missing input files or required settings."""


class CautiousArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        console.print(f"[red]{self.prog}: error: {message}[/red]")
        sys.exit(EXIT_USAGE)


def setup_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def _existing(path: str | None, what: str) -> Path:
    if not path:
        raise UsageError(f"no {what} given")
    resolved = Path(path)
    if not resolved.exists():
        raise UsageError(f"{what} '{path}' does not exist")
    return resolved


def _emit_json(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        console.print(f"[bold green]Written: {out}[/bold green]")
    else:
        sys.stdout.write(text + "\n")


# --- simulate ---


def cmd_simulate(args) -> int:
    """
    Writes a seeded synthetic dataset as CSV, with its truth sidecar next to it.
    """
    overrides = {
        key: value
        for key, value in (
            ("n", args.n),
            ("p", args.p),
            ("n_active", args.active),
            ("corr_base", args.corr),
            ("noise_var", args.noise_var),
        )
        if value is not None
    }
    seed = args.seed if args.seed is not None else (env_seed() or 0)
    spec = SynthSpec.from_preset(args.preset, seed=seed, **overrides) if args.preset else SynthSpec(seed=seed, **overrides)
    data, beta_true, active = generate_synthetic(spec)
    path = save_csv(data, args.out, SynthTruth(spec=spec, beta_true=beta_true.tolist(), active_indices=active))
    console.print(
        Panel(
            f"n = {spec.n}, p = {spec.p}, active = {spec.n_active}, noise variance = {spec.noise_var}\n"
            f"seed = {spec.seed}\nwritten to {path} (+ truth sidecar)",
            title="Synthetic dataset",
        )
    )
    return EXIT_OK


# --- fit ---

RUN_FLAGS = [name for name in RunConfig.model_fields]


def _status_table(report: SelectionReport, limit: int = 50) -> Table:
    table = Table(title=f"{report.backend} backend, {report.schedule}")
    for column in ("Column", "Name", "Status", "Odds lower", "Odds upper"):
        table.add_column(column)
    shown = sorted(report.covariates, key=lambda c: (c.status == Status.INACTIVE, -c.odds.log_upper))[:limit]
    for c in shown:
        style = STATUS_STYLE[c.status]
        table.add_row(
            str(c.column), c.name, f"[{style}]{c.status.value}[/{style}]", f"{c.odds.lower:.4g}", f"{c.odds.upper:.4g}"
        )
    return table


def cmd_fit(args) -> int:
    """
    Resolves the run settings, loads the data and writes the selection report.

    The JSON report goes to --out (or stdout); a Markdown rendering is written
    beside it, and a status table plus a summary panel go to stderr.
    """
    file_values = read_config_file(_existing(args.config, "config file")) if args.config else {}
    flags = {name: getattr(args, name, None) for name in RUN_FLAGS}
    config = resolve_run_config(flags, file_values)
    data_path = _existing(config.data, "data file (--data)")

    data = load_csv(data_path, response=config.response, standardize=config.standardize)
    truth = load_truth(data_path)
    report = select(data, config, truth=truth, source_path=str(data_path))

    _emit_json(report.model_dump_json(indent=2), config.out)
    if config.out:
        markdown = render_to_markdown(create_manifest(report), Path(config.out).with_suffix(".md"))
        console.print(f"[bold green]Written: {markdown}[/bold green]")

    console.print(_status_table(report))
    agg = report.aggregates
    counts = ", ".join(f"{s.value} {report.count(s)}" for s in Status)
    console.print(
        Panel(
            f"{counts}\nsquared error min {agg.min_sq_err:.4f} / max {agg.max_sq_err:.4f}, "
            f"model indeterminacy {agg.model_indeterminacy:.4f}",
            title="Cautious selection",
        )
    )
    for note in report.disclosures:
        console.print(f"[italic]note:[/italic] {note}")
    return EXIT_OK


# --- metrics ---


def cmd_metrics(args) -> int:
    """
    Recomputes accuracy measures from a saved report.

    The truth sidecar comes from --truth or sits beside the original data file.
    Rows of a --compare CSV are printed next to the cautious fits and, with
    --out, rendered into the Markdown report as well.
    """
    report_path = _existing(args.report, "report")
    report = SelectionReport.model_validate_json(report_path.read_text(encoding="utf-8"))
    truth = None
    if args.truth:
        truth = SynthTruth.model_validate_json(_existing(args.truth, "truth sidecar").read_text(encoding="utf-8"))
    elif report.data.path:
        truth = load_truth(report.data.path)
    comparison = load_comparison(_existing(args.compare, "comparison file")) if args.compare else []
    summary = report_metrics(report, truth)
    _emit_json(summary.model_dump_json(indent=2), args.out)
    if args.out:
        manifest = create_manifest(report, comparison=comparison)
        markdown = render_to_markdown(manifest, Path(args.out).with_suffix(".md"))
        console.print(f"[bold green]Written: {markdown}[/bold green]")

    table = Table(title="Selection counts (determinate-indeterminate)")
    for column in ("Method", "Act", "FA", "Inact", "FI", "Sq. E", "Delta(beta)"):
        table.add_column(column)
    errors = {"optimistic": summary.min_sq_err, "pessimistic": summary.max_sq_err}
    for label, counts in summary.confusion.items():
        delta = summary.delta_beta.get(label)
        table.add_row(
            f"cautious ({label})",
            *counts.row(),
            f"{errors[label]:.2f}",
            f"{delta:.2f}" if delta is not None else ConfusionCounts.hyphen(None),
        )
    for row in comparison:
        table.add_row(*(str(v) for v in row.values()))
    console.print(table)
    console.print(f"model indeterminacy {summary.model_indeterminacy:.4f}")
    return EXIT_OK


# --- plotdata / schema ---


def cmd_plotdata(args) -> int:
    names = list(FIGURES) if args.figure == "all" else [args.figure]
    for name, path in write_series(names, args.out).items():
        console.print(f"[green]{name}[/green] -> {path}")
    return EXIT_OK


def cmd_schema(args) -> int:
    _emit_json(json.dumps(SelectionReport.model_json_schema(), indent=2), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = CautiousArgumentParser(prog="cautious", description="Cautious spike-and-slab variable selection")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CautiousArgumentParser)

    sim = sub.add_parser("simulate", help="Write a correlated synthetic dataset and its truth sidecar")
    sim.add_argument("--preset", choices=sorted(SYNTH_PRESETS), default=None)
    sim.add_argument("--n", type=int, default=None)
    sim.add_argument("--p", type=int, default=None)
    sim.add_argument("--active", type=int, default=None, help="Number of nonzero coefficients")
    sim.add_argument("--corr", type=float, default=None, help="Base of the AR(1)-type column correlation")
    sim.add_argument("--noise-var", type=float, default=None)
    sim.add_argument("--seed", type=int, default=None, help="Falls back to $CSS_SEED, then 0")
    sim.add_argument("--out", default="dataset.csv")
    sim.set_defaults(handler=cmd_simulate)

    fit = sub.add_parser("fit", help="Classify covariates as active, inactive or indeterminate")
    fit.add_argument("--config", default=None, help="YAML file with settings named like the long flags")
    fit.add_argument("--data", default=None)
    fit.add_argument("--response", default=None, help="Response column name or 0-based position (default 0)")
    fit.add_argument("--no-standardize", dest="standardize", action="store_const", const=False, default=None)
    fit.add_argument("--alpha-lo", type=float, default=None)
    fit.add_argument("--alpha-hi", type=float, default=None)
    fit.add_argument("--alpha-preset", choices=sorted(ALPHA_PRESETS), default=None)
    fit.add_argument("--elicit", action="store_const", const=True, default=None, help="Elicit alpha from ridge p-values")
    for name in ("tau0", "tau1", "s", "a", "b", "sigma2"):
        fit.add_argument(f"--{name}", type=float, default=None)
    fit.add_argument("--backend", choices=["auto", "orthogonal", "exact", "gibbs"], default=None)
    fit.add_argument("--iters", type=int, default=None)
    fit.add_argument("--burnin", type=int, default=None)
    fit.add_argument("--thin", type=int, default=None)
    fit.add_argument("--chains", type=int, default=None)
    fit.add_argument("--grid", type=int, default=None, help="Evaluate G alpha vectors from lo to hi instead of the endpoints")
    fit.add_argument("--seed", type=int, default=None, help="Falls back to $CSS_SEED, then 0")
    fit.add_argument("--out", default=None, help="Report JSON path; a Markdown report is written next to it")
    fit.add_argument("--cap", type=int, default=None, help="Largest model space the exact backend may enumerate")
    fit.add_argument("--screen", type=int, default=None, help="Keep this many columns by correlation screening")
    fit.add_argument("--trace-dir", default=None)
    fit.add_argument("--workers", type=int, default=None)
    fit.set_defaults(handler=cmd_fit)

    met = sub.add_parser("metrics", help="Accuracy measures of a saved report")
    met.add_argument("--report", required=True)
    met.add_argument("--truth", default=None, help="Truth sidecar (defaults to the one next to the data file)")
    met.add_argument("--compare", default=None, help="CSV of competitor results to print alongside")
    met.add_argument("--out", default=None, help="Metrics JSON path; the report is re-rendered as Markdown next to it")
    met.set_defaults(handler=cmd_metrics)

    plot = sub.add_parser("plotdata", help="Write figure series as CSV")
    plot.add_argument("--figure", choices=sorted(FIGURES) + ["all"], default="all")
    plot.add_argument("--out", default="plotdata", help="Output directory")
    plot.set_defaults(handler=cmd_plotdata)

    schema = sub.add_parser("schema", help="Print the JSON schema of the selection report")
    schema.add_argument("--out", default=None)
    schema.set_defaults(handler=cmd_schema)
    return parser


def main(argv=None) -> int:
    load_environment()
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.handler(args)
    except UsageError as exc:
        console.print(f"[red]Usage error:[/red] {exc}")
        return EXIT_USAGE
    except CautiousError as exc:
        console.print(f"[red]{type(exc).__name__}:[/red] {exc}")
        return exc.exit_code
    except ValidationError as exc:
        console.print(f"[red]Invalid input:[/red] {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
