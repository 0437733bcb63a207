"""Command-line surface tying the pipeline together.

Every subcommand emits machine-readable CSV on stdout (or to ``--out``);
``--pretty`` swaps in an aligned human-readable table.  Exit codes: 0 on
success, 1 for input problems, 2 for numeric failures.
"""

from __future__ import annotations

import csv
import io
from dataclasses import replace
from pathlib import Path

import click

from . import campaign_io, econ
from .errors import InputError, InvalidParameters, NumericError
from .experiments import (
    campaign_count_grid,
    default_scenario,
    load_scenario,
    noise_grid,
    simulate_scenario,
)
from .infer import assign_ranks, quality_report
from .rank import rank_sources


def _prettify(csv_text: str) -> str:
    rows = list(csv.reader(io.StringIO(csv_text)))
    if not rows:
        return ""
    cells = []
    for row in rows:
        pretty_row = []
        for cell in row:
            try:
                pretty_row.append(f"{float(cell):.6g}" if "." in cell or "e" in cell else cell)
            except ValueError:
                pretty_row.append(cell)
        cells.append(pretty_row)
    widths = [max(len(r[i]) for r in cells if i < len(r)) for i in range(len(cells[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _deliver(text: str, out: str | None, pretty: bool) -> None:
    if pretty:
        text = _prettify(text)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _scenario(path: str | None):
    return load_scenario(path) if path else default_scenario()


@click.group()
@click.version_option(package_name="tagaudit")
def cli():
    """Assess user-tagging data sources from aggregate campaign reports."""


@cli.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True), default=None,
              help="Scenario YAML; defaults to the built-in 100-user protocol.")
@click.option("--campaigns", type=int, default=None, help="Campaigns per trial.")
@click.option("--trials", type=int, default=None, help="Trials per profile.")
@click.option("--zeta", type=float, default=0.0, help="Profile noise half-width, 0 to 0.35.")
@click.option("--seed", type=int, default=None, help="Override the scenario base seed.")
@click.option("--out", type=click.Path(), default=None, help="Write output to a file.")
@click.option("--pretty", is_flag=True, help="Human-readable table instead of CSV.")
def simulate(scenario_path, campaigns, trials, zeta, seed, out, pretty):
    """Generate synthetic campaign aggregates with known profiles."""
    if not 0.0 <= zeta <= 0.35:
        raise InvalidParameters(f"--zeta must lie in [0, 0.35], got {zeta}")
    scenario = _scenario(scenario_path)
    if seed is not None:
        scenario = replace(scenario, base_seed=seed)
    rows = simulate_scenario(scenario, n_campaigns=campaigns, trials=trials, zeta=zeta)
    _deliver(campaign_io.emit_campaigns(rows), out, pretty)


@cli.command()
@click.argument("campaign_file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None)
@click.option("--pretty", is_flag=True)
def rank(campaign_file, out, pretty):
    """Rank the sources in a campaign file by mean relative error."""
    per_source = campaign_io.parse_campaign_file(campaign_file)
    entries = rank_sources(per_source)
    _deliver(campaign_io.emit_rank_table(entries), out, pretty)


@cli.command()
@click.argument("campaign_file", type=click.Path(exists=True))
@click.option("--xi", type=float, default=0.05, show_default=True,
              help="Unbiasedness slack |alpha1 - beta2| <= xi.")
@click.option("--delta", type=float, default=0.05, show_default=True,
              help="Interval miss probability; level is 1 - delta.")
@click.option("--normalize/--no-normalize", default=True, show_default=True,
              help="Scale each campaign's residuals by its population.")
@click.option("--out", type=click.Path(), default=None)
@click.option("--pretty", is_flag=True)
def infer(campaign_file, xi, delta, normalize, out, pretty):
    """Infer each source's nine predictive values from a campaign file."""
    per_source = campaign_io.parse_campaign_file(campaign_file)
    reports = [
        quality_report(source_id, campaigns, xi=xi, delta=delta, normalize=normalize)
        for source_id, campaigns in per_source.items()
    ]
    _deliver(campaign_io.emit_quality_reports(assign_ranks(reports)), out, pretty)


@cli.command()
@click.option("--categories", type=int, required=True, help="Number of source categories.")
@click.option("--margin", type=float, default=0.05, show_default=True)
@click.option("--significance", type=float, default=0.05, show_default=True)
@click.option("--power", type=float, default=0.90, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--pretty", is_flag=True)
def plan(categories, margin, significance, power, out, pretty):
    """Impressions needed to evaluate one source by brute force."""
    p = econ.plan_sample_size(categories, margin, significance, power)
    text = campaign_io.emit_grid(
        ("categories", "margin", "significance", "power", "required_impressions"),
        [(p.categories, p.margin, p.significance, p.power, p.required_impressions)],
    )
    _deliver(text, out, pretty)


@cli.command()
@click.option("--cpi", type=float, required=True, help="Effective cost per impression.")
@click.option("--alpha1-data", type=float, required=True, help="Paid source precision.")
@click.option("--alpha1-free", type=float, required=True, help="Free targeting precision.")
@click.option("--out", type=click.Path(), default=None)
@click.option("--pretty", is_flag=True)
def breakeven(cpi, alpha1_data, alpha1_free, out, pretty):
    """Largest per-impression data cost a paid source is worth."""
    threshold = econ.max_data_cpi(cpi, alpha1_data, alpha1_free)
    text = campaign_io.emit_grid(
        ("cpi", "alpha1_data", "alpha1_free", "max_data_cpi"),
        [(cpi, alpha1_data, alpha1_free, threshold)],
    )
    _deliver(text, out, pretty)


@cli.command()
@click.option("--tags", "tags_path", type=click.Path(exists=True), required=True,
              help="Per-user tag file (user_id, tags).")
@click.option("--table", "table_path", type=click.Path(exists=True), required=True,
              help="Precision table (category, precision).")
@click.option("--combiner", type=click.Choice(["max", "min", "mean", "median"]),
              default="mean", show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--pretty", is_flag=True)
def forecast(tags_path, table_path, combiner, out, pretty):
    """Expected number of targeted users in the desired category."""
    users = campaign_io.parse_tag_file(tags_path)
    table = campaign_io.parse_precision_table(table_path)
    expected = econ.forecast_category((tags for _, tags in users), table, combiner)
    text = campaign_io.emit_grid(
        ("n_users", "combiner", "expected_count"),
        [(len(users), combiner, expected)],
    )
    _deliver(text, out, pretty)


@cli.command()
@click.option("--figure", type=click.Choice(["3", "4"]), required=True,
              help="3: error vs campaign count; 4: error vs noise.")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True), default=None,
              help="Scenario YAML; defaults to the built-in 100-user protocol.")
@click.option("--seed", type=int, default=None, help="Override the scenario base seed.")
@click.option("--out", type=click.Path(), default=None)
@click.option("--plot", "plot_path", type=click.Path(), default=None,
              help="Render the grid as an image here (with --out, defaults to a "
                   "sibling .png).")
@click.option("--no-plot", is_flag=True, help="Skip image rendering entirely.")
@click.option("--pretty", is_flag=True)
def figures(figure, scenario_path, seed, out, plot_path, no_plot, pretty):
    """Emit a study grid as delimited text, rendered alongside."""
    scenario = _scenario(scenario_path)
    if seed is not None:
        scenario = replace(scenario, base_seed=seed)
    if figure == "3":
        rows = campaign_count_grid(scenario)
        header = ("num_campaigns", "profile", "mean_abs_precision_err")
        x_label = "number of campaigns"
    else:
        rows = noise_grid(scenario)
        header = ("zeta", "profile", "mean_abs_precision_err")
        x_label = "noise half-width"
    if plot_path is None and out and not no_plot:
        plot_path = str(Path(out).with_suffix(".png"))
    if plot_path and not no_plot:
        from .plots import render_error_grid

        render_error_grid(rows, x_label=x_label, out_path=plot_path)
    _deliver(campaign_io.emit_grid(header, rows), out, pretty)


def main(argv=None) -> int:
    """Entry point with the exit-code contract (0 ok, 1 input, 2 numeric)."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.exceptions.Abort:
        return 1
    except InputError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 1
    except NumericError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
