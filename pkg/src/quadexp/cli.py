"""Command line interface: case runner, range runner, symbolic suites.

Exit codes: 0 the run completed (whatever the verdicts), 1 input error,
2 internal error.
"""

from __future__ import annotations

import json
import sys

import click

from .errors import NotSquareFree, QuadexpError
from .pipeline import CaseParams, run_case, run_range, verify_symbolic

_CASE_OPTIONS = [
    click.option("--precision-bits", type=int, default=512, show_default=True),
    click.option("--deg-bound", type=int, default=None,
                 help="degree bound for recognition (default: twice the field degree)"),
    click.option("--height-bound", type=int, default=10**40, show_default=False,
                 help="coefficient height bound for recognition (default 10^40)"),
    click.option("--conductor-direction",
                 type=click.Choice(["real-to-imag", "imag-to-real"]),
                 default="real-to-imag", show_default=True),
    click.option("--search-bound", type=int, default=100, show_default=True),
    click.option("--cache-dir", type=click.Path(), default=None,
                 help="class polynomial cache directory"),
    click.option("--given-conductor", type=int, default=1, show_default=True,
                 help="conductor of the given side of the match"),
    click.option("--skip-recognition", is_flag=True, default=False,
                 help="stop after the arithmetic stage and J evaluation"),
    click.option("--json", "json_path", type=click.Path(), default=None,
                 help="write the full report(s) to this file"),
]


def _with_case_options(cmd):
    for opt in reversed(_CASE_OPTIONS):
        cmd = opt(cmd)
    return cmd


def _params(precision_bits, deg_bound, height_bound, conductor_direction,
            search_bound, cache_dir, given_conductor, skip_recognition) -> CaseParams:
    return CaseParams(precision_bits=precision_bits,
                      deg_bound=deg_bound,
                      height_bound=height_bound,
                      conductor_direction=conductor_direction,
                      search_bound=search_bound,
                      cache_dir=cache_dir,
                      given_conductor=given_conductor,
                      recognition=not skip_recognition)


@click.group()
def main():
    """Arithmetic verification runs for exponential values on quadratic fields."""


@main.command()
@click.argument("d", type=int)
@_with_case_options
def case(d, json_path, **opts):
    """Run the full experiment for one square-free integer D."""
    try:
        report = run_case(d, _params(**opts))
    except NotSquareFree as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(1)
    except QuadexpError as exc:
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(2)
    payload = report.dumps()
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        click.echo(f"report written to {json_path}")
    else:
        click.echo(payload)
    click.echo(f"verdict: {report.verdict()}", err=True)


@main.command(name="range")
@click.argument("d_min", type=int)
@click.argument("d_max", type=int)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="write the summary table to this file")
@_with_case_options
def range_cmd(d_min, d_max, workers, csv_path, json_path, **opts):
    """Run all square-free d in [D_MIN, D_MAX]."""
    try:
        summary = run_range(d_min, d_max, _params(**opts), workers=workers)
    except QuadexpError as exc:
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(2)
    if json_path:
        blob = [r.to_json() for r in summary.reports]
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(blob, fh, sort_keys=True, indent=2)
        click.echo(f"{len(summary.reports)} reports written to {json_path}")
    table = summary.csv()
    if csv_path:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(table)
        click.echo(f"summary table written to {csv_path}")
    else:
        click.echo(table, nl=False)
    click.echo(json.dumps(summary.counts(), sort_keys=True), err=True)


@main.command()
@click.argument("suite", type=click.Choice(["remark1", "lemma1", "lemma2", "jacobi"]))
@click.option("--json", "json_path", type=click.Path(), default=None)
def symbolic(suite, json_path):
    """Run one of the fixed symbolic verification suites."""
    try:
        checks = verify_symbolic(suite)
    except QuadexpError as exc:
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(2)
    for c in checks:
        click.echo(f"{'PASS' if c.passed else 'FAIL'}  {c.name}")
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump([c.to_json() for c in checks], fh, sort_keys=True, indent=2)
    sys.exit(0)


if __name__ == "__main__":
    main()
