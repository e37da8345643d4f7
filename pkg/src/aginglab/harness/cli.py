"""Command-line entry point.

Subcommands: ``run <config>``, ``compare <csv> <tolspec>``,
``table <function> <grid>``.  Exit codes: 0 ok, 1 comparison failure,
2 config error.  AGINGLAB_WORKERS sets the default worker count.
"""

from __future__ import annotations

import argparse
import sys

from .compare import compare
from .config import ConfigError
from .csvio import ResultRow, write_rows
from .experiments import _TABLE_FUNCTIONS
from .runner import run

EXIT_OK = 0
EXIT_COMPARISON_FAILED = 1
EXIT_CONFIG_ERROR = 2


def _cmd_run(args) -> int:
    path = run(args.config, output_override=args.output, workers_override=args.workers)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    verdicts, ok = compare(args.results, args.tolspec)
    for v in verdicts:
        print(v.line())
    print(f"{'OK' if ok else 'COMPARISON FAILED'}: {sum(v.passed for v in verdicts)}/{len(verdicts)} rows pass")
    return EXIT_OK if ok else EXIT_COMPARISON_FAILED


def _cmd_table(args) -> int:
    fn = _TABLE_FUNCTIONS.get(args.function)
    if fn is None:
        raise ConfigError(f"unknown table function {args.function!r} "
                          f"(available: {sorted(k for k, v in _TABLE_FUNCTIONS.items() if v)})")
    try:
        grid = [float(v) for v in args.grid.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"grid must be a comma-separated list of numbers, got {args.grid!r}") from None
    if not grid:
        raise ConfigError("grid is empty")
    rows = [
        ResultRow(experiment=f"table.{args.function}", params=f"a={a!r}", estimate=fn(a))
        for a in grid
    ]
    if args.output:
        write_rows(args.output, rows)
        print(f"wrote {args.output}")
    else:
        for r in rows:
            print(f"{args.function}({r.params.partition('=')[2]}) = {r.estimate!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aginglab",
        description="Two-time aging experiments for stationary growth models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config and write its CSV")
    p_run.add_argument("config")
    p_run.add_argument("-o", "--output", help="override the configured output path")
    p_run.add_argument("-w", "--workers", type=int, help="override the worker count")
    p_run.set_defaults(fn=_cmd_run)

    p_cmp = sub.add_parser("compare", help="check a results CSV against a tolerance spec")
    p_cmp.add_argument("results")
    p_cmp.add_argument("tolspec")
    p_cmp.set_defaults(fn=_cmd_compare)

    p_tab = sub.add_parser("table", help="tabulate a closed-form function on a grid")
    p_tab.add_argument("function", help="rho_kpz or rho_ew")
    p_tab.add_argument("grid", help="comma-separated ratios, e.g. 1,1.5,2,4")
    p_tab.add_argument("-o", "--output", help="write CSV instead of printing")
    p_tab.set_defaults(fn=_cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
