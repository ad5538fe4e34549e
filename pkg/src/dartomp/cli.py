"""Command-line driver.

Four modes over one input file:

    dart-omp transform FILE   analyze and write the annotated source
    dart-omp report FILE      print the planned directives without writing
    dart-omp simulate FILE    account transfers and stale reads as-is
    dart-omp compare FILE     price per-launch defaults against the plan

Exit codes: 0 success, 1 diagnosable input problem, 2 internal failure.
"""
from __future__ import annotations

import argparse
import os
import sys

from .astcfg import dump_cfg
from .access import dump_accesses
from .diagnostics import ConfigError, InternalError, ToolError
from .pipeline import (Analysis, compare, load, simulate_analysis, transform)
from .report import (comparison_lines, plan_lines, simulation_lines,
                     write_comparison_plot)
from .simulator import MODE_ANNOTATED, MODE_IMPLICIT, SimConfig


def _parse_sizes(pairs: list[str]) -> dict[str, int]:
    sizes: dict[str, int] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise ConfigError("--size expects NAME=COUNT, got %r" % pair)
        try:
            sizes[name] = int(value, 0)
        except ValueError:
            raise ConfigError("--size %s: %r is not an integer"
                              % (name, value))
        if sizes[name] < 0:
            raise ConfigError("--size %s must be non-negative" % name)
    return sizes


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dart-omp",
        description="Plan and insert OpenMP device data-mapping directives, "
                    "and account the transfers they cause.")
    sub = ap.add_subparsers(dest="mode", required=True)
    for mode, help_text in (
            ("transform", "write a copy of FILE with mapping directives"),
            ("report", "print the directive plan without writing"),
            ("simulate", "replay FILE and print its transfer log"),
            ("compare", "simulate per-launch defaults vs the planned "
                        "mapping")):
        p = sub.add_parser(mode, help=help_text)
        p.add_argument("input", metavar="FILE")
        p.add_argument("-o", "--output", metavar="PATH",
                       help="transform: rewritten file; other modes: report "
                            "destination (default stdout)")
        p.add_argument("--size", action="append", default=[],
                       metavar="NAME=COUNT",
                       help="element count for a pointer variable "
                            "(repeatable)")
        p.add_argument("--trip-default", type=int, default=1, metavar="K",
                       help="iteration count assumed for loops with "
                            "unresolvable bounds")
        p.add_argument("--allow-stale", action="append", default=[],
                       metavar="VAR",
                       help="do not insert updates for VAR; its stale reads "
                            "are accepted (repeatable)")
        p.add_argument("--pointer-default", type=int, default=1024,
                       metavar="COUNT",
                       help="element count for pointers without a --size "
                            "binding")
        p.add_argument("--dump-cfg", action="store_true",
                       help="print each function's control-flow graph")
        p.add_argument("--dump-accesses", action="store_true",
                       help="print the classified memory accesses")
        p.add_argument("-v", "--verbose", action="store_true")
        if mode == "simulate":
            p.add_argument("--mode", dest="sim_mode", default=MODE_ANNOTATED,
                           choices=[MODE_IMPLICIT, MODE_ANNOTATED],
                           help="honor the input's mapping directives, or "
                                "ignore them and charge per-launch defaults")
        if mode == "compare":
            p.add_argument("--plot", metavar="PNG", nargs="?", const="",
                           help="render the comparison as a bar chart "
                                "(default: next to the report)")
    return ap


def _emit(lines: list[str], output: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(args, analysis: Analysis) -> None:
    if args.dump_cfg:
        for name, cfg in analysis.cfgs.items():
            print("cfg %s" % name)
            print(dump_cfg(analysis.src, cfg, indent="  "))
    if args.dump_accesses:
        for name in analysis.cfgs:
            print("accesses %s" % name)
            print(dump_accesses(analysis.src, analysis.accesses[name]))


def default_output_path(input_path: str) -> str:
    stem, ext = os.path.splitext(input_path)
    return stem + ".ompdart" + (ext or ".c")


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sizes = _parse_sizes(args.size)
        allow_stale = frozenset(args.allow_stale)
        analysis = load(path=args.input, sizes=sizes,
                        pointer_default=args.pointer_default)
        for w in analysis.warnings:
            print(w.render(), file=sys.stderr)
        _dumps(args, analysis)
        sim_config = SimConfig(sizes=sizes,
                               default_trip=args.trip_default,
                               mode=getattr(args, "sim_mode", MODE_ANNOTATED),
                               pointer_default=args.pointer_default)

        if args.mode == "transform":
            result, plans = transform(analysis, allow_stale)
            out_path = args.output or default_output_path(args.input)
            with open(out_path, "w") as fh:
                fh.write(result.text)
            print("wrote %s" % out_path)
            _emit(plan_lines(analysis.src, plans), None)
        elif args.mode == "report":
            _, plans = transform(analysis, allow_stale)
            _emit(plan_lines(analysis.src, plans), args.output)
        elif args.mode == "simulate":
            report = simulate_analysis(analysis, sim_config)
            _emit(simulation_lines(report, verbose=args.verbose),
                  args.output)
        else:
            base, mapped, _ = compare(analysis, sim_config, allow_stale)
            _emit(comparison_lines(base, mapped), args.output)
            plot = args.plot
            if plot is not None or args.output:
                if not plot:
                    target = args.output or default_output_path(args.input)
                    plot = os.path.splitext(target)[0] + ".png"
                write_comparison_plot(base, mapped, plot)
                print("plot written to %s" % plot, file=sys.stderr)
    except ToolError as err:
        print(err.render(), file=sys.stderr)
        return 1
    except OSError as err:
        print("error: %s" % err, file=sys.stderr)
        return 1
    except InternalError as err:
        print("internal error: %s" % err, file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
