"""Command-line entry point: solve, bench, oracle, fleet and convert."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .engine import Params, Summary, run_many
from .io import (BksRegistry, ParseError, convert_legacy, fleet_block, format_solution, gap,
                 iter_suite, read_instance)
from .model import Instance, Variant, normalize_fleet
from .oracle import exact_solve

log = logging.getLogger("ails_hfvrp")


class CliError(Exception):
    """A user-facing failure; reported without a traceback."""


def _variant(text: str) -> Variant:
    try:
        return Variant.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_search_options(p: argparse.ArgumentParser) -> None:
    defaults = Params()
    p.add_argument("--variant", type=_variant, required=True,
                   help="HVRPFD, HVRPD, FSMFD, FSMF or FSMD")
    p.add_argument("--runs", type=int, default=10, help="independent runs (default 10)")
    p.add_argument("--seed", type=int, default=0, help="seed of the first run; run k uses seed+k")
    p.add_argument("--max-no-improve", type=int, default=defaults.max_no_improve,
                   help="stop after this many iterations without a new best")
    p.add_argument("--max-iterations", type=int, default=None, help="hard iteration cap")
    p.add_argument("--time-limit", type=float, default=None, help="seconds per run")
    p.add_argument("--alpha", type=float, default=defaults.alpha,
                   help="probability of route-count and fleet mutation")
    p.add_argument("--dbeta", type=int, default=defaults.d_beta,
                   help="target distance between perturbed and reference solution")
    p.add_argument("--eta", type=float, default=defaults.eta, help="acceptance threshold fraction")
    p.add_argument("--gamma", type=int, default=defaults.gamma,
                   help="uses between perturbation-degree adjustments")
    p.add_argument("--phi", type=int, default=defaults.phi, help="nearest neighbors per vertex")
    p.add_argument("--workers", type=int, default=1, help="parallel processes for the runs")
    p.add_argument("--bks", type=Path, default=None,
                   help="extra best-known costs, lines of 'name variant cost'")
    p.add_argument("--no-timing", action="store_true",
                   help="print '-' instead of wall-clock times (byte-stable reports)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ails-hfvrp",
        description="Adaptive iterated local search for heterogeneous fleet vehicle routing.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance")
    p.add_argument("--instance", type=Path, required=True)
    _add_search_options(p)
    p.add_argument("--solution-out", type=Path, default=None, help="write the best solution here")
    p.add_argument("--trace", type=Path, default=None, help="write per-iteration records here")

    p = sub.add_parser("bench", help="solve every instance of a directory and tabulate")
    p.add_argument("--suite", type=Path, required=True)
    _add_search_options(p)

    p = sub.add_parser("oracle", help="exact optimum of an instance with at most 8 customers")
    p.add_argument("--instance", type=Path, required=True)
    p.add_argument("--variant", type=_variant, required=True)

    p = sub.add_parser("fleet", help="print the vehicle block of a benchmark instance")
    p.add_argument("name", help="instance name, e.g. 13 or N5")

    p = sub.add_parser("convert", help="convert a legacy instance file to the native format")
    p.add_argument("source", type=Path)
    p.add_argument("--name", default=None)
    p.add_argument("--variant", type=_variant, default=None)
    p.add_argument("--out", type=Path, default=None)
    return parser


def _params(args) -> Params:
    try:
        return Params(alpha=args.alpha, d_beta=args.dbeta, eta=args.eta, gamma=args.gamma,
                      phi=args.phi, max_no_improve=args.max_no_improve, seed=args.seed,
                      time_limit=args.time_limit, max_iterations=args.max_iterations,
                      trace=getattr(args, "trace", None) is not None)
    except ValueError as exc:
        raise CliError(f"invalid parameter: {exc}") from None


def _load(path: Path, variant: Variant) -> Instance:
    try:
        return normalize_fleet(read_instance(path, variant))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from None
    except ParseError as exc:
        raise CliError(f"{path}: {exc}") from None
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None


def _registry(args) -> BksRegistry:
    try:
        reg = BksRegistry.default()
        if args.bks is not None:
            reg.extend(args.bks)
    except (OSError, ParseError) as exc:
        raise CliError(f"cannot load best-known costs: {exc}") from None
    return reg


def _time(seconds: float, args) -> str:
    return "-" if args.no_timing else f"{seconds:.2f}"


def _solve_many(instance: Instance, args) -> Summary:
    if args.runs < 1:
        raise CliError("--runs must be at least 1")
    if args.workers < 1:
        raise CliError("--workers must be at least 1")
    return run_many(instance, _params(args), args.runs, workers=args.workers)


def cmd_solve(args, out) -> int:
    instance = _load(args.instance, args.variant)
    registry = _registry(args)
    summary = _solve_many(instance, args)
    for k, r in enumerate(summary.results, start=1):
        line = (f"run {k}: seed {r.seed} best {r.best_cost:.2f} "
                f"iterations {r.iterations} time {_time(r.time, args)}")
        if r.diagnostic:
            line += f" ({r.diagnostic})"
        print(line, file=out)
    bks = registry.lookup(instance.name, instance.variant)
    gap_text = "n/a" if bks is None else f"{gap(summary.avg, bks):.4f}"
    print(f"instance: {instance.name} variant: {instance.variant.value} "
          f"best: {summary.best:.2f} avg: {summary.avg:.2f} "
          f"time: {_time(summary.avg_time, args)} gap: {gap_text}", file=out)

    if args.solution_out is not None:
        args.solution_out.write_text(format_solution(summary.best_result.best_solution))
    if args.trace is not None:
        lines = []
        for k, r in enumerate(summary.results, start=1):
            lines.append(f"# run {k} seed {r.seed}")
            lines.append("iter,f,fbest,heuristic,omega,accepted")
            lines.extend(rec.line() for rec in r.trace)
        args.trace.write_text("\n".join(lines) + "\n")
    return 0


def bench_table(rows: Sequence[tuple]) -> str:
    """Aligned table from rows of (name, bks or None, avg, best, time text)."""
    header = ("Inst", "BKS", "Avg (gap)", "Best", "Time")
    body = []
    gaps = []
    times = []
    for name, bks, avg, best, time_text in rows:
        if bks is None:
            avg_text = f"{avg:.2f} (n/a)"
            bks_text = "-"
        else:
            g = round(gap(avg, bks), 4)
            gaps.append(g)
            avg_text = f"{avg:.2f} ({g:.4f})"
            bks_text = f"{bks:.2f}"
        body.append((name, bks_text, avg_text, f"{best:.2f}", time_text))
        times.append(time_text)
    gap_footer = f"({sum(gaps) / len(gaps):.4f})" if gaps else "(n/a)"
    if all(t == "-" for t in times):
        time_footer = "-"
    else:
        time_footer = f"{sum(float(t) for t in times) / len(times):.2f}"
    footer = ("Avg", "", gap_footer, "", time_footer)
    table = [header] + body + [footer]
    widths = [max(len(row[c]) for row in table) for c in range(len(header))]

    def fmt(row):
        cells = [row[0].ljust(widths[0])] + [row[c].rjust(widths[c]) for c in range(1, len(row))]
        return "  ".join(cells).rstrip()

    rule = "-" * len(fmt(header))
    return "\n".join([fmt(header), rule] + [fmt(r) for r in body] + [rule, fmt(footer)]) + "\n"


def cmd_bench(args, out) -> int:
    if not args.suite.is_dir():
        raise CliError(f"{args.suite} is not a directory")
    files = list(iter_suite(args.suite))
    if not files:
        raise CliError(f"suite {args.suite} contains no instance files")
    registry = _registry(args)
    rows = []
    for path in files:
        instance = _load(path, args.variant)
        log.info("solving %s", instance.name)
        summary = _solve_many(instance, args)
        rows.append((instance.name, registry.lookup(instance.name, instance.variant),
                     summary.avg, summary.best, _time(summary.avg_time, args)))
    out.write(bench_table(rows))
    return 0


def cmd_oracle(args, out) -> int:
    instance = _load(args.instance, args.variant)
    try:
        cost, solution = exact_solve(instance)
    except (ValueError, RuntimeError) as exc:
        raise CliError(str(exc)) from None
    print(f"instance: {instance.name} variant: {instance.variant.value} optimum: {cost:.6f}",
          file=out)
    out.write(format_solution(solution))
    return 0


def cmd_fleet(args, out) -> int:
    try:
        out.write(fleet_block(args.name))
    except KeyError as exc:
        raise CliError(exc.args[0]) from None
    return 0


def cmd_convert(args, out) -> int:
    try:
        text = convert_legacy(args.source.read_text(), args.name or args.source.stem,
                              args.variant)
    except OSError as exc:
        raise CliError(f"cannot read {args.source}: {exc.strerror or exc}") from None
    except ParseError as exc:
        raise CliError(f"{args.source}: {exc}") from None
    if args.out is None:
        out.write(text)
    else:
        args.out.write_text(text)
    return 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "oracle": cmd_oracle,
            "fleet": cmd_fleet, "convert": cmd_convert}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
