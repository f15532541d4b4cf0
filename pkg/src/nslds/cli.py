"""Command line entry point: ``nslds solve | suite | check``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench, rna, tsptw

log = logging.getLogger("nslds")


def _int_list(text: str):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _on_off(text: str) -> bool:
    try:
        return bench._on_off(text)
    except bench.SpecError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nslds", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run one search and print a report row")
    s.add_argument("--problem", required=True, choices=bench.PROBLEMS)
    s.add_argument("--algo", default="ns", choices=bench.ALGOS)
    s.add_argument("--level", type=int, default=1)
    s.add_argument("--instance", help="tsptw instance file or rna puzzle file")
    s.add_argument("--puzzle", help="puzzle name inside an rna puzzle file")
    s.add_argument("--target", help="rna dot-bracket target given inline")
    s.add_argument("--locks", help="rna lock string (N = free)")
    s.add_argument("--order", type=int, help="latin square order")
    s.add_argument("--var", choices=("dom", "deg"))
    s.add_argument("--sym", type=_on_off, metavar="on|off")
    s.add_argument("--mac", type=_on_off, metavar="on|off")
    s.add_argument("--dimension", type=int, help="snake hypercube dimension")
    s.add_argument("--start-path", type=_int_list, help="snake start path, e.g. 0,1,3")
    s.add_argument("--timeout", type=float, default=None,
                   help=f"seconds (default: ${bench.TIMEOUT_ENV} or unlimited)")
    s.add_argument("--budget", type=int, default=0, help="maximum moves played")
    s.add_argument("--format", default="table", choices=sorted(bench.EMITTERS))
    s.add_argument("--show-solution", action="store_true")

    u = sub.add_parser("suite", help="run every spec of a JSON manifest")
    u.add_argument("manifest")
    u.add_argument("--parallel", type=int, default=1)
    u.add_argument("--format", default="table", choices=sorted(bench.EMITTERS))
    u.add_argument("--output", help="write the report here instead of stdout")

    c = sub.add_parser("check", help="validate an instance file")
    c.add_argument("--problem", required=True, choices=("tsptw", "rna"))
    c.add_argument("path")
    return p


def _solve(args) -> int:
    spec = bench.RunSpec(
        problem=args.problem, algo=args.algo, level=args.level,
        instance=args.instance, puzzle=args.puzzle, target=args.target,
        locks=args.locks, order=args.order, var=args.var, sym=args.sym,
        mac=args.mac, dimension=args.dimension, start_path=args.start_path,
        max_seconds=args.timeout, step_budget=args.budget,
    )
    spec.validate()
    row, result = bench.execute(spec)
    sys.stdout.write(bench.emit([row], args.format))
    if args.show_solution or (args.problem == "latin" and result.solved):
        sys.stdout.write(bench.render_solution(result.best_state) + "\n")
    return 0


def _suite(args) -> int:
    specs = bench.load_manifest(args.manifest)
    rows = bench.run_suite(specs, args.parallel)
    text = bench.emit(rows, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    errors = [r for r in rows if r.error]
    for r in errors:
        log.error("%s %s(%d): %s", r.instance, r.algo, r.level, r.error)
    return 1 if errors else 0


def _check(args) -> int:
    text = Path(args.path).read_text()
    if args.problem == "tsptw":
        inst = tsptw.load_tsptw(text, name=Path(args.path).stem)
        print(f"ok: {inst.name}, {inst.n} cities")
    else:
        puzzles = rna.load_puzzles(text)
        for p in puzzles:
            print(f"ok: {p.name}, length {len(p)}, {len(p.pairs) // 2} pairs")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "solve":
            return _solve(args)
        if args.command == "suite":
            return _suite(args)
        return _check(args)
    except bench.SpecError as exc:
        parser.error(str(exc))
    except (OSError, ValueError) as exc:
        print(f"nslds: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
