"""Command line driver.

    parasolv verify --series A --rank 2 --all-subsets
    parasolv verify --series A --rank 1 --series A --rank 2 --subset 0 --format csv
    parasolv enumerate --series F --rank 4
    parasolv export --input run.json --format csv --out run.csv
    parasolv dump-realization --series G --rank 2 --out g2.json

Exit codes: 0 success, 1 a verification check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .parabolic import SubsetSelection, all_subsets
from .realization import dump_realization
from .rootsystem import InputError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _algebra_options(p):
    g = p.add_argument_group("algebra")
    g.add_argument("--series", action="append", default=[], help="simple type letter A-G; repeat for a semisimple sum")
    g.add_argument("--rank", action="append", default=[], type=int, help="rank for the matching --series")
    g.add_argument("--form", choices=("split", "complexified"), default="split")
    g.add_argument("--realization", metavar="FILE", help="JSON realization file instead of --series/--rank")


def _subset_options(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--subset", metavar="I,J,...", help="comma-separated 0-based simple-root indices (empty string for the empty set)")
    g.add_argument("--all-subsets", action="store_true", help="every subset, in size-then-lexicographic order")


def _output_options(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="PATH", help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="parasolv", description="Verify curvature properties of solvable parts of parabolic subalgebras.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run every check on one or all subsets")
    _algebra_options(v)
    _subset_options(v)
    v.add_argument("--scalar", choices=("exact", "float"), help="default: exact up to dimension 80, float above")
    v.add_argument("--tol", type=_positive_float, help="relative tolerance in float mode (default 1e-9)")
    v.add_argument("--threads", type=_positive_int, default=1, help="worker processes")
    v.add_argument("--no-lemma", action="store_true", help="skip the nilradical Ricci difference check")
    _output_options(v)

    e = sub.add_parser("enumerate", help="dimensions and gradation data without curvature")
    _algebra_options(e)
    _subset_options(e)
    _output_options(e)

    x = sub.add_parser("export", help="convert a JSON record file to json or csv")
    x.add_argument("--input", required=True, metavar="FILE")
    _output_options(x)

    d = sub.add_parser("dump-realization", help="write a builtin realization as a JSON file")
    _algebra_options(d)
    d.add_argument("--out", required=True, metavar="PATH")
    return parser


def algebra_spec(args) -> pipeline.AlgebraSpec:
    if args.realization:
        if args.series or args.rank:
            raise InputError("--realization cannot be combined with --series/--rank")
        return pipeline.AlgebraSpec(realization_path=args.realization)
    if not args.series:
        raise InputError("give --series and --rank, or --realization")
    if len(args.series) != len(args.rank):
        raise InputError("each --series needs a matching --rank")
    return pipeline.AlgebraSpec(tuple((s.upper(), n) for s, n in zip(args.series, args.rank)), args.form)


def selected_subsets(args, rank: int) -> list:
    if getattr(args, "all_subsets", False):
        return all_subsets(rank, include_full=True)
    if args.subset is None:
        return [()]
    full = tuple(range(rank))
    try:
        idx = tuple(sorted({int(t) for t in args.subset.split(",") if t.strip()}))
    except ValueError:
        idx = None
    if idx == full:
        return [full]  # reported as skipped, not rejected
    return [tuple(sorted(SubsetSelection.parse(rank, args.subset).indices))]


def _emit(text: str, out) -> None:
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _render(records, fmt) -> str:
    return pipeline.records_to_json(records) if fmt == "json" else pipeline.records_to_csv(records)


def cmd_verify(args) -> int:
    spec = algebra_spec(args)
    r = spec.build()
    subsets = selected_subsets(args, r.rank)
    records = pipeline.run(spec, subsets, args.scalar, args.tol, args.threads, lemma=not args.no_lemma)
    _emit(_render(records, args.format), args.out)
    failed = [rec for rec in records if rec.status == "fail"]
    for rec in records:
        print(f"{rec.algebra} {rec.subset}: {rec.status}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_enumerate(args) -> int:
    spec = algebra_spec(args)
    r = spec.build()
    subsets = all_subsets(r.rank) if args.subset is None else selected_subsets(args, r.rank)
    rows = pipeline.enumerate_subsets(r, subsets)
    if args.format == "json":
        text = json.dumps({"schema_version": pipeline.SCHEMA_VERSION, "subsets": rows}, indent=2) + "\n"
    else:
        cols = ("algebra", "subset", "dim_g", "dim_a", "dim_n", "dim_m", "nu", "nilpotency")
        lines = [",".join(cols)]
        for row in rows:
            vals = [('"' + ",".join(map(str, row[c])) + '"') if c == "subset" else str(row[c]) for c in cols]
            lines.append(",".join(vals))
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_export(args) -> int:
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from exc
    records = pipeline.records_from_json(text)
    _emit(_render(records, args.format), args.out)
    return EXIT_OK


def cmd_dump(args) -> int:
    spec = algebra_spec(args)
    if spec.realization_path:
        raise InputError("dump-realization writes builtin algebras only")
    try:
        dump_realization(spec.build(), args.out)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "enumerate": cmd_enumerate, "export": cmd_export, "dump-realization": cmd_dump}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"parasolv: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
