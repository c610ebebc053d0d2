"""Command line interface for the certification pipeline.

Subcommands:
  prove     run the exclusion pipeline for one rank (or ranks 2..8)
  optimize  run one of the parameter grid searches
  verify    re-check a previously emitted JSON report
  field     inspect one catalog field (zeta values, units, splitting)

Exit codes: 0 all proved, 2 a step failed, 3 data missing, 4 an
unresolved tie at maximum precision.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds, certifier, numberfields, optimizer

EXIT_OK = 0
EXIT_STEP_FAILED = 2
EXIT_DATA_MISSING = 3
EXIT_TIE = 4


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--odlyzko", help="path to the bound-pair table", default=None)
    p.add_argument("--fields", help="path to the field catalog", default=None)
    p.add_argument(
        "--precision", type=int, default=256, help="working precision in bits"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covcert",
        description="certified verification of minimal-covolume lattice bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    prove = sub.add_parser("prove", help="run the pipeline for one or all ranks")
    prove.add_argument("--n", type=int, default=None, help="rank to certify")
    prove.add_argument(
        "--all", action="store_true", help="certify every rank from 2 to 8"
    )
    prove.add_argument(
        "--format", choices=("json", "text"), default="text", dest="fmt"
    )
    _add_data_args(prove)

    opt = sub.add_parser("optimize", help="run a parameter grid search")
    opt.add_argument("--case", choices=("n2", "n3"), required=True)
    _add_data_args(opt)

    verify = sub.add_parser("verify", help="re-check a JSON report")
    verify.add_argument("report", help="path to the report file")

    fld = sub.add_parser("field", help="inspect one catalog field")
    fld.add_argument("label", help="catalog label, e.g. 2.2.5.1")
    fld.add_argument("--op", choices=("zeta", "units", "splitting"), required=True)
    fld.add_argument("--s", type=int, default=2, help="zeta argument (even)")
    fld.add_argument("--p", type=int, default=2, help="prime for splitting")
    _add_data_args(fld)

    return parser


def _cmd_prove(args) -> int:
    ranks = range(2, 9) if args.all else [args.n if args.n is not None else 2]
    worst = EXIT_OK
    for n in ranks:
        try:
            cert = certifier.run_case(
                n,
                precision_bits=args.precision,
                odlyzko_path=args.odlyzko,
                fields_path=args.fields,
            )
        except certifier.DataMissing as exc:
            print(f"data missing: {exc}", file=sys.stderr)
            return EXIT_DATA_MISSING
        sys.stdout.buffer.write(certifier.emit_report(cert, args.fmt))
        sys.stdout.flush()
        if cert.has_tie:
            worst = max(worst, EXIT_TIE)
        elif not cert.all_proved:
            worst = max(worst, EXIT_STEP_FAILED)
    return worst


def _cmd_optimize(args) -> int:
    try:
        table = bounds.load_odlyzko_table(args.odlyzko)
    except FileNotFoundError as exc:
        print(f"data missing: {exc}", file=sys.stderr)
        return EXIT_DATA_MISSING
    if args.case == "n2":
        result = optimizer.optimize_n2(table, precision_bits=args.precision)
    else:
        result = optimizer.optimize_n3(table, precision_bits=args.precision)
    mid = result.best_value.midpoint()
    print(f"case: {args.case}")
    print(f"best value: {float(mid):.13g}")
    print(
        "best value enclosure: "
        f"[{float(result.best_value.lo):.13g}, {float(result.best_value.hi):.13g}]"
    )
    print(f"best pair: A = {result.best_pair.A}, E = {result.best_pair.E}")
    if result.best_t is not None:
        print(f"best t: {result.best_t}")
    print(f"rows scanned: {result.rows_scanned}")
    if result.ties:
        print(f"unresolved ties: {len(result.ties)}")
        return EXIT_TIE
    return EXIT_OK


def _cmd_verify(args) -> int:
    try:
        data = Path(args.report).read_bytes()
    except FileNotFoundError as exc:
        print(f"data missing: {exc}", file=sys.stderr)
        return EXIT_DATA_MISSING
    try:
        verdict = certifier.verify_report(data)
    except certifier.SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return EXIT_DATA_MISSING
    except certifier.TamperDetected as exc:
        print(f"tamper detected: {exc}", file=sys.stderr)
        return EXIT_STEP_FAILED
    print(f"verdict: {verdict}")
    return EXIT_OK if verdict == "Proved" else EXIT_STEP_FAILED


def _cmd_field(args) -> int:
    try:
        catalog = numberfields.default_catalog(args.fields)
    except FileNotFoundError as exc:
        print(f"data missing: {exc}", file=sys.stderr)
        return EXIT_DATA_MISSING
    try:
        field = numberfields.field_by_label(catalog, args.label)
    except numberfields.UnsupportedField as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_STEP_FAILED
    if args.op == "zeta":
        iv = numberfields.dedekind_zeta_enclosure(field, args.s, args.precision)
        print(f"zeta_{field.label}({args.s}) in [{float(iv.lo):.15g}, {float(iv.hi):.15g}]")
    elif args.op == "units":
        if field.degree == 2:
            a, b = numberfields.pell_fundamental_unit(field.discriminant)
            print(f"fundamental unit: ({a} + {b} sqrt({field.discriminant})) / 2")
        index = numberfields.totally_positive_index(field)
        print(f"totally positive unit index: {index}")
    else:
        split = numberfields.splitting_type(field, args.p)
        print(
            f"prime {args.p}: {split.kind}, residue cardinalities "
            f"{list(split.residue_cardinalities)}"
        )
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "prove":
        return _cmd_prove(args)
    if args.command == "optimize":
        return _cmd_optimize(args)
    if args.command == "verify":
        return _cmd_verify(args)
    return _cmd_field(args)


if __name__ == "__main__":
    sys.exit(main())
