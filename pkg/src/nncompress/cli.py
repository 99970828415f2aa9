"""Command-line front end.

Exit codes: 0 success, 1 verification failed, 2 input error, 3 numerical failure.
Diagnostics go to stderr; JSON output goes to stdout or the given path.
Indices in all reports are 0-based.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .compression import compress
from .errors import InputError, NumericalFailure
from .instances import GeneratorSpec, paper_matrix_at, random_low_rank_nonneg
from .io import complex_list, dumps_report, matrix_to_json_obj, read_matrix, write_matrix
from .linalg import Tolerance, eigenvalues, norm2, rank_power_sequence
from .verification import is_nonnegative, jordan_equiv_mod_zeros, verify

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


def _add_tol_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-rank", type=float, default=None, help="relative singular-value cutoff")
    p.add_argument("--tol-zero", type=float, default=None, help="absolute zero-eigenvalue cutoff")
    p.add_argument("--tol-match", type=float, default=None, help="absolute eigenvalue pairing radius")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="matrix file format")


def _tol(args) -> Tolerance:
    return Tolerance(args.tol_rank, args.tol_zero, args.tol_match)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nncompress",
        description="Compress nonnegative matrices while keeping the nonzero spectrum.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log warnings to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="compress a matrix and write a JSON report")
    p.add_argument("input")
    p.add_argument("--out", default=None, help="path for the compressed matrix")
    p.add_argument("--report", default=None, help="report path (default: <out>.report.json, or stdout)")
    _add_tol_flags(p)

    p = sub.add_parser("verify", help="check that two matrices agree modulo zero Jordan blocks")
    p.add_argument("a")
    p.add_argument("b")
    _add_tol_flags(p)

    p = sub.add_parser("demo", help="the five-by-five family A(t)")
    p.add_argument("--t", type=float, default=1.0)

    p = sub.add_parser("gen", help="write a random diagonalizable nonnegative low-rank matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    return parser


def _emit(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_compress(args) -> int:
    A = read_matrix(args.input, args.format)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"input matrix must be square, got {A.shape[0]}x{A.shape[1]}")
    report = compress(A, _tol(args))
    report_path = args.report
    if args.out:
        write_matrix(report.output, args.out, args.format)
        if report_path is None:
            report_path = str(Path(args.out).with_suffix("")) + ".report.json"
    text = dumps_report(report) + "\n"
    if report_path:
        Path(report_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not report.verification.ok:
        print("verification failed: " + "; ".join(report.verification.details), file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_verify(args) -> int:
    A = read_matrix(args.a, args.format)
    B = read_matrix(args.b, args.format)
    for name, M in (("a", A), ("b", B)):
        if M.shape[0] != M.shape[1]:
            raise InputError(f"matrix {name} must be square, got {M.shape[0]}x{M.shape[1]}")
    big, small = (A, B) if A.shape[0] >= B.shape[0] else (B, A)
    tol = _tol(args)
    verdict = verify(big, small, tol)
    payload = verdict.to_dict()
    payload["schema"] = 1
    payload["orders"] = [int(A.shape[0]), int(B.shape[0])]
    _emit(payload, None)
    ok = verdict.spectra_match and verdict.jordan_match_mod_zeros
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_demo(args) -> int:
    inst = paper_matrix_at(args.t)
    M = inst.matrix
    payload = {
        "schema": 1,
        "t": inst.t,
        "matrix": matrix_to_json_obj(M),
        "eigenvalues": complex_list(eigenvalues(M)),
        "expected_spectrum": complex_list(inst.spectrum),
        "nonneg": is_nonnegative(M),
        "rank_sequence_at_minus_2": rank_power_sequence(M, -2.0, 3),
    }
    _emit(payload, None)
    return EXIT_OK


def cmd_gen(args) -> int:
    M = random_low_rank_nonneg(GeneratorSpec(args.n, args.k, args.seed, args.scale))
    write_matrix(M, args.out, args.format)
    return EXIT_OK


COMMANDS = {"compress": cmd_compress, "verify": cmd_verify, "demo": cmd_demo, "gen": cmd_gen}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
