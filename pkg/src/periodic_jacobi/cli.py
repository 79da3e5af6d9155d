"""Command-line entry point: ``periodic-jacobi <subcommand> ...``.

Exit codes: 0 success, 1 usage, 2 parse or validation error, 3 numerical
failure (including a failed oracle check).
"""
from __future__ import annotations

import argparse
import sys

from .bounds import certify
from .core import harper
from .errors import NumericalError, ValidationError
from .io import (
    add_stamp,
    analysis_document,
    bounds_document,
    dumps,
    load_operator,
    operator_document,
    oracle_document,
    sample_table,
    trace_document,
    write_atomic,
)
from .quasimomentum import build_model

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _emit(text, output):
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        write_atomic(output, text)


def cmd_analyze(input_path, output_path=None, *, skip_dirichlet=False, skip_herglotz=False,
                ymax=12.0, tol_edge=None, stamp=False) -> dict:
    J, label = load_operator(input_path)
    doc = analysis_document(J, label, skip_dirichlet=skip_dirichlet, skip_herglotz=skip_herglotz,
                            ymax=ymax, edge_tol=tol_edge, stamp=stamp)
    _emit(dumps(doc), output_path)
    return doc


def cmd_sample(input_path, output_path=None, n_points=1001, tol_edge=None) -> str:
    J, _ = load_operator(input_path)
    table = sample_table(J, n_points, edge_tol=tol_edge)
    _emit(table, output_path)
    return table


def cmd_bounds(input_path, output_path=None, tol_edge=None, stamp=False) -> dict:
    J, _ = load_operator(input_path)
    doc = add_stamp(bounds_document(certify(J, build_model(J, edge_tol=tol_edge))), stamp)
    _emit(dumps(doc), output_path)
    return doc


def cmd_harper(p, q, theta=0.0, output_path=None, label=None) -> dict:
    doc = operator_document(harper(p, q, theta), label)
    _emit(dumps(doc), output_path)
    return doc


def cmd_oracle_check(input_path, n_theta=721, output_path=None, tol_edge=None) -> dict:
    J, _ = load_operator(input_path)
    doc = oracle_document(J, n_theta, edge_tol=tol_edge)
    _emit(dumps(doc), output_path)
    return doc


def cmd_trace_check(input_path, n, output_path=None, tol_edge=None) -> dict:
    J, _ = load_operator(input_path)
    doc = trace_document(J, n, edge_tol=tol_edge)
    _emit(dumps(doc), output_path)
    return doc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="periodic-jacobi",
                     description="Spectral analysis of periodic Jacobi operators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, with_input=True):
        if with_input:
            p.add_argument("input", help="operator document (JSON: q, a, b, optional label)")
        p.add_argument("-o", "--output", help="output path (default: stdout)")
        p.add_argument("--tol-edge", type=float, default=None,
                       help="relative root tolerance for band edges (default 1e-14)")

    p = sub.add_parser("analyze", help="full analysis document")
    common(p)
    p.add_argument("--ymax", type=float, default=12.0, help="height of the Dirichlet integration box")
    p.add_argument("--skip-dirichlet", action="store_true")
    p.add_argument("--skip-herglotz", action="store_true")
    p.add_argument("--stamp", action="store_true", help="add a generation timestamp")

    p = sub.add_parser("sample", help="CSV of x, lambda, D, u, v on [0, pi]")
    common(p)
    p.add_argument("-n", "--n-points", type=int, default=1001)

    p = sub.add_parser("bounds", help="certificate only")
    common(p)
    p.add_argument("--stamp", action="store_true")

    p = sub.add_parser("harper", help="write a Harper operator document")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--label")
    p.add_argument("-o", "--output")

    p = sub.add_parser("oracle-check", help="compare band edges with Bloch eigenvalues")
    common(p)
    p.add_argument("--n-theta", type=int, default=721)

    p = sub.add_parser("trace-check", help="trace formula residual for one n")
    common(p)
    p.add_argument("-n", type=int, required=True)
    return parser


def run(args) -> int:
    if args.command == "analyze":
        cmd_analyze(args.input, args.output, skip_dirichlet=args.skip_dirichlet,
                    skip_herglotz=args.skip_herglotz, ymax=args.ymax,
                    tol_edge=args.tol_edge, stamp=args.stamp)
    elif args.command == "sample":
        cmd_sample(args.input, args.output, args.n_points, args.tol_edge)
    elif args.command == "bounds":
        cmd_bounds(args.input, args.output, args.tol_edge, args.stamp)
    elif args.command == "harper":
        cmd_harper(args.p, args.q, args.theta, args.output, args.label)
    elif args.command == "oracle-check":
        doc = cmd_oracle_check(args.input, args.n_theta, args.output, args.tol_edge)
        print(f"max distance {doc['max_distance']:.3e} (threshold {doc['threshold']:.3e})",
              file=sys.stderr)
        if not doc["passed"]:
            return EXIT_NUMERICAL
    elif args.command == "trace-check":
        cmd_trace_check(args.input, args.n, args.output, args.tol_edge)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
