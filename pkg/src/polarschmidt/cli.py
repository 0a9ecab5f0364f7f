"""
Command-line front end.

    polarschmidt decompose STATE.json [--split "0|1"] [--tol T] [--deg-tol D]
    polarschmidt schmidt-test STATE.json [--tol T] [--seed S] [--seeds K]
    polarschmidt product-test STATE.json [--tol T]
    polarschmidt gen {singlet,ghz,w,correlated,random} [...] [--out FILE]

The analysis commands also accept ``--batch DIR`` instead of a file.

Exit codes: 0 success / Exists / IsProduct, 1 NotExists / NotProduct,
2 malformed state file, 3 invalid flags or parameters, 4 Indeterminate.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidBipartition, SchmidtError
from .linalg import DEFAULT_DEG_TOL, DEFAULT_TOL
from .multipartite import DEFAULT_MULTI_TOL, EXISTS, INDETERMINATE, IS_PRODUCT
from .report import SCHEMA_VERSION, decompose_report, dumps, product_test_report, schmidt_test_report
from .states import (
    Bipartition,
    dump_state,
    ghz,
    make_correlated_state,
    random_state,
    singlet,
    state_from_json,
    w_state,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_MALFORMED = 2
EXIT_BAD_FLAGS = 3
EXIT_INDETERMINATE = 4

# batch exit code: the most severe outcome wins
_SEVERITY = [EXIT_MALFORMED, EXIT_BAD_FLAGS, EXIT_INDETERMINATE, EXIT_NEGATIVE, EXIT_OK]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_FLAGS, f"{self.prog}: error: {message}\n")


def _tolerance(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"tolerance must be positive and finite, got {text!r}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _complex_list(text: str) -> list[complex]:
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _positive(text: str) -> int:
    value = _nonneg(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polarschmidt", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def analysis(name, help_text, tol_default):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", nargs="?", help="state file {\"dims\": [...], \"amps\": [[re, im], ...]}")
        p.add_argument("--batch", metavar="DIR", help="analyze every *.json file in DIR")
        p.add_argument("--tol", type=_tolerance, default=tol_default)
        p.add_argument("--out", help="write the report here instead of stdout")
        return p

    p = analysis("decompose", "bipartite Schmidt decomposition", DEFAULT_TOL)
    p.add_argument("--split", default="0|", help='bipartition "L|R", e.g. "0,1|2"; empty R means the rest')
    p.add_argument("--deg-tol", type=_tolerance, default=DEFAULT_DEG_TOL)

    p = analysis("schmidt-test", "homogeneous Schmidt form on three or more factors", DEFAULT_MULTI_TOL)
    p.add_argument("--deg-tol", type=_tolerance, default=DEFAULT_DEG_TOL)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--seeds", type=_positive, default=2, help="number of consecutive seeds starting at --seed")

    analysis("product-test", "product-state test", DEFAULT_MULTI_TOL)

    p = sub.add_parser("gen", help="write a fixture state file")
    p.add_argument("kind", choices=["singlet", "ghz", "w", "correlated", "random"])
    p.add_argument("--coeffs", type=_complex_list, help="correlated: comma-separated coefficients")
    p.add_argument("--parties", type=_positive, help="number of factors (ghz, w, correlated)")
    p.add_argument("--dim", type=_positive, help="common factor dimension (ghz, correlated)")
    p.add_argument("--dims", type=_int_list, help="factor dimensions (random, correlated)")
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--out", help="output file (default: stdout)")
    return parser


def _analyze(args, path: Path) -> tuple[dict | None, int, str | None]:
    try:
        raw = path.read_bytes()
        state = state_from_json(json.loads(raw))
    except (OSError, ValueError) as exc:
        # json.JSONDecodeError and every SchmidtError are ValueErrors
        return None, EXIT_MALFORMED, f"{path}: {exc}"

    try:
        if args.command == "decompose":
            try:
                split = Bipartition.parse(args.split, state.n_parties)
            except InvalidBipartition as exc:
                return None, EXIT_BAD_FLAGS, f"{path}: {exc}"
            return decompose_report(raw, state, split, args.tol, args.deg_tol), EXIT_OK, None
        if args.command == "schmidt-test":
            if state.n_parties < 3:
                return None, EXIT_BAD_FLAGS, f"{path}: schmidt-test needs at least 3 parties, got {state.n_parties}"
            seeds = list(range(args.seed, args.seed + args.seeds))
            report, verdict = schmidt_test_report(raw, state, args.tol, args.deg_tol, seeds)
            code = {EXISTS: EXIT_OK, INDETERMINATE: EXIT_INDETERMINATE}.get(verdict, EXIT_NEGATIVE)
            return report, code, None
        report, verdict = product_test_report(raw, state, args.tol)
        return report, EXIT_OK if verdict == IS_PRODUCT else EXIT_NEGATIVE, None
    except SchmidtError as exc:
        return None, EXIT_MALFORMED, f"{path}: {exc}"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _run_analysis(args) -> int:
    if (args.file is None) == (args.batch is None):
        raise UsageError("give exactly one of FILE or --batch DIR")
    if args.file is not None:
        report, code, error = _analyze(args, Path(args.file))
        if error:
            print(f"error: {error}", file=sys.stderr)
            return code
        _emit(dumps(report), args.out)
        return code

    folder = Path(args.batch)
    if not folder.is_dir():
        raise UsageError(f"--batch expects a directory, got {args.batch!r}")
    files = sorted(folder.glob("*.json"))
    with ThreadPoolExecutor() as pool:
        outcomes = list(pool.map(lambda f: _analyze(args, f), files))
    entries = [
        {"file": f.name, "exit_code": code, "report": report, "error": error}
        for f, (report, code, error) in zip(files, outcomes)
    ]
    _emit(dumps({"schema_version": SCHEMA_VERSION, "command": args.command, "entries": entries}), args.out)
    codes = {e["exit_code"] for e in entries}
    return next((c for c in _SEVERITY if c in codes), EXIT_OK)


def _run_gen(args) -> int:
    kind = args.kind
    if kind == "singlet":
        state = singlet()
    elif kind == "ghz":
        state = ghz(args.parties or 3, args.dim or 2)
    elif kind == "w":
        state = w_state(args.parties or 3)
    elif kind == "correlated":
        if not args.coeffs:
            raise UsageError("correlated needs --coeffs")
        c = np.asarray(args.coeffs, dtype=complex)
        norm = np.linalg.norm(c)
        if norm == 0:
            raise UsageError("--coeffs must not all be zero")
        dims = args.dims or (args.dim or len(c))
        state = make_correlated_state(c / norm, dims, args.parties or (None if args.dims else 3))
    else:
        if not args.dims:
            raise UsageError("random needs --dims")
        state = random_state(args.dims, args.seed)
    _emit(dump_state(state), args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return _run_gen(args)
        return _run_analysis(args)
    except (UsageError, SchmidtError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_FLAGS


if __name__ == "__main__":
    sys.exit(main())
