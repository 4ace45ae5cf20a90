"""``newtoninf analyze FILE``: run the pipeline and print a summary.

Exit codes: 0 on success, 2 on input errors (unreadable or malformed map
files), 3 on guard violations such as oversized dimension or support.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import __version__
from .errors import GuardError, InputError
from .numeric import SearchConfig
from .parsing import parse_polynomial_map
from .report import Options, analyze, build_report, dumps
from .torus import TorusConfig


def _radii(text: str) -> tuple[float, float, int]:
    try:
        r0, factor, count = text.split(":")
        return float(r0), float(factor), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected R0:FACTOR:COUNT, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newtoninf", description="Newton non-degeneracy at infinity of polynomial maps")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="analyze a map file")
    a.add_argument("file", help="map file ('-' for stdin)")
    a.add_argument("--json", metavar="OUT", help="write the JSON report to OUT ('-' for stdout)")
    a.add_argument("-q", "--quiet", action="store_true", help="do not print the text summary")
    a.add_argument("--translate-constants", action="store_true", help="subtract nonzero constant terms instead of failing")

    stages = a.add_argument_group("stages")
    stages.add_argument("--check-nd", action="store_true", help="decide non-degeneracy at infinity")
    stages.add_argument("--bound", action="store_true", help="compute N(F), A(F) and the invertibility verdict")
    stages.add_argument(
        "--compare-definitions", action="store_true",
        help="compare the torus face-system condition with the all-components real condition",
    )
    stages.add_argument("--numeric", action="store_true", help="numeric asymptotic critical value search (implies the bound)")
    stages.add_argument("--export-systems", metavar="DIR", help="write undecided and atypical face systems to DIR")

    nd = a.add_argument_group("non-degeneracy tolerances")
    d = TorusConfig()
    nd.add_argument("--eps-sys", type=float, default=d.eps_sys, help="system residual for a witness (default %(default)g)")
    nd.add_argument("--eps-rank", type=float, default=d.eps_rank, help="rank residual for a witness (default %(default)g)")
    nd.add_argument("--delta-torus", type=float, default=d.delta_torus, help="minimum |x_i| for a torus point (default %(default)g)")
    nd.add_argument("--nd-restarts", type=int, default=d.restarts, help="witness search restarts per cone (default %(default)s)")

    num = a.add_argument_group("numeric search")
    s = SearchConfig()
    num.add_argument("--radii", type=_radii, default=s.radii, metavar="R0:FACTOR:COUNT", help="sphere radii R0 * FACTOR^i (default 10:10:3)")
    num.add_argument("--restarts", type=int, default=s.restarts, help="restarts per radius (default %(default)s)")
    num.add_argument("--tol", type=float, default=None, help="objective threshold (default 1e-3 * (1 + R0))")
    num.add_argument("--cluster-radius", type=float, default=s.cluster_radius, help="value clustering radius (default %(default)g)")
    num.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    return parser


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _location(path: str, exc: Exception) -> str:
    line = getattr(exc, "line", None)
    return f"{path}:{line}" if line is not None else path


def run(args: argparse.Namespace) -> int:
    try:
        text = _read(args.file)
    except OSError as exc:
        print(f"{args.file}: cannot read: {exc.strerror or exc}", file=sys.stderr)
        return 2
    try:
        F = parse_polynomial_map(text, translate_constants=args.translate_constants)
        torus = TorusConfig(
            eps_sys=args.eps_sys, eps_rank=args.eps_rank, delta_torus=args.delta_torus,
            restarts=args.nd_restarts, seed=args.seed,
        )
        search = SearchConfig(
            radii=args.radii, restarts=args.restarts, tol=args.tol,
            cluster_radius=args.cluster_radius, seed=args.seed,
        )
        opts = Options(
            check_nd=args.check_nd, bound=args.bound, compare=args.compare_definitions,
            numeric=args.numeric, export_dir=args.export_systems, seed=args.seed,
            torus=torus, search=search,
        )
        result = analyze(F, opts)
        report = build_report(result, None if args.file == "-" else args.file, opts)
    except InputError as exc:
        print(f"{_location(args.file, exc)}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"{args.file}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if not args.quiet:
        out = sys.stderr if args.json == "-" else sys.stdout
        print("\n".join(report["summary"]), file=out)
    if args.json:
        payload = dumps(report)
        if args.json == "-":
            sys.stdout.write(payload)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(payload)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    raise SystemExit(main())
