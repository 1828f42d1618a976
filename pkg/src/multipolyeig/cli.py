"""Command line front end.

Subcommands::

    multipolyeig solve <problem.json> [-o out.json] [--basis B] [--hide K]
                 [--no-rotate] [--seed S] [--residual-tol T] [--rank-tol T]
                 [--nullspace-tol T] [--keep-fraction F]
    multipolyeig verify <problem.json> <solutions.json> [--residual-tol T]
    multipolyeig oracle <problem.json> [-o out.json] [--starts N] [--seed S]
                 [--residual-tol T]
    multipolyeig bench flutter <datafile.json>

Results go to standard output (or the -o file); progress and diagnostics go
to standard error.  Exit codes: 0 success, 1 solver or input error, 2 usage
error.  When --seed is omitted the environment variable MULTIPOLYEIG_SEED is
used, defaulting to 0; identical inputs and seed produce byte-identical
output documents.
"""

import argparse
import os
import sys
from pathlib import Path

from .errors import MultiPolyEigError
from .extract import ExtractionConfig, residual
from .io import (
    flutter_pmep,
    load_flutter_data,
    parse_pmep,
    parse_solutions,
    serialize_solutions,
)
from .mpoly import Basis
from .oracle import newton_oracle
from .solver import SolverConfig, solve

__all__ = ["run_cli", "main"]


def _read(path):
    return Path(path).read_text(encoding="utf-8")


def _emit(text, output):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _resolve_seed(value):
    if value is not None:
        return value
    raw = os.environ.get("MULTIPOLYEIG_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"MULTIPOLYEIG_SEED must be an integer, got {raw!r}") from None


def _fmt_complex(z):
    return f"{z.real:+.15f} {'-' if z.imag < 0 else '+'} {abs(z.imag):.15f}i"


def _cmd_solve(args):
    p = parse_pmep(_read(args.problem))
    cfg = SolverConfig(
        basis=Basis(args.basis) if args.basis else None,
        rotate=not args.no_rotate,
        seed=_resolve_seed(args.seed),
        hide_variable=args.hide,
        extraction=ExtractionConfig(
            nullspace_tol=args.nullspace_tol,
            keep_fraction=args.keep_fraction,
            residual_tol=args.residual_tol,
        ),
        rank_tol=args.rank_tol,
    )
    out = solve(p, cfg)
    _emit(serialize_solutions(out), args.output)
    d = out.diagnostics
    print(
        f"solve: {len(out)} solutions; resultant size {d['resultant_size']}, "
        f"normal rank {d['normal_rank']}, projected {d['projected']}, "
        f"dropped eigenpairs {d['dropped_eigenpairs']}",
        file=sys.stderr,
    )
    return 0


def _cmd_verify(args):
    p = parse_pmep(_read(args.problem))
    sols = parse_solutions(_read(args.solutions))
    failures = 0
    worst = 0.0
    for i, s in enumerate(sols):
        if s.x.size != p.d:
            raise ValueError(
                f"solutions[{i}].x has {s.x.size} coordinates, problem has d={p.d}"
            )
        r = residual(p, s.x)
        worst = max(worst, r)
        ok = r <= args.residual_tol
        failures += 0 if ok else 1
        print(f"{i:4d}  residual {r:.6e}  {'ok' if ok else 'FAIL'}")
    print(
        f"verify: {len(sols)} points, {failures} over tolerance "
        f"{args.residual_tol:g}, max residual {worst:.6e}",
        file=sys.stderr,
    )
    return 0 if failures == 0 else 1


def _cmd_oracle(args):
    p = parse_pmep(_read(args.problem))
    out = newton_oracle(
        p,
        starts=args.starts,
        seed=_resolve_seed(args.seed),
        residual_tol=args.residual_tol,
    )
    info = out.diagnostics
    out.diagnostics = {
        "resultant_size": 0,
        "normal_rank": 0,
        "projected": False,
        "dropped_eigenpairs": info["nonconverged"],
        "rotation_seed": None,
        "starts": info["starts"],
    }
    _emit(serialize_solutions(out), args.output)
    print(
        f"oracle: {len(out)} roots from {info['starts']} starts "
        f"({info['nonconverged']} nonconverged)",
        file=sys.stderr,
    )
    return 0


def _cmd_bench(args):
    mats = load_flutter_data(_read(args.datafile))
    p = flutter_pmep(mats)
    # the doubled model is solved unrotated so the degree-1 variable stays
    # hidden and the eigenvector structure of the other coordinate survives
    out = solve(p, SolverConfig(rotate=False))
    d = out.diagnostics
    print(
        f"bench flutter: resultant size {d['resultant_size']}, normal rank "
        f"{d['normal_rank']}, projected {d['projected']}",
        file=sys.stderr,
    )
    print(f"flutter benchmark: {len(out)} solutions")
    header = f"{'tau':^42} {'Lambda':^42} {'residual':>10}"
    print(header)
    print("-" * len(header))
    for s in sorted(out, key=lambda s: (s.x[0].real, s.x[0].imag)):
        print(
            f"{_fmt_complex(s.x[0]):>42} {_fmt_complex(s.x[1]):>42} "
            f"{s.residual:>10.2e}"
        )
    return 0


def _add_common_tolerances(sub):
    sub.add_argument(
        "--residual-tol",
        type=float,
        default=1e-8,
        help="accept solutions with normalized residual at most T (default 1e-8)",
    )


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="multipolyeig",
        description="Global solver for polynomial multiparameter eigenvalue problems.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("solve", help="solve a problem document")
    sub.add_argument("problem", help="problem JSON file")
    sub.add_argument("-o", "--output", default=None, help="write solutions here instead of stdout")
    sub.add_argument("--basis", choices=[b.value for b in Basis], default=None,
                     help="convert to this working basis before solving")
    sub.add_argument("--hide", type=int, default=None, metavar="K",
                     help="1-based index of the variable to hide (default: automatic)")
    sub.add_argument("--no-rotate", action="store_true",
                     help="skip the random orthogonal change of variables")
    sub.add_argument("--seed", type=int, default=None,
                     help="rotation seed (default: MULTIPOLYEIG_SEED or 0)")
    _add_common_tolerances(sub)
    sub.add_argument("--rank-tol", type=float, default=1e-10,
                     help="relative singular value cutoff for rank decisions (default 1e-10)")
    sub.add_argument("--nullspace-tol", type=float, default=1e-13,
                     help="relative cutoff for eigenvector nullspace membership (default 1e-13)")
    sub.add_argument("--keep-fraction", type=float, default=0.25,
                     help="fraction of largest eigenvector entries used for ratios (default 0.25)")
    sub.set_defaults(func=_cmd_solve)

    sub = commands.add_parser("verify", help="recompute residuals for stored solutions")
    sub.add_argument("problem", help="problem JSON file")
    sub.add_argument("solutions", help="solution JSON file")
    _add_common_tolerances(sub)
    sub.set_defaults(func=_cmd_verify)

    sub = commands.add_parser("oracle", help="independent multistart Newton cross-check")
    sub.add_argument("problem", help="problem JSON file")
    sub.add_argument("-o", "--output", default=None, help="write roots here instead of stdout")
    sub.add_argument("--starts", type=int, default=200, help="number of Newton starts (default 200)")
    sub.add_argument("--seed", type=int, default=None,
                     help="start-point seed (default: MULTIPOLYEIG_SEED or 0)")
    _add_common_tolerances(sub)
    sub.set_defaults(func=_cmd_oracle)

    sub = commands.add_parser("bench", help="run a named benchmark")
    bench = sub.add_subparsers(dest="benchmark", required=True)
    flutter = bench.add_parser("flutter", help="aeroelastic flutter model")
    flutter.add_argument("datafile", help="flutter matrices JSON file")
    flutter.set_defaults(func=_cmd_bench)

    return parser


def run_cli(argv=None):
    """Run one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (MultiPolyEigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
