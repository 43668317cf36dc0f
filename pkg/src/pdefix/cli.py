"""Command-line interface.

Exit codes: 0 on convergence, 1 on usage or problem-file errors, 2 when the
solver itself fails (divergence, singular zero mode, slab non-convergence).
Diagnostics go to stderr; machine-readable output goes to files or stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .builtins import BUILTIN_NAMES, builtin_problem
from .errors import SOLVER_ERRORS, PdefixError
from .fieldio import format_residual_csv, write_field_csv, write_pgm, write_report_csv
from .fields import SpectralField
from .fixedpoint import SolverOptions, picard_solve
from .parsing import parse_problem
from .problem import ProblemSpec
from .verification import differential_residual

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdefix",
        description="Fixed-point solver for semilinear PDE systems on periodic grids",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solve_flags(p):
        p.add_argument("--tol", type=float, default=None, help="relative update tolerance")
        p.add_argument("--max-iter", type=int, default=None, help="iteration budget")
        p.add_argument("--damping", type=float, default=None, help="damping factor in (0,1]")
        p.add_argument("--grid", type=str, default=None, help="override grid, e.g. 32 or 32,32")
        p.add_argument("--out", type=str, default=".", help="output directory")
        p.add_argument("--pgm", action="store_true", help="also write PGM images (2D only)")

    p_solve = sub.add_parser("solve", help="solve a problem file")
    p_solve.add_argument("file", type=str)
    add_solve_flags(p_solve)

    p_builtin = sub.add_parser("builtin", help="solve a built-in problem")
    p_builtin.add_argument("name", type=str, help=f"one of: {', '.join(BUILTIN_NAMES)}")
    add_solve_flags(p_builtin)
    p_builtin.add_argument(
        "--forcing-scale", type=float, default=None, help="multiply the forcing terms"
    )

    p_verify = sub.add_parser("verify", help="residual-check a solution CSV against a problem file")
    p_verify.add_argument("file", type=str)
    p_verify.add_argument("solution", type=str)
    return parser


def _load_spec(path_text: str) -> ProblemSpec:
    path = Path(path_text)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PdefixError(f"cannot read problem file {path}: {exc}") from exc
    return parse_problem(text)


def _apply_overrides(spec: ProblemSpec, args) -> ProblemSpec:
    if getattr(args, "grid", None):
        parts = args.grid.split(",")
        try:
            grid = tuple(int(p) for p in parts)
        except ValueError:
            raise PdefixError(f"--grid expects comma-separated integers, got {args.grid!r}")
        if len(grid) != spec.dim:
            raise PdefixError(f"--grid needs {spec.dim} value(s) for this problem")
        spec = spec.with_grid(grid)
    if getattr(args, "forcing_scale", None) is not None:
        spec = spec.with_forcing_scale(args.forcing_scale)
    return spec


def _solver_options(args) -> SolverOptions:
    defaults = SolverOptions()
    return SolverOptions(
        tol=args.tol if args.tol is not None else defaults.tol,
        max_iter=args.max_iter if args.max_iter is not None else defaults.max_iter,
        damping=args.damping if args.damping is not None else defaults.damping,
    )


def _run_solve(spec: ProblemSpec, args) -> int:
    opts = _solver_options(args)
    solution, trace = picard_solve(spec, opts=opts)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_field_csv(solution, out_dir / "solution.csv")
    write_report_csv(trace, out_dir / "report.csv")
    if args.pgm:
        if spec.dim != 2:
            raise PdefixError("--pgm requires a 2D problem")
        for k in range(solution.n_components):
            write_pgm(solution.physical[k], out_dir / f"solution_u{k}.pgm")
    print(
        f"converged: {len(trace)} iteration(s), final update "
        f"{trace.records[-1].update_norm:.3e}",
        file=sys.stderr,
    )
    return EXIT_OK


def _run_verify(args) -> int:
    spec = _load_spec(args.file)
    grid, values = _read_solution(args.solution)
    if grid != spec.grid:
        raise PdefixError(
            f"solution grid {grid} does not match problem grid {spec.grid}"
        )
    if values.shape[0] != spec.n_components:
        raise PdefixError(
            f"solution has {values.shape[0]} component(s); problem declares {spec.n_components}"
        )
    field = SpectralField.from_physical(values, spec.domain)
    report = differential_residual(spec, field)
    sys.stdout.write(format_residual_csv(report))
    return EXIT_OK


def _read_solution(path_text: str):
    from .fieldio import read_field_csv

    return read_field_csv(path_text)


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    try:
        if args.command == "solve":
            spec = _apply_overrides(_load_spec(args.file), args)
            return _run_solve(spec, args)
        if args.command == "builtin":
            spec = _apply_overrides(builtin_problem(args.name).spec, args)
            return _run_solve(spec, args)
        if args.command == "verify":
            return _run_verify(args)
    except SOLVER_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (PdefixError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())
