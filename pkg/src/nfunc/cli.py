"""Command-line front end for the double-exponential solver library.

Subcommands: ``solve`` (the inverse function at one point), ``general``
(nonunit exponents, both branches), ``transform`` (the catalogue of
reducible equation shapes), ``table`` (reproduce the bundled reference
tables with match flags), ``sweep-init`` (guess-independence runs),
``compare-newton`` (quadratic scheme vs plain Newton), ``plot-data``
(curve and trace CSV emission), and ``identities`` (closed-form identity
suite).

Exit codes: 0 on success, 2 when the requested computation failed to
converge (or an identity/branch does not exist), 1 on usage errors.
Formats: ``human`` prints 10 significant digits, matching the bundled
tables' granularity; ``csv`` and ``json`` print 17, enough to round-trip
doubles exactly.  Negative X on the command line needs a ``--`` sentinel
(``solve -- -1``) or the ``X=`` form (``solve X=-1``).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass

from .core import DomainError, NFuncError, Scalar
from .diagnostics import InsufficientData, analyze_trace
from .general import (
    Branch,
    GeneralProblem,
    NoSolutionOnBranch,
    ProblemForm,
    general_solve,
)
from .oracle import ResidualProblem, newton_solve, run_identity_suite
from .solvers import (
    SolveConfig,
    SolveResult,
    SolveStatus,
    nfunc,
    solve_method1,
    solve_method2,
    solve_method3,
)
from .tables import TABLES, reproduce_table
from .transforms import (
    EquationShape,
    TransformableEquation,
    UntransformableError,
    canonicalize,
    solve_transformed,
)

__all__ = ["OutputRecord", "main"]


@dataclass(frozen=True)
class OutputRecord:
    """Schema-stable result row shared by the solving subcommands."""

    x: Scalar
    p: Scalar | None
    method: str
    branch: str | None
    guess: Scalar | None
    y: Scalar
    residual: Scalar
    iterations: int
    status: str
    precision_limited: bool


_RECORD_FIELDS = (
    "x",
    "p",
    "method",
    "branch",
    "guess",
    "y",
    "residual",
    "iterations",
    "status",
    "precision_limited",
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # the exit-code contract reserves 2 for non-convergence; argparse's
    # default usage exit is 2, so route usage problems through 1 instead
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


# --- formatting -------------------------------------------------------------


def _human(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _machine(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _emit_rows(rows: Sequence[dict], fields: Sequence[str], fmt: str) -> None:
    if fmt == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_machine(row.get(f)) for f in fields])
    elif fmt == "json":
        for row in rows:
            print(json.dumps({f: row.get(f) for f in fields}))
    else:
        for row in rows:
            parts = []
            for f in fields:
                v = row.get(f)
                if v is None or v == "":
                    continue
                parts.append(f"{f} = {_human(v)}")
            print("  ".join(parts))


def _record_rows(records: Sequence[OutputRecord]) -> list[dict]:
    return [
        {f: getattr(rec, f) for f in _RECORD_FIELDS}
        for rec in records
    ]


def _record(
    X: Scalar,
    res: SolveResult,
    method: str,
    p: Scalar | None = None,
    branch: str | None = None,
    guess: Scalar | None = None,
) -> OutputRecord:
    return OutputRecord(
        x=X,
        p=p,
        method=method,
        branch=branch,
        guess=guess,
        y=res.y,
        residual=res.final_residual,
        iterations=len(res.trace),
        status=res.status.value,
        precision_limited=res.precision_limited,
    )


# --- shared argument handling ----------------------------------------------


def _parse_scalar(text: str, what: str = "X") -> Scalar:
    raw = text
    if text[:2] in ("X=", "x="):
        text = text[2:]
    try:
        value = float(text)
    except ValueError:
        raise _UsageError(f"{what} must be a decimal or scientific literal, got {raw!r}")
    if not math.isfinite(value):
        raise _UsageError(f"{what} must be finite, got {raw!r}")
    return value


def _config(args: argparse.Namespace) -> SolveConfig:
    guess = None
    z1 = getattr(args, "z1", None)
    y1 = getattr(args, "y1", None)
    if z1 is not None and y1 is not None:
        raise _UsageError("give either --z1 or --y1, not both")
    if z1 is not None:
        guess = z1
    elif y1 is not None:
        guess = y1
    method = getattr(args, "method", None)
    try:
        return SolveConfig(
            tol=args.tol,
            max_iter=args.max_iter,
            initial_guess=guess,
            method=_METHOD_NAMES.get(method, "auto"),
        )
    except ValueError as exc:
        raise _UsageError(str(exc))


_METHOD_NAMES = {"auto": "auto", "1": "method1", "2": "method2", "3": "method3"}
_SOLVERS = {"1": solve_method1, "2": solve_method2, "3": solve_method3}


def _branch_of(args: argparse.Namespace) -> Branch | None:
    name = getattr(args, "branch", None)
    if name is None:
        return None
    return Branch.LOWER if name == "lower" else Branch.UPPER


# --- subcommands ------------------------------------------------------------


def _cmd_solve(args: argparse.Namespace) -> int:
    X = _parse_scalar(args.X)
    cfg = _config(args)
    res = nfunc(X, cfg)
    rec = _record(X, res, method=args.method, guess=cfg.initial_guess)
    _emit_rows(_record_rows([rec]), _RECORD_FIELDS, args.format)
    return 0 if res.status is SolveStatus.CONVERGED else 2


def _cmd_general(args: argparse.Namespace) -> int:
    X = _parse_scalar(args.X)
    cfg = _config(args)
    form = ProblemForm.NEGATIVE_EXP if args.form == "negative" else ProblemForm.POSITIVE_EXP
    branch = _branch_of(args)
    records: list[OutputRecord] = []
    ok = False
    if form is ProblemForm.POSITIVE_EXP and args.p < 0.0 and branch is None:
        # two solutions; show both, noting any branch the iteration rules out
        for br in (Branch.LOWER, Branch.UPPER):
            try:
                res = general_solve(GeneralProblem(p=args.p, X=X, form=form, branch=br), cfg)
            except NoSolutionOnBranch as exc:
                print(f"note: {exc}", file=sys.stderr)
                continue
            ok = ok or res.status is SolveStatus.CONVERGED
            records.append(
                _record(X, res, method="general", p=args.p, branch=br.value,
                        guess=cfg.initial_guess)
            )
    else:
        res = general_solve(
            GeneralProblem(p=args.p, X=X, form=form, branch=branch), cfg
        )
        ok = res.status is SolveStatus.CONVERGED
        records.append(
            _record(
                X,
                res,
                method="general" if form is ProblemForm.POSITIVE_EXP else "general-negexp",
                p=args.p,
                branch=branch.value if branch else None,
                guess=cfg.initial_guess,
            )
        )
    if records:
        _emit_rows(_record_rows(records), _RECORD_FIELDS, args.format)
    return 0 if ok else 2


def _cmd_transform(args: argparse.Namespace) -> int:
    shape = EquationShape(args.shape)
    params: dict[str, Scalar] = {}
    for item in args.params:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise _UsageError(f"parameters are name=value pairs, got {item!r}")
        params[name] = _parse_scalar(value, what=f"parameter {name}")
    try:
        eq = TransformableEquation(shape, params)
    except DomainError as exc:
        raise _UsageError(str(exc))
    cfg = _config(args)
    problem = canonicalize(eq)
    res = solve_transformed(eq, cfg, _branch_of(args))
    if args.format == "human":
        print(
            f"canonical: exponent = {_human(problem.p)}  X = {_human(problem.X)}  "
            f"back map: {problem.description}"
        )
    rec = OutputRecord(
        x=problem.X,
        p=problem.p,
        method=shape.value,
        branch=getattr(args, "branch", None),
        guess=cfg.initial_guess,
        y=res.y,
        residual=res.final_residual,
        iterations=len(res.trace),
        status=res.status.value,
        precision_limited=res.precision_limited,
    )
    _emit_rows(_record_rows([rec]), _RECORD_FIELDS, args.format)
    return 0 if res.status is SolveStatus.CONVERGED else 2


_TABLE_FIELDS = (
    "table",
    "x",
    "p",
    "branch",
    "start",
    "position",
    "published",
    "computed",
    "rel_err",
    "flag",
)


def _cmd_table(args: argparse.Namespace) -> int:
    reports = reproduce_table(args.n)
    rows: list[dict] = []
    for rep in reports:
        row = rep.row
        base = {
            "table": row.table,
            "x": row.X,
            "p": row.p,
            "branch": row.branch.value if row.branch else None,
            "start": row.start,
        }
        for cell in rep.cells:
            rows.append(
                base
                | {
                    "position": f"iterate_{cell.index + 1}",
                    "published": cell.published,
                    "computed": cell.computed,
                    "rel_err": cell.rel_err,
                    "flag": cell.flag.value,
                }
            )
        rows.append(
            base
            | {
                "position": "final_y",
                "published": row.published_y,
                "computed": rep.computed_y,
                "rel_err": rep.y_rel_err,
                "flag": rep.y_flag.value,
            }
        )
    if args.format == "human":
        for rep in reports:
            row = rep.row
            extras = []
            if row.p is not None:
                extras.append(f"p = {_human(row.p)}")
            if row.branch is not None:
                extras.append(f"branch = {row.branch.value}")
            head = "  ".join([f"X = {_human(row.X)}", f"start = {_human(row.start)}"] + extras)
            print(head)
            for cell in rep.cells:
                print(
                    f"  iterate {cell.index + 1}: published {_human(cell.published)}"
                    f"  computed {_human(cell.computed)}  rel {cell.rel_err:.2e}"
                    f"  {cell.flag.value}"
                )
            print(
                f"  final y: published {_human(row.published_y)}"
                f"  computed {_human(rep.computed_y)}  rel {rep.y_rel_err:.2e}"
                f"  {rep.y_flag.value}"
            )
    else:
        _emit_rows(rows, _TABLE_FIELDS, args.format)
    return 0


def _cmd_sweep_init(args: argparse.Namespace) -> int:
    X = _parse_scalar(args.X)
    solver = _SOLVERS[args.method]
    guesses = [_parse_scalar(g, what="guess") for g in args.guesses]
    if any(g <= (1.0 if args.method in ("1", "2") else 0.0) for g in guesses):
        raise _UsageError("guesses must lie inside the method domain")
    records = []
    converged: list[Scalar] = []
    for g in guesses:
        cfg = SolveConfig(tol=args.tol, max_iter=args.max_iter, initial_guess=g)
        res = solver(X, cfg)
        records.append(_record(X, res, method=f"method{args.method}", guess=g))
        if res.status is SolveStatus.CONVERGED:
            converged.append(res.y)
    max_dev = max(converged) - min(converged) if len(converged) > 1 else 0.0
    rows = _record_rows(records)
    for row in rows:
        row["max_deviation"] = max_dev
    _emit_rows(rows, _RECORD_FIELDS + ("max_deviation",), args.format)
    if args.format == "human":
        print(f"max pairwise deviation = {_human(max_dev)} over {len(converged)} converged runs")
    return 0 if converged else 2


def _newton_problem(method: str, X: Scalar) -> tuple[ResidualProblem, object]:
    # residual and derivative in the same variable the scheme iterates,
    # plus the conversion from that variable to y
    if method == "1":
        prob = ResidualProblem(
            f=lambda z: z * math.log(math.log(z)) - X,
            df=lambda z: math.log(math.log(z)) + 1.0 / math.log(z),
            name="newton method1",
        )
        return prob, lambda z: math.log(math.log(z))
    if method == "2":
        lnX = math.log(X)
        prob = ResidualProblem(
            f=lambda z: z + math.log(math.log(z)) - lnX,
            df=lambda z: 1.0 + 1.0 / (z * math.log(z)),
            name="newton method2",
        )
        return prob, math.log
    prob = ResidualProblem(
        f=lambda y: y * math.exp(math.exp(-y)) - X,
        df=lambda y: math.exp(math.exp(-y)) * (1.0 - y * math.exp(-y)),
        name="newton method3",
    )
    return prob, lambda y: y


_COMPARE_FIELDS = (
    "x",
    "guess",
    "quad_iterations",
    "quad_y",
    "newton_iterations",
    "newton_y",
    "note",
)


def _cmd_compare_newton(args: argparse.Namespace) -> int:
    X = _parse_scalar(args.X)
    guesses = [_parse_scalar(g, what="guess") for g in args.guesses]
    solver = _SOLVERS[args.method]
    problem, to_y = _newton_problem(args.method, X)
    rows: list[dict] = []
    first_trace = None
    for g in guesses:
        cfg = SolveConfig(tol=args.tol, max_iter=args.max_iter, initial_guess=g)
        quad = solver(X, cfg)
        if first_trace is None and quad.status is SolveStatus.CONVERGED:
            first_trace = quad.trace
        row: dict = {
            "x": X,
            "guess": g,
            "quad_iterations": len(quad.trace),
            "quad_y": quad.y,
            "newton_iterations": None,
            "newton_y": None,
            "note": "",
        }
        try:
            newt = newton_solve(problem, g)
        except (NFuncError, ValueError, OverflowError, ZeroDivisionError) as exc:
            # Newton wandering out of the residual's domain is a result
            # here, not a crash
            row["note"] = f"newton failed: {type(exc).__name__}"
        else:
            row["newton_iterations"] = len(newt.trace)
            row["newton_y"] = to_y(newt.y)
            if newt.status is not SolveStatus.CONVERGED:
                row["note"] = f"newton {newt.status.value}"
        rows.append(row)
    _emit_rows(rows, _COMPARE_FIELDS, args.format)
    if args.format == "human" and first_trace is not None:
        try:
            rep = analyze_trace(first_trace, tol=args.tol)
            ratios = ", ".join(f"{r:.3g}" for r in rep.ratios)
            print(
                f"quadratic correction ratios: {ratios}  "
                f"superlinear = {_human(rep.superlinear)}"
            )
        except InsufficientData:
            pass
    return 0


def _cmd_plot_data(args: argparse.Namespace) -> int:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    if args.what == "curve":
        if args.count < 2:
            raise _UsageError("curve needs at least 2 samples")
        lo = _parse_scalar(args.lo, what="range start")
        hi = _parse_scalar(args.hi, what="range end")
        if not hi > lo:
            raise _UsageError("range end must exceed range start")
        writer.writerow(["x", "y"])
        step = (hi - lo) / (args.count - 1)
        for k in range(args.count):
            X = lo + k * step
            res = nfunc(X, SolveConfig(tol=args.tol, max_iter=args.max_iter))
            writer.writerow([_machine(X), _machine(res.y)])
        return 0
    # trace mode: method-space iterates of a single run
    X = _parse_scalar(args.X)
    cfg = _config(args)
    method = getattr(args, "method", "auto") or "auto"
    if method == "auto":
        res = nfunc(X, cfg)
    else:
        res = _SOLVERS[method](X, cfg)
    writer.writerow(["iteration", "iterate"])
    if res.trace:
        writer.writerow(["1", _machine(res.trace[0].iterate_before)])
        for st in res.trace:
            writer.writerow([str(st.index + 1), _machine(st.iterate_after)])
    else:
        # zero-step run (exact or precision-limited shortcut): one row
        writer.writerow(["1", _machine(res.y)])
    return 0 if res.status is SolveStatus.CONVERGED else 2


_IDENTITY_FIELDS = ("name", "x", "expected", "computed", "rel_err", "passed")


def _cmd_identities(args: argparse.Namespace) -> int:
    results = run_identity_suite(tol=args.tol)
    rows = [
        {
            "name": r.name,
            "x": r.x,
            "expected": r.expected,
            "computed": r.computed,
            "rel_err": r.rel_err,
            "passed": r.passed,
        }
        for r in results
    ]
    if args.format == "human":
        for row in rows:
            at = f" at x = {_human(row['x'])}" if row["x"] is not None else ""
            verdict = "PASS" if row["passed"] else "FAIL"
            print(
                f"{verdict}  {row['name']}{at}: expected {_human(row['expected'])}"
                f"  computed {_human(row['computed'])}  rel {row['rel_err']:.2e}"
            )
    else:
        _emit_rows(rows, _IDENTITY_FIELDS, args.format)
    return 0 if all(r.passed for r in results) else 2


# --- parser -----------------------------------------------------------------


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="relative tolerance")
    common.add_argument("--max-iter", type=int, default=50, dest="max_iter")
    common.add_argument(
        "--format", choices=("human", "csv", "json"), default="human",
        help="human shows 10 significant digits, csv/json show 17",
    )
    guess = _Parser(add_help=False)
    guess.add_argument("--z1", type=float, default=None, help="starting iterate (z space)")
    guess.add_argument("--y1", type=float, default=None, help="starting iterate (y space)")

    parser = _Parser(prog="nfunc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common, guess], help="invert y*exp(exp(y)) = X")
    p.add_argument("X", help="right-hand side; use -- before negatives, or X=-1")
    p.add_argument("--method", choices=("auto", "1", "2", "3"), default="auto")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("general", parents=[common, guess], help="nonunit exponent forms")
    p.add_argument("X")
    p.add_argument("-p", type=float, required=True, dest="p", help="exponent")
    p.add_argument("--form", choices=("positive", "negative"), default="positive")
    p.add_argument("--branch", choices=("lower", "upper"), default=None)
    p.set_defaults(fn=_cmd_general, method=None)

    p = sub.add_parser(
        "transform", parents=[common, guess], help="solve a recognized equation shape"
    )
    p.add_argument("shape", choices=[s.value for s in EquationShape])
    p.add_argument("params", nargs="*", help="shape parameters as name=value")
    p.add_argument("--branch", choices=("lower", "upper"), default=None)
    p.set_defaults(fn=_cmd_transform, method=None)

    p = sub.add_parser("table", parents=[common], help="reproduce a bundled reference table")
    p.add_argument("n", type=int, choices=sorted(TABLES))
    p.set_defaults(fn=_cmd_table)

    p = sub.add_parser(
        "sweep-init", parents=[common], help="rerun one X from several starting iterates"
    )
    p.add_argument("X")
    p.add_argument("--method", choices=("1", "2"), default="1")
    p.add_argument("guesses", nargs="+", help="starting iterates")
    p.set_defaults(fn=_cmd_sweep_init)

    p = sub.add_parser(
        "compare-newton", parents=[common], help="quadratic scheme vs plain Newton"
    )
    p.add_argument("X")
    p.add_argument("--method", choices=("1", "2", "3"), default="1")
    p.add_argument("guesses", nargs="+")
    p.set_defaults(fn=_cmd_compare_newton)

    p = sub.add_parser("plot-data", parents=[common], help="CSV data for curve or trace plots")
    psub = p.add_subparsers(dest="what", required=True)
    c = psub.add_parser("curve", parents=[common], help="(X, y) samples of the inverse")
    c.add_argument("lo")
    c.add_argument("hi")
    c.add_argument("count", type=int)
    c.set_defaults(fn=_cmd_plot_data, what="curve")
    t = psub.add_parser("trace", parents=[common, guess], help="iterates of one run")
    t.add_argument("X")
    t.add_argument("--method", choices=("auto", "1", "2", "3"), default="auto")
    t.set_defaults(fn=_cmd_plot_data, what="trace")

    p = sub.add_parser("identities", parents=[common], help="closed-form identity suite")
    # identity checks compare against closed forms, so the meaningful
    # default is the acceptance tolerance, not the solver stop tolerance
    p.set_defaults(fn=_cmd_identities, tol=1e-8)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NFuncError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
