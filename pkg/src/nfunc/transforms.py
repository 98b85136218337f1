"""Reductions of composite log/exponential equations to the core form.

A catalogue of thirteen parameterized equation families, each solvable by
a pure change of variable that lands on ``y**p * exp(exp(y)) = X``.
``canonicalize`` performs the reduction, validating the parameter region
that keeps every intermediate logarithm defined; ``solve_transformed``
runs the appropriate core solver and maps the answer back to the original
variable, reporting the residual of the original equation as written.

Every mapping below is re-derived and checked by forward substitution in
the test suite rather than taken on faith.  Two families are the core
equations themselves in disguise (``product_loglog`` and
``exp_times_log``) and are routed to their namesake solvers so results
agree bit for bit.

Caveat on reported residuals: a few shapes place the original variable
next to a logarithmic singularity (``loglog_plus_linear`` with very
negative p puts z within rounding distance of 1, where ln(ln(z)) cannot
be evaluated accurately in double precision).  The canonical solution is
still returned in full precision; only the double-precision evaluation of
the original equation degrades there, and the residual field reports that
honestly.
"""

from __future__ import annotations

import enum
import math
import sys
from collections.abc import Callable, Mapping
from dataclasses import dataclass

from .core import DomainError, NFuncError, Scalar
from .general import Branch, GeneralProblem, ProblemForm, general_solve
from .solvers import SolveConfig, SolveResult, solve_method1, solve_method2

__all__ = [
    "EquationShape",
    "TransformableEquation",
    "CanonicalProblem",
    "UntransformableError",
    "canonicalize",
    "solve_transformed",
    "original_sides",
    "original_residual",
]

# exp() overflows above this; used to guard canonical right-hand sides
_EXP_MAX = math.log(sys.float_info.max)


class UntransformableError(NFuncError):
    """Parameters fall outside the region where the reduction is valid.

    Raised when they would make the canonical right-hand side
    nonpositive (or push it outside double range) or leave an
    intermediate logarithm undefined.  The message names the violated
    condition.
    """


class EquationShape(enum.Enum):
    """The recognized equation families, named for their structure."""

    SHIFTED_LOG_EXP = "shifted_log_exp"  # p + ln(z) + exp(q*z) = r
    LOGLOG_RATIO = "loglog_ratio"  # z = r*ln(ln(p*q/z))
    LOGLOG_PLUS_LINEAR = "loglog_plus_linear"  # ln(ln(z)) + z = p
    PRODUCT_LOGLOG = "product_loglog"  # z*ln(ln(z)) = p
    EXP_TIMES_LOG = "exp_times_log"  # exp(z)*ln(z) = p
    SCALED_DOUBLE_EXP = "scaled_double_exp"  # a*z*exp(exp(b*z)) = p
    WEIGHTED_LOG_EXP = "weighted_log_exp"  # q*ln(z) + exp(r*z) = s
    LOGLOG_POWER_RATIO = "loglog_power_ratio"  # z = r*ln(ln(p/z**q))
    LOGLOG_PLUS_POWER = "loglog_plus_power"  # p*ln(ln(z)) + z**q = r
    LINEAR_PLUS_DOUBLE_EXP = "linear_plus_double_exp"  # p*z + r*exp(q*exp(z)) = s
    EXP_POWER_TIMES_LOG = "exp_power_times_log"  # exp(z**p)*ln(q*z) = r
    PRODUCT_LOGLOG_POWER = "product_loglog_power"  # z*ln(ln(p/z**q)) = r
    POWER_DOUBLE_EXP = "power_double_exp"  # z*exp(exp(z**q)) = p


_REQUIRED: dict[EquationShape, tuple[str, ...]] = {
    EquationShape.SHIFTED_LOG_EXP: ("p", "q", "r"),
    EquationShape.LOGLOG_RATIO: ("p", "q", "r"),
    EquationShape.LOGLOG_PLUS_LINEAR: ("p",),
    EquationShape.PRODUCT_LOGLOG: ("p",),
    EquationShape.EXP_TIMES_LOG: ("p",),
    EquationShape.SCALED_DOUBLE_EXP: ("a", "b", "p"),
    EquationShape.WEIGHTED_LOG_EXP: ("q", "r", "s"),
    EquationShape.LOGLOG_POWER_RATIO: ("p", "q", "r"),
    EquationShape.LOGLOG_PLUS_POWER: ("p", "q", "r"),
    EquationShape.LINEAR_PLUS_DOUBLE_EXP: ("p", "q", "r", "s"),
    EquationShape.EXP_POWER_TIMES_LOG: ("p", "q", "r"),
    EquationShape.PRODUCT_LOGLOG_POWER: ("p", "q", "r"),
    EquationShape.POWER_DOUBLE_EXP: ("p", "q"),
}

_TEMPLATE: dict[EquationShape, str] = {
    EquationShape.SHIFTED_LOG_EXP: "p + ln(z) + exp(q*z) = r",
    EquationShape.LOGLOG_RATIO: "z = r*ln(ln(p*q/z))",
    EquationShape.LOGLOG_PLUS_LINEAR: "ln(ln(z)) + z = p",
    EquationShape.PRODUCT_LOGLOG: "z*ln(ln(z)) = p",
    EquationShape.EXP_TIMES_LOG: "exp(z)*ln(z) = p",
    EquationShape.SCALED_DOUBLE_EXP: "a*z*exp(exp(b*z)) = p",
    EquationShape.WEIGHTED_LOG_EXP: "q*ln(z) + exp(r*z) = s",
    EquationShape.LOGLOG_POWER_RATIO: "z = r*ln(ln(p/z**q))",
    EquationShape.LOGLOG_PLUS_POWER: "p*ln(ln(z)) + z**q = r",
    EquationShape.LINEAR_PLUS_DOUBLE_EXP: "p*z + r*exp(q*exp(z)) = s",
    EquationShape.EXP_POWER_TIMES_LOG: "exp(z**p)*ln(q*z) = r",
    EquationShape.PRODUCT_LOGLOG_POWER: "z*ln(ln(p/z**q)) = r",
    EquationShape.POWER_DOUBLE_EXP: "z*exp(exp(z**q)) = p",
}


@dataclass(frozen=True)
class TransformableEquation:
    """One concrete equation: a shape plus its named parameter values.

    Exactly the parameters the shape demands must be present, all finite.
    """

    shape: EquationShape
    params: Mapping[str, Scalar]

    def __post_init__(self) -> None:
        wanted = _REQUIRED[self.shape]
        got = set(self.params)
        if got != set(wanted):
            raise DomainError(
                f"shape {self.shape.value} ({_TEMPLATE[self.shape]}) takes "
                f"parameters {sorted(wanted)}, got {sorted(got) or 'none'}"
            )
        vals: dict[str, Scalar] = {}
        for name in wanted:
            value = float(self.params[name])
            if not math.isfinite(value):
                raise DomainError(
                    f"parameter {name} of {self.shape.value} must be finite, "
                    f"got {self.params[name]!r}"
                )
            vals[name] = value
        object.__setattr__(self, "params", vals)

    @property
    def template(self) -> str:
        return _TEMPLATE[self.shape]


@dataclass(frozen=True)
class CanonicalProblem:
    """A core-form problem plus the route back to the original variable.

    Attributes:
        p: canonical exponent.
        X: canonical right-hand side, always positive.
        form: sign of the inner exponential (always positive here; every
            catalogued reduction lands on the positive form).
        back_map: pure function recovering the original variable z from
            the canonical solution y.
        description: human-readable statement of the back map.
    """

    p: Scalar
    X: Scalar
    form: ProblemForm
    back_map: Callable[[Scalar], Scalar]
    description: str

    def to_general(self, branch: Branch | None = None) -> GeneralProblem:
        return GeneralProblem(p=self.p, X=self.X, form=self.form, branch=branch)


def _fail(shape: EquationShape, msg: str) -> None:
    raise UntransformableError(f"{shape.value} ({_TEMPLATE[shape]}): {msg}")


def _guarded_exp(arg: Scalar, shape: EquationShape) -> Scalar:
    # canonical X = exp(arg); refuse silently saturating to inf or 0
    if arg > _EXP_MAX:
        _fail(shape, f"canonical right-hand side exp({arg:.6g}) overflows double precision")
    value = math.exp(arg)
    if value == 0.0:
        _fail(shape, f"canonical right-hand side exp({arg:.6g}) underflows to zero")
    return value


def _canonical(
    shape: EquationShape,
    p: Scalar,
    X: Scalar,
    back_map: Callable[[Scalar], Scalar],
    description: str,
) -> CanonicalProblem:
    if not (math.isfinite(X) and X > 0.0):
        _fail(shape, f"canonical right-hand side must be positive and finite, got {X!r}")
    if not (math.isfinite(p) and p != 0.0):
        _fail(shape, f"canonical exponent must be finite and nonzero, got {p!r}")
    return CanonicalProblem(p, X, ProblemForm.POSITIVE_EXP, back_map, description)


# --- one reducer per shape ------------------------------------------------
#
# Each substitution is stated in its docstring; conditions guard every
# intermediate logarithm.  The canonical solution y is always positive.


def _reduce_shifted_log_exp(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """y = q*z turns the equation into ln(y) + exp(y) = r - p + ln(q)."""
    shape = EquationShape.SHIFTED_LOG_EXP
    p, q, r = P["p"], P["q"], P["r"]
    if q <= 0.0:
        _fail(shape, f"q must be positive so y = q*z keeps ln(z) defined, got q = {q:g}")
    X = _guarded_exp(math.log(q) + (r - p), shape)
    return _canonical(shape, 1.0, X, lambda y: y / q, f"z = y/{q:g}")


def _reduce_loglog_ratio(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """z = r*y collapses the ratio to y*exp(exp(y)) = p*q/r."""
    shape = EquationShape.LOGLOG_RATIO
    p, q, r = P["p"], P["q"], P["r"]
    if r == 0.0:
        _fail(shape, "r must be nonzero, the equation degenerates to z = 0")
    X = p * q / r
    if not (math.isfinite(X) and X > 0.0):
        _fail(shape, f"p*q/r must be positive and finite, got {X!r}")
    return _canonical(shape, 1.0, X, lambda y: r * y, f"z = {r:g}*y")


def _reduce_loglog_plus_linear(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """y = ln(z) gives ln(y) + exp(y) = p, i.e. X = exp(p)."""
    shape = EquationShape.LOGLOG_PLUS_LINEAR
    X = _guarded_exp(P["p"], shape)
    return _canonical(shape, 1.0, X, math.exp, "z = exp(y)")


def _reduce_product_loglog(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """Already the core product equation; y = ln(ln(z)), X = p."""
    shape = EquationShape.PRODUCT_LOGLOG
    p = P["p"]
    if p <= 0.0:
        _fail(shape, f"p must be positive (z > e makes the left side positive), got p = {p:g}")
    return _canonical(shape, 1.0, p, lambda y: math.exp(math.exp(y)), "z = exp(exp(y))")


def _reduce_exp_times_log(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """y = ln(z) gives y*exp(exp(y)) = p directly."""
    shape = EquationShape.EXP_TIMES_LOG
    p = P["p"]
    if p <= 0.0:
        _fail(shape, f"p must be positive (z > 1 makes the left side positive), got p = {p:g}")
    return _canonical(shape, 1.0, p, math.exp, "z = exp(y)")


def _reduce_scaled_double_exp(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """y = b*z rescales to y*exp(exp(y)) = b*p/a."""
    shape = EquationShape.SCALED_DOUBLE_EXP
    a, b, p = P["a"], P["b"], P["p"]
    if a == 0.0:
        _fail(shape, "a must be nonzero")
    if b == 0.0:
        _fail(shape, "b must be nonzero")
    X = b * p / a
    if not (math.isfinite(X) and X > 0.0):
        _fail(shape, f"b*p/a must be positive and finite, got {X!r}")
    return _canonical(shape, 1.0, X, lambda y: y / b, f"z = y/{b:g}")


def _reduce_weighted_log_exp(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """y = r*z gives q*ln(y) + exp(y) = s + q*ln(r), so X = r**q * exp(s)."""
    shape = EquationShape.WEIGHTED_LOG_EXP
    q, r, s = P["q"], P["r"], P["s"]
    if r <= 0.0:
        _fail(shape, f"r must be positive so y = r*z keeps ln(z) defined, got r = {r:g}")
    if q == 0.0:
        _fail(shape, "q must be nonzero, the log term otherwise vanishes")
    X = _guarded_exp(q * math.log(r) + s, shape)
    return _canonical(shape, q, X, lambda y: y / r, f"z = y/{r:g}")


def _reduce_loglog_power_ratio(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """z = r*y gives y**q * exp(exp(y)) = p/r**q (note the negative power of r)."""
    shape = EquationShape.LOGLOG_POWER_RATIO
    p, q, r = P["p"], P["q"], P["r"]
    if r <= 0.0:
        _fail(shape, f"r must be positive so z = r*y stays positive, got r = {r:g}")
    if p <= 0.0:
        _fail(shape, f"p must be positive so ln(p/z**q) is defined, got p = {p:g}")
    if q == 0.0:
        _fail(shape, "q must be nonzero, the power otherwise drops out")
    X = _guarded_exp(math.log(p) - q * math.log(r), shape)
    return _canonical(shape, q, X, lambda y: r * y, f"z = {r:g}*y")


def _reduce_loglog_plus_power(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """z = exp(y/q) gives p*ln(y) + exp(y) = r + p*ln(q), so X = q**p * exp(r)."""
    shape = EquationShape.LOGLOG_PLUS_POWER
    p, q, r = P["p"], P["q"], P["r"]
    if q <= 0.0:
        _fail(shape, f"q must be positive so z = exp(y/q) exceeds 1, got q = {q:g}")
    if p == 0.0:
        _fail(shape, "p must be nonzero, the equation reduces to z**q = r")
    X = _guarded_exp(p * math.log(q) + r, shape)
    return _canonical(shape, p, X, lambda y: math.exp(y / q), f"z = exp(y/{q:g})")


def _reduce_linear_plus_double_exp(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """y = q*exp(z) gives (p/r)*ln(y) + exp(y) = s/r + (p/r)*ln(q)."""
    shape = EquationShape.LINEAR_PLUS_DOUBLE_EXP
    p, q, r, s = P["p"], P["q"], P["r"], P["s"]
    if r == 0.0:
        _fail(shape, "r must be nonzero, the double exponential otherwise drops out")
    if p == 0.0:
        _fail(shape, "p must be nonzero, the linear term otherwise drops out")
    if q <= 0.0:
        _fail(shape, f"q must be positive so z = ln(y/q) is defined, got q = {q:g}")
    exponent = p / r
    X = _guarded_exp(exponent * math.log(q) + s / r, shape)
    return _canonical(shape, exponent, X, lambda y: math.log(y / q), f"z = ln(y/{q:g})")


def _reduce_exp_power_times_log(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """y = p*ln(q*z), chained through the loglog_plus_power normal form.

    Taking logs gives z**p + ln(ln(q*z)) = ln(r); substituting w = q*z and
    scaling by q**p lands on w**p + q**p * ln(ln(w)) = q**p * ln(r), which
    is the loglog_plus_power shape, hence exponent q**p and
    X = (p*r)**(q**p).
    """
    shape = EquationShape.EXP_POWER_TIMES_LOG
    p, q, r = P["p"], P["q"], P["r"]
    if p <= 0.0:
        _fail(shape, f"p must be positive so the inner ln(ln(q*z)) stays defined, got p = {p:g}")
    if q <= 0.0:
        _fail(shape, f"q must be positive so ln(q*z) is defined for z > 0, got q = {q:g}")
    if r <= 0.0:
        _fail(shape, f"r must be positive (the left side is positive where defined), got r = {r:g}")
    exponent = q**p
    if not math.isfinite(exponent):
        _fail(shape, f"canonical exponent q**p = {q:g}**{p:g} overflows double precision")
    X = _guarded_exp(exponent * math.log(p * r), shape)
    return _canonical(
        shape, exponent, X, lambda y: math.exp(y / p) / q, f"z = exp(y/{p:g})/{q:g}"
    )


def _reduce_product_loglog_power(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """z = r/y inverts the variable: y**(-q) * exp(exp(y)) = p/r**q."""
    shape = EquationShape.PRODUCT_LOGLOG_POWER
    p, q, r = P["p"], P["q"], P["r"]
    if r <= 0.0:
        _fail(shape, f"r must be positive so z = r/y stays positive, got r = {r:g}")
    if p <= 0.0:
        _fail(shape, f"p must be positive so ln(p/z**q) is defined, got p = {p:g}")
    if q == 0.0:
        _fail(shape, "q must be nonzero, the power otherwise drops out")
    X = _guarded_exp(math.log(p) - q * math.log(r), shape)
    return _canonical(shape, -q, X, lambda y: r / y, f"z = {r:g}/y")


def _reduce_power_double_exp(P: Mapping[str, Scalar]) -> CanonicalProblem:
    """y = z**q gives y**(1/q) * exp(exp(y)) = p."""
    shape = EquationShape.POWER_DOUBLE_EXP
    p, q = P["p"], P["q"]
    if q == 0.0:
        _fail(shape, "q must be nonzero, the power otherwise degenerates")
    if p <= 0.0:
        _fail(shape, f"p must be positive (the left side is positive), got p = {p:g}")
    return _canonical(shape, 1.0 / q, p, lambda y: y ** (1.0 / q), f"z = y**(1/{q:g})")


_REDUCERS: dict[EquationShape, Callable[[Mapping[str, Scalar]], CanonicalProblem]] = {
    EquationShape.SHIFTED_LOG_EXP: _reduce_shifted_log_exp,
    EquationShape.LOGLOG_RATIO: _reduce_loglog_ratio,
    EquationShape.LOGLOG_PLUS_LINEAR: _reduce_loglog_plus_linear,
    EquationShape.PRODUCT_LOGLOG: _reduce_product_loglog,
    EquationShape.EXP_TIMES_LOG: _reduce_exp_times_log,
    EquationShape.SCALED_DOUBLE_EXP: _reduce_scaled_double_exp,
    EquationShape.WEIGHTED_LOG_EXP: _reduce_weighted_log_exp,
    EquationShape.LOGLOG_POWER_RATIO: _reduce_loglog_power_ratio,
    EquationShape.LOGLOG_PLUS_POWER: _reduce_loglog_plus_power,
    EquationShape.LINEAR_PLUS_DOUBLE_EXP: _reduce_linear_plus_double_exp,
    EquationShape.EXP_POWER_TIMES_LOG: _reduce_exp_power_times_log,
    EquationShape.PRODUCT_LOGLOG_POWER: _reduce_product_loglog_power,
    EquationShape.POWER_DOUBLE_EXP: _reduce_power_double_exp,
}


def canonicalize(eq: TransformableEquation) -> CanonicalProblem:
    """Reduce an equation to canonical form, or explain why it cannot be.

    Validation is eager and shape-specific: a parameter set that makes the
    canonical right-hand side nonpositive, saturates it past double range,
    or leaves an intermediate logarithm undefined raises
    UntransformableError naming the condition, rather than letting the
    solver fail cryptically downstream.
    """
    return _REDUCERS[eq.shape](eq.params)


# --- original-equation evaluation -----------------------------------------


def _sides_shifted_log_exp(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return P["p"] + math.log(z) + math.exp(P["q"] * z), P["r"]


def _sides_loglog_ratio(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return z, P["r"] * math.log(math.log(P["p"] * P["q"] / z))


def _sides_loglog_plus_linear(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return math.log(math.log(z)) + z, P["p"]


def _sides_product_loglog(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return z * math.log(math.log(z)), P["p"]


def _sides_exp_times_log(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return math.exp(z) * math.log(z), P["p"]


def _sides_scaled_double_exp(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return P["a"] * z * math.exp(math.exp(P["b"] * z)), P["p"]


def _sides_weighted_log_exp(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return P["q"] * math.log(z) + math.exp(P["r"] * z), P["s"]


def _sides_loglog_power_ratio(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return z, P["r"] * math.log(math.log(P["p"] / z ** P["q"]))


def _sides_loglog_plus_power(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return P["p"] * math.log(math.log(z)) + z ** P["q"], P["r"]


def _sides_linear_plus_double_exp(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return P["p"] * z + P["r"] * math.exp(P["q"] * math.exp(z)), P["s"]


def _sides_exp_power_times_log(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return math.exp(z ** P["p"]) * math.log(P["q"] * z), P["r"]


def _sides_product_loglog_power(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return z * math.log(math.log(P["p"] / z ** P["q"])), P["r"]


def _sides_power_double_exp(P: Mapping[str, Scalar], z: Scalar) -> tuple[Scalar, Scalar]:
    return z * math.exp(math.exp(z ** P["q"])), P["p"]


_SIDES: dict[EquationShape, Callable[[Mapping[str, Scalar], Scalar], tuple[Scalar, Scalar]]] = {
    EquationShape.SHIFTED_LOG_EXP: _sides_shifted_log_exp,
    EquationShape.LOGLOG_RATIO: _sides_loglog_ratio,
    EquationShape.LOGLOG_PLUS_LINEAR: _sides_loglog_plus_linear,
    EquationShape.PRODUCT_LOGLOG: _sides_product_loglog,
    EquationShape.EXP_TIMES_LOG: _sides_exp_times_log,
    EquationShape.SCALED_DOUBLE_EXP: _sides_scaled_double_exp,
    EquationShape.WEIGHTED_LOG_EXP: _sides_weighted_log_exp,
    EquationShape.LOGLOG_POWER_RATIO: _sides_loglog_power_ratio,
    EquationShape.LOGLOG_PLUS_POWER: _sides_loglog_plus_power,
    EquationShape.LINEAR_PLUS_DOUBLE_EXP: _sides_linear_plus_double_exp,
    EquationShape.EXP_POWER_TIMES_LOG: _sides_exp_power_times_log,
    EquationShape.PRODUCT_LOGLOG_POWER: _sides_product_loglog_power,
    EquationShape.POWER_DOUBLE_EXP: _sides_power_double_exp,
}


def original_sides(eq: TransformableEquation, z: Scalar) -> tuple[Scalar, Scalar]:
    """Evaluate (left side, right side) of the original equation at z."""
    return _SIDES[eq.shape](eq.params, z)


def original_residual(eq: TransformableEquation, z: Scalar) -> Scalar:
    """Left minus right side of the original equation at z."""
    lhs, rhs = original_sides(eq, z)
    return lhs - rhs


# below this the root z = 1 + X/e of the exp_times_log family collapses
# into the log singularity at z = 1 in double precision; the exponent
# solver resolves it in y-space instead
_EXP_TIMES_LOG_FLOOR = 1e-14


def solve_transformed(
    eq: TransformableEquation,
    cfg: SolveConfig | None = None,
    branch: Branch | None = None,
) -> SolveResult:
    """Solve an equation from the catalogue in its original variable.

    Canonicalizes, solves the canonical problem, and maps back.  The
    returned result carries the original-variable solution in ``y`` and
    the residual of the original equation as written in
    ``final_residual``; trace, status and the error estimate come from
    the canonical solve.  ``branch`` selects between the two solutions
    when the canonical exponent is negative (default UPPER, matching the
    general solver).

    Raises UntransformableError when canonicalization fails, or when the
    original-variable solution falls outside double range or collapses
    onto a domain boundary of the equation as written; solver errors
    (NoSolutionOnBranch, domain violations) propagate.
    """
    problem = canonicalize(eq)
    # the first two shapes ARE the primitive equations; their namesake
    # solvers give bit-identical agreement
    if eq.shape is EquationShape.PRODUCT_LOGLOG:
        res = solve_method1(problem.X, cfg)
    elif eq.shape is EquationShape.EXP_TIMES_LOG and problem.X > _EXP_TIMES_LOG_FLOOR:
        res = solve_method2(problem.X, cfg)
    else:
        res = general_solve(problem.to_general(branch), cfg)
    try:
        z = problem.back_map(res.y)
    except OverflowError as exc:
        raise UntransformableError(
            f"{eq.shape.value}: solution in the original variable overflows "
            f"double precision ({problem.description} at y = {res.y:.6g})"
        ) from exc
    if math.isfinite(z):
        try:
            residual = original_residual(eq, z)
        except (ValueError, ArithmeticError) as exc:
            # the nearest representable z sits ON a domain boundary of the
            # original equation (e.g. z = 1 under a ln ln): the root exists
            # but no double can express it in this variable
            raise UntransformableError(
                f"{eq.shape.value}: solution in the original variable collapses "
                f"onto a domain boundary ({problem.description} at y = {res.y:.6g})"
            ) from exc
    else:
        residual = math.nan
    return SolveResult(
        y=z,
        trace=res.trace,
        status=res.status,
        final_residual=residual,
        relative_error_estimate=res.relative_error_estimate,
        precision_limited=res.precision_limited,
    )
