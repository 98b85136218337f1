"""Solvers for the generalized problem y**p * exp(exp(y)) = X.

Two forms share this module:

* positive form  (``y**p * exp(exp(y)) = X``): substituting z = exp(y)
  turns it into ``z + p*lnln z = ln X``, iterated in z exactly like
  method 2, of which it is the p = 1 special case.  For p < 0 the
  equation has up to two real solutions; the lower branch takes the
  minus quadratic root and the upper branch the plus root.
* negative-exponent form (``y**p * exp(exp(-y)) = X``): iterated directly
  in y via ``y + lnln(X / y**p) = 0``, the p-generalization of method 3.
  This form has a single meaningful solution per problem and uses the
  smaller-magnitude quadratic root throughout (see
  :func:`nfunc.solvers.step_method3` for why selection by magnitude is
  the right rule on this side).
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable
from dataclasses import dataclass

from .core import (
    EPS,
    DomainError,
    NFuncError,
    QuadraticCoeffs,
    RootBranch,
    Scalar,
    guarded_ln,
    quadratic_root,
    smallest_root,
)
from .solvers import (
    IterationStep,
    SolveConfig,
    SolveResult,
    SolveStatus,
    _solve_with_retries,
)

__all__ = [
    "ProblemForm",
    "Branch",
    "GeneralProblem",
    "NoSolutionOnBranch",
    "general_forward",
    "general_step",
    "general_step_negative_exp",
    "general_solve",
]

#: Consecutive steps with non-shrinking corrections before a p < 0 run is
#: declared off-branch; long enough to ride out one rough early step.
_STALL_WINDOW = 5


class ProblemForm(enum.Enum):
    POSITIVE_EXP = "positive_exp"
    NEGATIVE_EXP = "negative_exp"


class Branch(enum.Enum):
    """Solution branch for the positive form with p < 0.

    LOWER is the smaller root (minus quadratic branch), UPPER the larger
    (plus branch).  Ignored when p > 0, where the solution is unique.
    """

    LOWER = "lower"
    UPPER = "upper"


class NoSolutionOnBranch(NFuncError):
    """Iteration established that the requested branch holds no root.

    Raised for p < 0 when every retry either exits the feasible region or
    stalls (corrections stop shrinking / iterates cycle): the signature of
    an X outside the branch's range.
    """


@dataclass(frozen=True)
class GeneralProblem:
    """One instance of the generalized equation.

    Attributes:
        p: the exponent; must be nonzero (p = 0 degenerates to a pure
            double exponential with no inverse problem to solve).
        X: right-hand side, must be positive.
        form: which sign the inner exponential carries.
        branch: which solution to chase when the positive form has two
            (p < 0); None selects UPPER, the branch the iteration reaches
            from the standard start.
        p_ratio: optional integer pair (num, den) asserting p exactly.
            For the negative-exponent form this enables the parity check:
            written with base -y, the equation only has real solutions
            when both numerator and denominator are odd, so any even
            entry is rejected up front.
    """

    p: Scalar
    X: Scalar
    form: ProblemForm = ProblemForm.POSITIVE_EXP
    branch: Branch | None = None
    p_ratio: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.p == 0.0 or not math.isfinite(self.p):
            raise DomainError(f"exponent p must be finite and nonzero, got {self.p!r}")
        if not self.X > 0.0 or not math.isfinite(self.X):
            raise DomainError(f"X must be finite and positive, got {self.X!r}")
        if self.p_ratio is not None:
            num, den = self.p_ratio
            if den == 0:
                raise DomainError("p_ratio denominator must be nonzero")
            g = math.gcd(num, den)
            num, den = num // g, den // g
            if not math.isclose(self.p, num / den, rel_tol=1e-12):
                raise DomainError(f"p_ratio {self.p_ratio} does not equal p = {self.p!r}")
            if self.form is ProblemForm.NEGATIVE_EXP and (num % 2 == 0 or den % 2 == 0):
                raise DomainError(
                    "negative-exponent form with base -y requires an odd/odd "
                    f"exponent ratio in lowest terms; got {num}/{den}"
                )


def general_forward(y: Scalar, p: Scalar, form: ProblemForm) -> Scalar:
    """Evaluate y**p * exp(exp(+/-y)) for y > 0.

    Computed as exp(p*ln y + exp(+/-y)) to keep fractional p exact.

    Raises:
        DomainError: if ``y <= 0``.
        OverflowError: if the result exceeds float range.
    """
    if y <= 0.0:
        raise DomainError(f"general_forward requires y > 0, got {y!r}")
    inner = math.exp(-y) if form is ProblemForm.NEGATIVE_EXP else math.exp(y)
    arg = p * math.log(y) + inner
    if arg > 709.0:
        raise OverflowError(f"general_forward overflows at y = {y!r}, p = {p!r}")
    return math.exp(arg)


def general_step(
    z: Scalar, p: Scalar, X: Scalar, branch: RootBranch = RootBranch.PLUS, index: int = 1
) -> IterationStep:
    """One update step of the positive form in z (z + p*lnln z = ln X).

    Args:
        z: current iterate, must exceed 1.
        p: exponent of the original problem.
        X: right-hand side, positive.
        branch: which quadratic root supplies the correction; PLUS is the
            standard choice (and the only solution for p > 0), MINUS
            chases the lower branch when p < 0.
        index: 1-based step position.

    Raises:
        DomainError / NoRealRoot: as for the method-2 stepper.
    """
    if z <= 1.0:
        raise DomainError(f"general iterate must exceed 1, got {z!r}")
    lnX = guarded_ln(X, "general ln X")
    L = math.log(z)
    LL = guarded_ln(L, "general lnln")
    R = lnX - p * LL - z
    l = -2.0 * (p + z * L) / (1.0 + L) + R
    m = 2.0 * z * L * R / (1.0 + L)
    a = quadratic_root(QuadraticCoeffs(l, m), branch)
    z_next = z + a
    return IterationStep(
        index, z, l, m, a, z_next, _positive_residual(z_next, p, lnX)
    )


def _positive_residual(z: Scalar, p: Scalar, lnX: Scalar) -> Scalar:
    if z <= 1.0:
        return math.nan
    return lnX - p * math.log(math.log(z)) - z


def _positive_orig_residual(z: Scalar, p: Scalar, X: Scalar, lnX: Scalar) -> Scalar:
    # Original units: X*(exp(-method residual) - 1).
    r = _positive_residual(z, p, lnX)
    if not math.isfinite(r):
        return math.nan
    if -r > 700.0:
        return math.inf
    return X * math.expm1(-r)


def general_step_negative_exp(
    y: Scalar, p: Scalar, X: Scalar, index: int = 1
) -> IterationStep:
    """One update step of the negative-exponent form (y + lnln(X/y**p) = 0).

    The correction is the smaller-magnitude quadratic root; the published
    trajectories for this form take the minus root wherever the log
    factor exceeds 1, which is exactly what magnitude selection does.

    Raises:
        DomainError: if ``y <= 0``, the log factor ln(X/y**p) is not
            positive, or the update is singular there.
        NoRealRoot: if the update quadratic has no real root.
    """
    if y <= 0.0:
        raise DomainError(f"negative-exponent iterate must be positive, got {y!r}")
    Q = math.log(X) - p * math.log(y)
    if Q <= 0.0:
        raise DomainError(f"log factor must be positive at y = {y!r}")
    if Q == 1.0:
        raise DomainError(f"update singular at y = {y!r}")
    QQ = math.log(Q)
    S = y + QQ
    l = -S + 2.0 * (y * Q - p) / (1.0 - Q)
    m = 2.0 * y * Q * S / (1.0 - Q)
    a = smallest_root(QuadraticCoeffs(l, m))
    y_next = y + a
    return IterationStep(
        index, y, l, m, a, y_next, _negative_residual(y_next, p, X)
    )


def _negative_residual(y: Scalar, p: Scalar, X: Scalar) -> Scalar:
    if y <= 0.0:
        return math.nan
    Q = math.log(X) - p * math.log(y)
    if Q <= 0.0:
        return math.nan
    return y + math.log(Q)


def _negative_orig_residual(y: Scalar, p: Scalar, X: Scalar) -> Scalar:
    try:
        return general_forward(y, p, ProblemForm.NEGATIVE_EXP) - X
    except OverflowError:
        return math.inf


def _edge_fixed_point(p: Scalar, lnX: Scalar, y0: Scalar) -> Scalar | None:
    """Full-precision y for a root the z iteration cannot resolve.

    A solution with y below ~1e-13 puts z = exp(y) within a few ulps of
    1, where the z-space iteration is blind.  The equivalent fixed point
    y = exp((lnX - exp(y))/p), iterated directly in y, contracts at rate
    ~ y/|p| and is exact there.  Returns None when the iteration cannot
    be trusted (divergence or overflow), never on mere slowness.
    """
    y = y0
    for _ in range(25):
        try:
            y_next = math.exp((lnX - math.exp(y)) / p)
        except OverflowError:
            return None
        if not (math.isfinite(y_next) and y_next > 0.0):
            return None
        if abs(y_next - y) <= 0.5 * EPS * y:
            return y_next
        y = y_next
    return None


def _critical_split(p: Scalar) -> Scalar:
    """z at which the two p < 0 solution branches meet.

    The iterated map z + p*lnln z has its turning point where
    z*ln z = -p; the lower solution lives left of it, the upper right.
    Newton on the convex g(z) = z*ln z + p settles in a few steps.
    """
    q = -p
    z = 1.0 + q if q < 1.0 else q / math.log(q + 1.0) + 1.0
    for _ in range(60):
        g = z * math.log(z) - q
        z_new = z - g / (math.log(z) + 1.0)
        if z_new <= 1.0:
            z_new = (z + 1.0) / 2.0
        done = abs(z_new - z) <= 1e-15 * z
        z = z_new
        if done:
            break
    return z


def _informed_lower(p: Scalar, lnX: Scalar, zc: Scalar) -> tuple[Scalar, ...]:
    # fixed-point form z = exp(exp((lnX - z)/p)) homes in on the lower
    # solution; two passes are enough to land in the step's basin
    out: list[Scalar] = []
    z = min(2.0, (1.0 + zc) / 2.0)
    for _ in range(2):
        t = (lnX - z) / p
        if t > 6.5:  # exp(exp(t)) overflows past t ~ ln 709
            break
        z = math.exp(math.exp(t))
        if not z > 1.0:
            break
        out.append(z)
    out.reverse()
    out.append((1.0 + zc) / 2.0)
    out.append(math.sqrt(zc))
    return tuple(g for g in out if math.isfinite(g) and g > 1.0)


def _informed_upper(p: Scalar, lnX: Scalar, zc: Scalar) -> tuple[Scalar, ...]:
    # fixed-point form z = lnX - p*lnln z grows toward the upper
    # solution from anywhere right of the split
    out: list[Scalar] = []
    z = max(2.0 * zc, zc + 2.0)
    for _ in range(2):
        z = lnX - p * math.log(math.log(z))
        if not (math.isfinite(z) and z > zc):
            break
        out.append(z)
    out.reverse()
    out.append(2.0 * zc)
    out.append(zc + 2.0)
    return tuple(g for g in out if math.isfinite(g) and g > 1.0)


def _default_negative_guess(p: Scalar, X: Scalar) -> Scalar:
    # u = X**(1/p) is the feasibility edge (log factor vanishes there).
    u = X ** (1.0 / p)
    if p > 0.0:
        # Root lies below u; mirror the method-3 default in u units.
        return u / 2.0 if u <= 2.0 else u * (1.0 - 1e-4)
    # p < 0: root lies above u; start just outside the edge.
    return 1.01 * u


def general_solve(problem: GeneralProblem, cfg: SolveConfig | None = None) -> SolveResult:
    """Solve a :class:`GeneralProblem` and return y.

    Positive form: iterates in z = exp(y) from z = 2 by default and
    returns y = ln z.  For p < 0 the branch in ``problem.branch`` picks
    which of the two solutions is chased (UPPER when unset), and a run
    whose every retry exits the feasible region or stalls raises
    :class:`NoSolutionOnBranch` instead of returning, since that is the
    iteration's way of saying the branch holds no root at this X.

    Negative-exponent form: iterates directly in y from a default start
    on the feasible side of the edge u = X**(1/p).

    Reduces exactly to method 2 / method 3 at p = 1.
    """
    cfg = cfg or SolveConfig()
    if problem.form is ProblemForm.NEGATIVE_EXP:
        g0 = (
            cfg.initial_guess
            if cfg.initial_guess is not None
            else _default_negative_guess(problem.p, problem.X)
        )
        u = problem.X ** (1.0 / problem.p)
        # Root estimate from one substitution of y ~ u into the fixed-point
        # form y = u*exp(-exp(-y)/p); lands on the feasible side for either
        # sign of p.
        informed = u * math.exp(-math.exp(-u) / problem.p)
        result, _ = _solve_with_retries(
            lambda y, k: general_step_negative_exp(y, problem.p, problem.X, k),
            g0,
            cfg=cfg,
            in_domain=lambda y: y > 0.0
            and math.log(problem.X) - problem.p * math.log(y) > 0.0,
            orig_residual=lambda y: _negative_orig_residual(y, problem.p, problem.X),
            residual_scale=max(1.0, problem.X),
            anchor=_default_negative_guess(problem.p, problem.X),
            boundary=u,
            to_y=lambda y: y,
            informed=(informed,),
        )
        return result

    branch = problem.branch or Branch.UPPER
    root = RootBranch.PLUS if branch is Branch.UPPER else RootBranch.MINUS
    if problem.p > 0.0:
        root = RootBranch.PLUS
    g0 = cfg.initial_guess if cfg.initial_guess is not None else 2.0
    lnX = math.log(problem.X)
    # Root estimate near the z = 1 edge: z - 1 ~ exp((ln X - z)/p) with
    # z ~ 1, which is where small |p| pins a root for X < e (p > 0) or
    # pins the lower solution (p < 0).
    edge_exponent = (lnX - 1.0) / problem.p
    if edge_exponent <= -30.0 and (problem.p > 0.0 or branch is Branch.LOWER):
        y_edge = math.exp(edge_exponent)
        if y_edge == 0.0 and problem.p < 0.0:
            raise NoSolutionOnBranch(
                f"lower solution at p = {problem.p}, X = {problem.X} lies below "
                f"the double-precision range (y ~ exp({edge_exponent:.4g}))"
            )
        if 0.0 < y_edge <= 0.01 * abs(problem.p):
            y_exact = _edge_fixed_point(problem.p, lnX, y_edge)
            if y_exact is not None:
                resid = general_forward(y_exact, problem.p, problem.form) - problem.X
                return SolveResult(y_exact, (), SolveStatus.CONVERGED, resid, 0.0)
    edge = (1.0 + math.exp(edge_exponent),) if edge_exponent < 700.0 else ()
    in_domain: Callable[[Scalar], bool] = lambda z: z > 1.0
    informed = edge
    if problem.p < 0.0:
        zc = _critical_split(problem.p)
        if branch is Branch.LOWER:
            # the lower solution lives in (1, zc); capping the domain
            # keeps a wandering iterate from settling on the upper one
            cap = zc * (1.0 + 1e-6)
            in_domain = lambda z: 1.0 < z < cap
            informed = _informed_lower(problem.p, lnX, zc) + edge
        else:
            informed = _informed_upper(problem.p, lnX, zc)
    result, stalled = _solve_with_retries(
        lambda z, k: general_step(z, problem.p, problem.X, root, k),
        g0,
        cfg=cfg,
        in_domain=in_domain,
        orig_residual=lambda z: _positive_orig_residual(z, problem.p, problem.X, lnX),
        residual_scale=max(1.0, problem.X),
        anchor=2.0,
        boundary=1.0,
        to_y=lambda z: guarded_ln(z, "general result"),
        informed=informed,
        stall_window=_STALL_WINDOW if problem.p < 0.0 else 0,
    )
    if problem.p < 0.0 and result.status is not SolveStatus.CONVERGED:
        failed_everywhere = result.status is SolveStatus.LEFT_DOMAIN or stalled
        if failed_everywhere:
            raise NoSolutionOnBranch(
                f"{branch.value} branch holds no reachable root at p = {problem.p}, "
                f"X = {problem.X} (iteration {'stalled' if stalled else 'left the domain'})"
            )
    # Small-root polish: a converged z-space iterate stores y as z = 1 + y,
    # so y keeps only absolute precision eps; one contraction pass of
    # y = exp((ln X - e^y)/p) per decade of error restores full relative
    # precision wherever the map contracts (|y e^y / p| well under 1).
    if (
        result.status is SolveStatus.CONVERGED
        and math.isfinite(result.y)
        and 0.0 < result.y
        and result.y * math.exp(result.y) <= 0.1 * abs(problem.p)
    ):
        refined = _edge_fixed_point(problem.p, lnX, result.y)
        if refined is not None:
            resid = general_forward(refined, problem.p, problem.form) - problem.X
            if math.isfinite(resid) and (
                abs(resid) <= abs(result.final_residual)
                or not math.isfinite(result.final_residual)
            ):
                shift = abs(refined - result.y) / max(abs(refined), EPS)
                return SolveResult(
                    refined, result.trace, result.status, resid, shift, False
                )
    return result
