"""Independent cross-checks for the iterative solvers.

Nothing here shares code with the quadratic-update machinery: roots come
from bisection or plain Newton on the defining equations, and the Lambert
W evaluator is a self-contained Newton iteration.  Tests use this module
as the source of truth when freezing expected values, and the identity
suite checks the solvers against closed forms built on W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import DomainError, NFuncError, Scalar
from .solvers import (
    IterationStep,
    SolveResult,
    SolveStatus,
    forward,
    forward_negative,
    nfunc,
)

__all__ = [
    "ResidualProblem",
    "BracketError",
    "DerivativeZero",
    "bisect",
    "newton_solve",
    "lambert_w0",
    "nfunc_bisect",
    "IdentityResult",
    "IDENTITY_NAMES",
    "CHAIN_IDENTITY_NAMES",
    "check_identity",
    "run_identity_suite",
]

#: Published 10-digit value of the y solving y*exp(exp(y)) = 1.
UNIT_SOLUTION: Scalar = 0.2698741376


class BracketError(NFuncError):
    """The supplied interval does not bracket a sign change."""


class DerivativeZero(NFuncError):
    """Newton hit a point where the derivative vanishes."""


@dataclass(frozen=True)
class ResidualProblem:
    """A scalar root-finding problem f(x) = 0.

    Attributes:
        f: the residual function.
        df: its derivative, required by :func:`newton_solve` only.
        name: label used in error messages.
    """

    f: Callable[[Scalar], Scalar]
    df: Callable[[Scalar], Scalar] | None = None
    name: str = ""


def bisect(
    problem: ResidualProblem,
    lo: Scalar,
    hi: Scalar,
    tol: Scalar = 5e-16,
    max_iter: int = 200,
) -> Scalar:
    """Bisection root of ``problem.f`` on [lo, hi].

    Runs until the interval width falls under ``tol*max(1, |mid|)`` or the
    iteration budget is spent; either way the final midpoint is returned,
    so 200 iterations always reaches double-precision resolution.

    Raises:
        BracketError: if f(lo) and f(hi) have the same (nonzero) sign.
    """
    flo = problem.f(lo)
    fhi = problem.f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise BracketError(
            f"{problem.name or 'f'} has no sign change on [{lo!r}, {hi!r}]"
        )
    for _ in range(max_iter):
        mid = (lo + hi) / 2.0
        if hi - lo <= tol * max(1.0, abs(mid)):
            return mid
        fm = problem.f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2.0


def newton_solve(
    problem: ResidualProblem,
    x0: Scalar,
    tol: Scalar = 1e-12,
    max_iter: int = 60,
) -> SolveResult:
    """Plain Newton iteration, packaged like a solver run.

    The trace reuses :class:`nfunc.solvers.IterationStep` with l = m = 0,
    since Newton has no update quadratic; ``a`` is the Newton step and
    ``residual`` is f at the new iterate.

    Raises:
        ValueError: if the problem carries no derivative.
        DerivativeZero: if f' vanishes at an iterate.
    """
    if problem.df is None:
        raise ValueError("newton_solve needs a problem with a derivative")
    steps: list[IterationStep] = []
    x = x0
    for k in range(1, max_iter + 1):
        d = problem.df(x)
        if d == 0.0:
            raise DerivativeZero(f"derivative of {problem.name or 'f'} vanished at {x!r}")
        a = -problem.f(x) / d
        x_next = x + a
        steps.append(IterationStep(k, x, 0.0, 0.0, a, x_next, problem.f(x_next)))
        x = x_next
        if abs(a) <= tol * max(1.0, abs(x)):
            return SolveResult(
                x, tuple(steps), SolveStatus.CONVERGED, problem.f(x),
                abs(a) / max(1.0, abs(x)),
            )
    return SolveResult(
        x, tuple(steps), SolveStatus.MAX_ITER_REACHED, problem.f(x),
        abs(steps[-1].a) / max(1.0, abs(x)),
    )


def lambert_w0(x: Scalar) -> Scalar:
    """Principal branch of the Lambert W function (w*exp(w) = x).

    Newton iteration on w*exp(w) - x with a seed chosen per region: the
    asymptotic ln x - lnln x for large x, x/(1 + x) near zero, and the
    branch-point expansion in p = sqrt(2*(e*x + 1)) near x = -1/e.
    Accurate to ~1e-15 relative across the domain.

    Raises:
        DomainError: if ``x < -1/e``, where no real branch exists.
    """
    if not math.isfinite(x):
        raise DomainError(f"lambert_w0 requires finite x, got {x!r}")
    branch_point = -math.exp(-1.0)
    if x < branch_point:
        raise DomainError(f"lambert_w0 domain is [-1/e, inf), got {x!r}")
    if x == 0.0:
        return 0.0
    if x > math.e:
        lx = math.log(x)
        w = lx - math.log(lx)
    elif x < -0.25:
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
        if w <= -1.0:
            w = -1.0 + 1e-12
    else:
        w = x / (1.0 + x)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        d = ew * (1.0 + w)
        if d == 0.0:
            break
        step = f / d
        w -= step
        if abs(step) <= 1e-16 * max(1.0, abs(w)):
            break
    return w


def nfunc_bisect(X: Scalar) -> Scalar:
    """Bisection reference for the solver entry point, sharing none of it.

    X > 0 brackets y*exp(exp(y)) = X on [0, min(6.5, max(1, lnln X + 1))],
    X < 0 brackets the magnitude problem on [0, |X|] and negates.  The 6.5
    ceiling caps usable X at roughly 1e289.
    """
    if X == 0.0:
        return 0.0
    if X > 0.0:
        hi = 1.0
        if X > math.e:
            hi = min(6.5, math.log(math.log(X)) + 1.0)
        return bisect(
            ResidualProblem(lambda y: forward(y) - X, name="positive branch"),
            0.0,
            hi,
        )
    mag = -X
    return -bisect(
        ResidualProblem(lambda u: forward_negative(u) - mag, name="negative branch"),
        0.0,
        mag,
    )


@dataclass(frozen=True)
class IdentityResult:
    """One identity check: solver output vs a closed-form expectation."""

    name: str
    x: Scalar | None
    computed: Scalar
    expected: Scalar
    rel_err: Scalar
    passed: bool


def _omega() -> Scalar:
    return lambert_w0(1.0)


# Point identities: name -> (X argument, expectation thunk).
_POINT_IDENTITIES: dict[str, tuple[Callable[[], Scalar], Callable[[], Scalar]]] = {
    # forward(1) = e^e, so the solver must return exactly 1 there
    "unit_at_exp_e": (lambda: math.exp(math.e), lambda: 1.0),
    # forward_negative(1) = e^(1/e); negated input lands on the negative branch
    "neg_unit_at_exp_inv_e": (lambda: -math.exp(1.0 / math.e), lambda: -1.0),
    "unit_solution": (lambda: 1.0, lambda: UNIT_SOLUTION),
    # omega*e^omega = 1 makes -omega the negative-branch value at -1
    "omega_at_neg_one": (lambda: -1.0, lambda: -_omega()),
    "omega_product": (lambda: _omega() * math.exp(1.0 / _omega()), _omega),
    "e_at_tower": (lambda: math.exp(1.0 + math.exp(math.e)), lambda: math.e),
}

#: Parameterized identities built on the Lambert W chain: w = W(x) gives
#: exp(w) = x/w, so the forward maps evaluate in closed form at y = +/-w.
CHAIN_IDENTITY_NAMES: tuple[str, ...] = ("w_chain_positive", "w_chain_negative")

IDENTITY_NAMES: tuple[str, ...] = tuple(_POINT_IDENTITIES) + CHAIN_IDENTITY_NAMES


def check_identity(name: str, x: Scalar | None = None, tol: Scalar = 1e-8) -> IdentityResult:
    """Check one identity by name, comparing solver output to closed form.

    The two ``w_chain_*`` identities require a parameter ``x > 0``:
    with w = W(x), the positive chain states that the solver returns w at
    X = w*exp(x/w), and the negative chain that it returns -w at
    X = -w*exp(w/x).  Point identities reject a parameter.

    Raises:
        ValueError: unknown name, or a parameter mismatch.
    """
    if name in _POINT_IDENTITIES:
        if x is not None:
            raise ValueError(f"identity {name!r} takes no parameter")
        make_X, make_expected = _POINT_IDENTITIES[name]
        X = make_X()
        expected = make_expected()
    elif name in CHAIN_IDENTITY_NAMES:
        if x is None or x <= 0.0:
            raise ValueError(f"identity {name!r} needs a parameter x > 0")
        w = lambert_w0(x)
        if name == "w_chain_positive":
            X = w * math.exp(x / w)
            expected = w
        else:
            X = -w * math.exp(w / x)
            expected = -w
    else:
        raise ValueError(f"unknown identity {name!r}; known: {', '.join(IDENTITY_NAMES)}")
    computed = nfunc(X).y
    rel = abs(computed - expected) / max(1.0, abs(expected))
    return IdentityResult(name, x, computed, expected, rel, rel <= tol)


def run_identity_suite(
    tol: Scalar = 1e-8, chain_samples: tuple[Scalar, ...] = (0.5, 1.0, 2.0, math.e)
) -> tuple[IdentityResult, ...]:
    """Run every identity: all point checks plus each chain at each sample."""
    results = [check_identity(name, tol=tol) for name in _POINT_IDENTITIES]
    for name in CHAIN_IDENTITY_NAMES:
        for x in chain_samples:
            results.append(check_identity(name, x, tol=tol))
    return tuple(results)
