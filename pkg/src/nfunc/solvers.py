"""Iterative solvers for y*exp(exp(y)) = X on both sign branches.

Three rewrites of the defining equation drive the package, each iterated
with the same quadratic-update scheme built on :func:`nfunc.core.log_ratio_approx`:

* method 1:  z*ln(ln z) = X        with z = exp(exp(y)), y = ln(ln z)
* method 2:  z + ln(ln z) = ln X   with z = exp(y),       y = ln z
* method 3:  y + ln(ln(X/y)) = 0   directly in y, for the negative branch
             (stated for the magnitude problem y*exp(exp(-y)) = X, X > 0)

One step linearizes the rewrite around the current iterate, replaces the
awkward log ratio by its rational approximant, and solves the resulting
quadratic ``a**2 = l*a + m`` for the correction ``a``.  :func:`nfunc` is
the user-facing entry point that dispatches on the sign of X.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterator

from .core import (
    EPS,
    DomainError,
    NFuncError,
    NoRealRoot,
    QuadraticCoeffs,
    RootBranch,
    Scalar,
    guarded_ln,
    guarded_lnln,
    quadratic_root,
    smallest_root,
)

__all__ = [
    "FORWARD_Y_MAX",
    "FORWARD_NEGATIVE_Y_MIN",
    "PRECISION_LIMIT_X",
    "SolveStatus",
    "SolveConfig",
    "IterationStep",
    "SolveResult",
    "LeftDomainError",
    "forward",
    "forward_negative",
    "step_method1",
    "step_method2",
    "step_method3",
    "solve_method1",
    "solve_method2",
    "solve_method3",
    "nfunc",
]

#: Largest y accepted by :func:`forward`; exp(exp(6.5)) is within 1e289 of
#: the float ceiling, leaving headroom for the final multiply.
FORWARD_Y_MAX: Scalar = 6.5

#: Smallest y accepted by :func:`forward_negative`; below this exp(-y)
#: itself overflows the outer exponential.
FORWARD_NEGATIVE_Y_MIN: Scalar = -6.57

#: For X at or above this threshold the negative-branch root differs from X
#: by less than one ulp of X (the gap is X*exp(-X)), so iterating cannot
#: improve on y = X in binary64.  Equals -ln(eps/2) ~ 36.7368.
PRECISION_LIMIT_X: Scalar = -math.log(EPS / 2.0)

# Retry ladder depth: halving a gap 78 times shrinks it below any double's
# relative spacing, so a deeper ladder could only repeat iterates.
_LADDER_RUNGS = 78


class SolveStatus(enum.Enum):
    CONVERGED = "converged"
    MAX_ITER_REACHED = "max_iter_reached"
    LEFT_DOMAIN = "left_domain"


class LeftDomainError(NFuncError):
    """An iterate left the region where the rewrite is defined."""


@dataclass(frozen=True)
class SolveConfig:
    """Knobs shared by every solve entry point.

    Attributes:
        tol: relative tolerance; a run stops once the last correction and
            the original-units residual both fall under it (each scaled by
            max(1, |reference|)).
        max_iter: hard cap on iteration steps per attempt.
        initial_guess: starting iterate in the method's own variable
            (z for methods 1-2, y for method 3); None selects the method's
            documented default.
        method: solver used by :func:`nfunc` for X > 0; one of "auto",
            "method1", "method2" ("auto" means method 2, the fastest of
            the three on the positive branch).
    """

    tol: Scalar = 1e-9
    max_iter: int = 50
    initial_guess: Scalar | None = None
    method: str = "auto"

    def __post_init__(self) -> None:
        if self.tol <= 0.0:
            raise ValueError(f"tol must be positive, got {self.tol!r}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter!r}")
        if self.method not in ("auto", "method1", "method2", "method3"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class IterationStep:
    """One quadratic-update step, recorded for diagnostics.

    ``iterate_after == iterate_before + a`` exactly (same float addition
    the solver performed).  ``residual`` is the defining equation of the
    method evaluated at ``iterate_after`` in method space, or NaN when the
    new iterate fell outside that equation's domain.
    """

    index: int
    iterate_before: Scalar
    l: Scalar
    m: Scalar
    a: Scalar
    iterate_after: Scalar
    residual: Scalar


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a solve run.

    Attributes:
        y: the solution in problem units (NaN when the run failed before
            producing an in-domain iterate).
        trace: every step taken by the attempt that produced ``y``.
        status: how the run ended.
        final_residual: forward(y) - X in original units (NaN on failure).
        relative_error_estimate: size of the last correction relative to
            the last iterate, in method space; a cheap error proxy.
        precision_limited: True when the root is indistinguishable from a
            boundary value at working precision and was returned directly.
    """

    y: Scalar
    trace: tuple[IterationStep, ...]
    status: SolveStatus
    final_residual: Scalar
    relative_error_estimate: Scalar
    precision_limited: bool = False


def forward(y: Scalar) -> Scalar:
    """Evaluate y*exp(exp(y)).

    Raises:
        OverflowError: if ``y > FORWARD_Y_MAX``.
    """
    if y > FORWARD_Y_MAX:
        raise OverflowError(
            f"forward overflows for y > {FORWARD_Y_MAX}, got {y!r}"
        )
    return y * math.exp(math.exp(y))


def forward_negative(y: Scalar) -> Scalar:
    """Evaluate y*exp(exp(-y)), the negative-branch companion map.

    Raises:
        OverflowError: if ``y < FORWARD_NEGATIVE_Y_MIN``.
    """
    if y < FORWARD_NEGATIVE_Y_MIN:
        raise OverflowError(
            f"forward_negative overflows for y < {FORWARD_NEGATIVE_Y_MIN}, got {y!r}"
        )
    return y * math.exp(math.exp(-y))


def _method1_residual(z: Scalar, X: Scalar) -> Scalar:
    if z <= 1.0:
        return math.nan
    return z * math.log(math.log(z)) - X


def step_method1(z: Scalar, X: Scalar, index: int = 1) -> IterationStep:
    """One quadratic-update step of method 1 (z*lnln z = X).

    Args:
        z: current iterate, must exceed 1.
        X: right-hand side of the rewrite.
        index: 1-based position of this step in a trace.

    Returns:
        The step record; the correction is the plus root.

    Raises:
        DomainError: if ``z <= 1`` or the shared denominator vanishes.
        NoRealRoot: if the update quadratic has no real root.
    """
    if z <= 1.0:
        raise DomainError(f"method1 iterate must exceed 1, got {z!r}")
    L = math.log(z)
    LL = guarded_ln(L, "method1 lnln")
    D = 2.0 + LL * (1.0 + L)
    if D == 0.0:
        raise DomainError(f"method1 update singular at z = {z!r}")
    l = -z - (2.0 * z * L * LL - X * (1.0 + L)) / D
    m = -2.0 * z * L * (z * LL - X) / D
    a = quadratic_root(QuadraticCoeffs(l, m), RootBranch.PLUS)
    z_next = z + a
    return IterationStep(index, z, l, m, a, z_next, _method1_residual(z_next, X))


def _method2_residual(z: Scalar, lnX: Scalar) -> Scalar:
    if z <= 1.0:
        return math.nan
    return z + math.log(math.log(z)) - lnX


def step_method2(z: Scalar, X: Scalar, index: int = 1) -> IterationStep:
    """One quadratic-update step of method 2 (z + lnln z = ln X).

    Same calling convention as :func:`step_method1`; requires ``X > 0``.
    """
    if z <= 1.0:
        raise DomainError(f"method2 iterate must exceed 1, got {z!r}")
    lnX = guarded_ln(X, "method2 ln X")
    L = math.log(z)
    LL = guarded_ln(L, "method2 lnln")
    R = lnX - LL - z
    l = -2.0 * (1.0 + z * L) / (1.0 + L) + R
    m = 2.0 * z * L * R / (1.0 + L)
    a = quadratic_root(QuadraticCoeffs(l, m), RootBranch.PLUS)
    z_next = z + a
    return IterationStep(index, z, l, m, a, z_next, _method2_residual(z_next, lnX))


def _method3_residual(y: Scalar, X: Scalar) -> Scalar:
    if y <= 0.0 or y >= X:
        return math.nan
    return y + math.log(math.log1p((X - y) / y))


def step_method3(y: Scalar, X: Scalar, index: int = 1) -> IterationStep:
    """One quadratic-update step of method 3 (y + lnln(X/y) = 0, X > 0).

    The log factor is evaluated as log1p((X - y)/y), which keeps full
    precision when y hugs X and the factor is tiny.  The correction is the
    smaller-magnitude quadratic root: that root coincides with the plus
    root everywhere ln(X/y) < 1 (all of the published trajectories) and
    stays the meaningful correction when the factor exceeds 1, where the
    plus root diverges.

    Raises:
        DomainError: unless ``0 < y < X``, or if the update is singular.
        NoRealRoot: if the update quadratic has no real root.
    """
    if not 0.0 < y < X:
        raise DomainError(f"method3 iterate must lie in (0, X), got {y!r}")
    Q = math.log1p((X - y) / y)
    if Q <= 0.0:
        raise DomainError(f"method3 log factor must be positive at y = {y!r}")
    if Q == 1.0:
        raise DomainError(f"method3 update singular at y = {y!r}")
    QQ = math.log(Q)
    S = y + QQ
    l = -S + 2.0 * (y * Q - 1.0) / (1.0 - Q)
    m = 2.0 * y * Q * S / (1.0 - Q)
    a = smallest_root(QuadraticCoeffs(l, m))
    y_next = y + a
    return IterationStep(index, y, l, m, a, y_next, _method3_residual(y_next, X))


def _attempt_guesses(
    g0: Scalar,
    anchor: Scalar | None,
    boundary: Scalar | None,
    informed: tuple[Scalar, ...] = (),
) -> Iterator[Scalar]:
    """Deterministic retry schedule for a failed starting guess.

    Yields the guess itself, then the midpoint toward ``anchor`` (a point
    known to behave for the method), then any ``informed`` guesses (cheap
    closed-form root estimates supplied by the method), then a ladder of
    guesses that halve the remaining gap toward ``boundary`` (the domain
    edge the root may be hugging).  Duplicates are skipped.
    """
    seen: list[Scalar] = []

    def fresh(g: Scalar) -> bool:
        if any(g == s for s in seen):
            return False
        seen.append(g)
        return True

    if fresh(g0):
        yield g0
    if anchor is not None:
        g = (g0 + anchor) / 2.0
        if math.isfinite(g) and fresh(g):
            yield g
    for g in informed:
        if math.isfinite(g) and fresh(g):
            yield g
    if boundary is not None and math.isfinite(boundary):
        gap = g0 - boundary
        for k in range(1, _LADDER_RUNGS + 1):
            g = boundary + gap / 2.0**k
            if g == boundary:
                break
            if fresh(g):
                yield g


def _residual_floor_reached(
    r: Scalar,
    iterate: Scalar,
    orig_residual: Callable[[Scalar], Scalar],
) -> bool:
    """True when no adjacent double can beat the residual ``r``.

    Near a root that a single ulp of the iterate overshoots (ill
    conditioned iterate-to-residual maps, e.g. roots hugging a domain
    edge), the residual cannot be driven below the one-ulp sensitivity no
    matter how many steps run.  Probing both neighbours measures that
    sensitivity directly.
    """
    try:
        up = orig_residual(math.nextafter(iterate, math.inf))
        dn = orig_residual(math.nextafter(iterate, -math.inf))
    except (ArithmeticError, NFuncError):
        return False
    if not (math.isfinite(up) and math.isfinite(dn)):
        return False
    sensitivity = max(abs(up - r), abs(dn - r))
    return abs(r) <= 4.0 * sensitivity


def _run_attempt(
    step: Callable[[Scalar, int], IterationStep],
    guess: Scalar,
    *,
    tol: Scalar,
    max_iter: int,
    in_domain: Callable[[Scalar], bool],
    orig_residual: Callable[[Scalar], Scalar],
    residual_scale: Scalar,
    stall_window: int = 0,
) -> tuple[list[IterationStep], SolveStatus, bool, bool]:
    """Drive one iteration attempt from ``guess``.

    Returns (trace, status, stalled, pinned).  ``stalled`` is only ever
    True when ``stall_window > 0`` and the corrections stopped shrinking
    for that many consecutive steps, or the iterates entered an exact
    cycle; it is reported separately so callers can distinguish a stall
    from an ordinary iteration-budget exhaustion.  ``pinned`` is True for
    a convergence accepted at the double-precision residual floor rather
    than at the requested tolerance (see :func:`_residual_floor_reached`).
    """
    steps: list[IterationStep] = []
    iterate = guess
    recent: list[Scalar] = []
    non_decreasing = 0
    for k in range(1, max_iter + 1):
        if not in_domain(iterate):
            return steps, SolveStatus.LEFT_DOMAIN, False, False
        try:
            st = step(iterate, k)
        except (DomainError, NoRealRoot):
            return steps, SolveStatus.LEFT_DOMAIN, False, False
        steps.append(st)
        iterate = st.iterate_after
        try:
            r = orig_residual(iterate)
        except (ArithmeticError, NFuncError):
            r = math.nan
        if abs(st.a) <= tol * max(1.0, abs(iterate)) and math.isfinite(r):
            if abs(r) <= tol * residual_scale:
                return steps, SolveStatus.CONVERGED, False, False
            # step is a no-op at machine resolution: accept if provably
            # at the representable floor, otherwise keep trying
            if iterate == st.iterate_before and _residual_floor_reached(
                r, iterate, orig_residual
            ):
                return steps, SolveStatus.CONVERGED, False, True
        if stall_window > 0 and len(steps) >= 2:
            if abs(st.a) >= abs(steps[-2].a):
                non_decreasing += 1
                if non_decreasing >= stall_window:
                    return steps, SolveStatus.MAX_ITER_REACHED, True, False
            else:
                non_decreasing = 0
            if any(iterate == prev for prev in recent):
                return steps, SolveStatus.MAX_ITER_REACHED, True, False
        recent.append(iterate)
        if len(recent) > 6:
            recent.pop(0)
    return steps, SolveStatus.MAX_ITER_REACHED, False, False


def _solve_with_retries(
    step: Callable[[Scalar, int], IterationStep],
    g0: Scalar,
    *,
    cfg: SolveConfig,
    in_domain: Callable[[Scalar], bool],
    orig_residual: Callable[[Scalar], Scalar],
    residual_scale: Scalar,
    anchor: Scalar | None,
    boundary: Scalar | None,
    to_y: Callable[[Scalar], Scalar],
    informed: tuple[Scalar, ...] = (),
    stall_window: int = 0,
) -> tuple[SolveResult, bool]:
    """Shared solve loop: iterate, and on failure retry from fresh guesses.

    The first converged attempt wins.  When nothing converges, the
    attempt whose final in-domain iterate left the smallest residual is
    returned (ties go to the caller's own guess), so the result reports
    the best the iteration could actually do rather than whichever
    failure happened first.  Second return value reports a stall (see
    :func:`_run_attempt`).
    """

    def score(steps: list[IterationStep], status: SolveStatus) -> Scalar:
        if not steps or status is SolveStatus.LEFT_DOMAIN:
            return math.inf
        it = steps[-1].iterate_after
        if not in_domain(it):
            return math.inf
        try:
            r = orig_residual(it)
        except (ArithmeticError, NFuncError):
            return math.inf
        return abs(r) if math.isfinite(r) else math.inf

    best: tuple[list[IterationStep], SolveStatus, bool, bool] | None = None
    best_score = math.inf
    for guess in _attempt_guesses(g0, anchor, boundary, informed):
        steps, status, stalled, pinned = _run_attempt(
            step,
            guess,
            tol=cfg.tol,
            max_iter=cfg.max_iter,
            in_domain=in_domain,
            orig_residual=orig_residual,
            residual_scale=residual_scale,
            stall_window=stall_window,
        )
        if status is SolveStatus.CONVERGED:
            best = (steps, status, stalled, pinned)
            break
        s = score(steps, status)
        if best is None or s < best_score:
            best = (steps, status, stalled, pinned)
            best_score = s
    assert best is not None
    steps, status, stalled, pinned = best
    return _package(steps, status, orig_residual, in_domain, to_y, pinned), stalled


def _package(
    steps: list[IterationStep],
    status: SolveStatus,
    orig_residual: Callable[[Scalar], Scalar],
    in_domain: Callable[[Scalar], bool],
    to_y: Callable[[Scalar], Scalar],
    pinned: bool = False,
) -> SolveResult:
    if not steps:
        return SolveResult(math.nan, (), status, math.nan, math.nan)
    last = steps[-1]
    iterate = last.iterate_after
    rel = abs(last.a) / max(1.0, abs(iterate))
    usable = status is not SolveStatus.LEFT_DOMAIN and in_domain(iterate)
    if status is SolveStatus.CONVERGED or usable:
        try:
            y = to_y(iterate)
            resid = orig_residual(iterate)
        except (ArithmeticError, NFuncError):
            y, resid = math.nan, math.nan
    else:
        y, resid = math.nan, math.nan
    return SolveResult(y, tuple(steps), status, resid, rel, pinned)


def solve_method1(X: Scalar, cfg: SolveConfig | None = None) -> SolveResult:
    """Solve z*lnln z = X by method-1 iteration and return y = lnln z.

    Requires X > 0.  Default starting iterate z = 2; a guess that exits
    the domain (z <= 1) is retried from the schedule documented on
    :func:`_attempt_guesses` with anchor 2 and boundary 1.
    """
    cfg = cfg or SolveConfig()
    if not X > 0.0 or not math.isfinite(X):
        raise DomainError(f"solve_method1 requires finite X > 0, got {X!r}")
    g0 = cfg.initial_guess if cfg.initial_guess is not None else 2.0
    result, _ = _solve_with_retries(
        lambda z, k: step_method1(z, X, k),
        g0,
        cfg=cfg,
        in_domain=lambda z: z > 1.0,
        orig_residual=lambda z: _method1_residual(z, X),
        residual_scale=max(1.0, abs(X)),
        anchor=2.0,
        boundary=1.0,
        to_y=lambda z: guarded_lnln(z, "method1 result"),
    )
    return result


def _method2_orig_residual(z: Scalar, X: Scalar, lnX: Scalar) -> Scalar:
    # Original units: z*exp(...) - X == X*(exp(method residual) - 1).
    r = _method2_residual(z, lnX)
    if not math.isfinite(r):
        return math.nan
    if r > 700.0:
        return math.inf
    return X * math.expm1(r)


def solve_method2(X: Scalar, cfg: SolveConfig | None = None) -> SolveResult:
    """Solve z + lnln z = ln X by method-2 iteration and return y = ln z.

    Requires X > 0.  Default start z = 2 for X >= 1 and z = 1.001 for
    X < 1, where the root hugs the z = 1 edge.  Retries use anchor 2 and
    boundary 1.
    """
    cfg = cfg or SolveConfig()
    if not X > 0.0 or not math.isfinite(X):
        raise DomainError(f"solve_method2 requires finite X > 0, got {X!r}")
    lnX = math.log(X)
    if cfg.initial_guess is not None:
        g0 = cfg.initial_guess
    else:
        g0 = 2.0 if X >= 1.0 else 1.001
    # Near z = 1 the rewrite reads z - 1 ~ exp(ln X - z), so 1 + X/e is a
    # closed-form root estimate for small X; used as a retry rung.
    result, _ = _solve_with_retries(
        lambda z, k: step_method2(z, X, k),
        g0,
        cfg=cfg,
        in_domain=lambda z: z > 1.0,
        orig_residual=lambda z: _method2_orig_residual(z, X, lnX),
        residual_scale=max(1.0, abs(X)),
        anchor=2.0,
        boundary=1.0,
        to_y=lambda z: guarded_ln(z, "method2 result"),
        informed=(1.0 + X / math.e,),
    )
    return result


def _method3_orig_residual(y: Scalar, X: Scalar) -> Scalar:
    if y < 0.0:
        return math.nan
    return forward_negative(y) - X


def solve_method3(X: Scalar, cfg: SolveConfig | None = None) -> SolveResult:
    """Solve the magnitude problem y*exp(exp(-y)) = X, X > 0, by method 3.

    The root satisfies X - y = X*(1 - exp(-exp(-y))) ~ X*exp(-X) for large
    X, so for X >= PRECISION_LIMIT_X it is within one ulp of X itself:
    those calls return y = X immediately with ``precision_limited`` set
    rather than iterating against the precision floor.

    Default start y = X/2 for X <= 2, else y = X*(1 - 1e-4).  Iterates may
    land exactly on X (and converge there by the residual test); a start
    must lie strictly inside (0, X).  Retries anchor at X/2 and ladder
    toward the X edge.
    """
    cfg = cfg or SolveConfig()
    if not X > 0.0 or not math.isfinite(X):
        raise DomainError(f"solve_method3 requires finite X > 0, got {X!r}")
    if X >= PRECISION_LIMIT_X:
        resid = X * math.expm1(math.exp(-X))
        return SolveResult(X, (), SolveStatus.CONVERGED, resid, 0.0, True)
    if cfg.initial_guess is not None:
        g0 = cfg.initial_guess
    else:
        g0 = X / 2.0 if X <= 2.0 else X * (1.0 - 1e-4)
    # The root satisfies y = X*exp(-exp(-y)); substituting y ~ X once gives
    # a start that lands inside the contraction basin for mid-range X,
    # where both the default and the edge ladder start on the wrong side
    # of the update's sign flip at gap ~ X*exp(-X-2).
    result, _ = _solve_with_retries(
        lambda y, k: step_method3(y, X, k),
        g0,
        cfg=cfg,
        in_domain=lambda y: 0.0 < y < X,
        orig_residual=lambda y: _method3_orig_residual(y, X),
        residual_scale=max(1.0, abs(X)),
        anchor=X / 2.0,
        boundary=X,
        to_y=lambda y: y,
        informed=(X * math.exp(-math.exp(-X)),),
    )
    return result


def nfunc(X: Scalar, cfg: SolveConfig | None = None) -> SolveResult:
    """Solve y*exp(exp(y)) = X for y, on either sign branch.

    Dispatch: X > 0 goes to method 2 (or method 1 when the config says
    so); X = 0 returns y = 0 exactly; X < 0 is solved as the magnitude
    problem by method 3 and negated, so the returned trace is the
    method-3 trace in magnitude space.

    Raises:
        DomainError: if X is not finite.
        ValueError: if the configured method does not apply to X's sign.
    """
    cfg = cfg or SolveConfig()
    if not math.isfinite(X):
        raise DomainError(f"nfunc requires finite X, got {X!r}")
    if X == 0.0:
        return SolveResult(0.0, (), SolveStatus.CONVERGED, 0.0, 0.0)
    if X > 0.0:
        if cfg.method == "method1":
            return solve_method1(X, cfg)
        if cfg.method in ("auto", "method2"):
            return solve_method2(X, cfg)
        raise ValueError("method3 solves the negative branch; X > 0 needs method 1 or 2")
    if cfg.method not in ("auto", "method3"):
        raise ValueError(f"{cfg.method} applies to X > 0 only")
    mag = solve_method3(-X, cfg)
    return SolveResult(
        -mag.y,
        mag.trace,
        mag.status,
        -mag.final_residual,
        mag.relative_error_estimate,
        mag.precision_limited,
    )
