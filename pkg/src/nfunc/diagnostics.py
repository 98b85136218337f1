"""Convergence analysis over recorded iteration traces.

Two tools: ``analyze_trace`` measures the correction-shrinkage rate of a
finished run (the successive-ratio proxy for superlinear convergence),
and ``self_correction_probe`` knocks one iterate off course mid-run to
measure how the scheme recovers.  Both are pure functions used by the
command-line comparison views and the test suite.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

from .core import DomainError, NFuncError, Scalar, guarded_ln, guarded_lnln
from .solvers import (
    IterationStep,
    SolveConfig,
    _method1_residual,
    _method2_orig_residual,
    _method3_orig_residual,
    step_method1,
    step_method2,
    step_method3,
)

__all__ = [
    "ConvergenceReport",
    "InsufficientData",
    "ProbeOutcome",
    "analyze_trace",
    "self_correction_probe",
]


class InsufficientData(NFuncError):
    """The trace is too short for a meaningful rate measurement."""


@dataclass(frozen=True)
class ConvergenceReport:
    """Rate summary of one iteration trace.

    Attributes:
        ratios: successive correction-size ratios |a_{k+1}|/|a_k|, one
            per adjacent step pair (length = trace length - 1).  An exact
            landing (a_k = 0) contributes ratio 0, since every later step
            is a no-op.
        superlinear: True when the ratios are non-increasing from the
            second ratio onward and the final ratio is below one half.
            This is a finite-trace proxy: the limit statement (ratio
            tending to zero) is not testable on a handful of steps.  The
            first ratio is excluded because it measures the quality of
            the starting guess, not the order of the method.
        steps_to_tol: 1-based index of the first step whose correction
            satisfies |a| <= tol*max(1, |iterate|), or -1 if the trace
            never gets there.
        residual_history: the recorded method-space residual after each
            step.
    """

    ratios: tuple[Scalar, ...]
    superlinear: bool
    steps_to_tol: int
    residual_history: tuple[Scalar, ...]


def analyze_trace(trace: Sequence[IterationStep], tol: Scalar = 1e-9) -> ConvergenceReport:
    """Measure correction shrinkage over a recorded trace.

    Needs at least three steps: two ratios, so that one remains after
    discarding the guess-quality ratio.  Shorter traces (a run that
    converged almost immediately) raise InsufficientData; that is a
    statement about measurability, not about the run.
    """
    if len(trace) < 3:
        raise InsufficientData(
            f"need at least 3 recorded steps to measure a rate, got {len(trace)}"
        )
    sizes = [abs(st.a) for st in trace]
    ratios: list[Scalar] = []
    for prev, cur in zip(sizes, sizes[1:]):
        ratios.append(cur / prev if prev > 0.0 else 0.0)
    tail = ratios[1:]
    superlinear = all(b <= a for a, b in zip(tail, tail[1:])) and tail[-1] < 0.5
    steps_to_tol = -1
    for k, st in enumerate(trace, start=1):
        if abs(st.a) <= tol * max(1.0, abs(st.iterate_after)):
            steps_to_tol = k
            break
    return ConvergenceReport(
        ratios=tuple(ratios),
        superlinear=superlinear,
        steps_to_tol=steps_to_tol,
        residual_history=tuple(st.residual for st in trace),
    )


class ProbeOutcome(NamedTuple):
    """Result pair of a self-correction probe, final answers in y units."""

    y_clean: Scalar
    y_perturbed: Scalar
    extra_steps: int


def _method_kit(method: int, X: Scalar):
    # step function, default start, domain test, original-units residual,
    # and iterate-to-y conversion, mirroring the solver wrappers exactly
    if method == 1:
        return (
            lambda z, k: step_method1(z, X, k),
            2.0,
            lambda z: z > 1.0,
            lambda z: _method1_residual(z, X),
            lambda z: guarded_lnln(z, "probe result"),
        )
    if method == 2:
        lnX = math.log(X)
        return (
            lambda z, k: step_method2(z, X, k),
            2.0 if X >= 1.0 else 1.001,
            lambda z: z > 1.0,
            lambda z: _method2_orig_residual(z, X, lnX),
            lambda z: guarded_ln(z, "probe result"),
        )
    if method == 3:
        return (
            lambda y, k: step_method3(y, X, k),
            X / 2.0 if X <= 2.0 else X * (1.0 - 1e-4),
            lambda y: 0.0 < y < X,
            lambda y: _method3_orig_residual(y, X),
            lambda y: y,
        )
    raise DomainError(f"method must be 1, 2 or 3, got {method!r}")


def _run_plain(
    stepfn,
    guess: Scalar,
    in_domain,
    orig_residual,
    to_y,
    scale: Scalar,
    tol: Scalar,
    max_iter: int,
    perturb_at: int = 0,
    factor: Scalar = 1.0,
) -> tuple[Scalar, int]:
    # one bare attempt, no retry schedule: the probe studies the raw
    # iteration, so a rescue by a different start would muddy the result
    iterate = guess
    for k in range(1, max_iter + 1):
        if k == perturb_at:
            iterate = iterate * factor
            if not in_domain(iterate):
                return math.nan, -1
        try:
            st = stepfn(iterate, k)
        except NFuncError:
            return math.nan, -1
        nxt = st.iterate_after
        if not math.isfinite(nxt) or not in_domain(nxt):
            return math.nan, -1
        iterate = nxt
        r = orig_residual(iterate)
        if (
            abs(st.a) <= tol * max(1.0, abs(iterate))
            and math.isfinite(r)
            and abs(r) <= tol * scale
        ):
            return to_y(iterate), k
    return math.nan, -1


def self_correction_probe(
    X: Scalar,
    method: int,
    perturb_at: int,
    factor: Scalar,
    cfg: SolveConfig | None = None,
) -> ProbeOutcome:
    """Perturb one iterate mid-run and measure the recovery cost.

    Runs the chosen method (1, 2 or 3) twice from its default start as a
    single bare attempt: once clean, and once with iterate number
    ``perturb_at`` multiplied by ``factor`` just before it is used
    (index 1 is the starting guess itself).  Returns both final answers
    in y units and the difference in steps needed.

    A perturbation that exits the method's domain, or a perturbed run
    that fails to converge within the budget, is reported as
    y_perturbed = NaN with extra_steps = -1 rather than raised: the
    probe's job is to observe, not to rescue.
    """
    if not X > 0.0 or not math.isfinite(X):
        raise DomainError(f"probe requires finite X > 0, got {X!r}")
    if perturb_at < 1:
        raise DomainError(f"perturb_at must be a 1-based iterate index, got {perturb_at}")
    cfg = cfg or SolveConfig()
    stepfn, guess, in_domain, orig_residual, to_y = _method_kit(method, X)
    scale = max(1.0, abs(X))
    y_clean, n_clean = _run_plain(
        stepfn, guess, in_domain, orig_residual, to_y, scale, cfg.tol, cfg.max_iter
    )
    y_pert, n_pert = _run_plain(
        stepfn,
        guess,
        in_domain,
        orig_residual,
        to_y,
        scale,
        cfg.tol,
        cfg.max_iter,
        perturb_at=perturb_at,
        factor=factor,
    )
    if n_clean > 0 and n_pert > 0:
        extra = n_pert - n_clean
    else:
        extra = -1
    return ProbeOutcome(y_clean, y_pert, extra)
