"""Scalar numeric kernel shared by every solver in the package.

The iteration schemes in :mod:`nfunc.solvers` and :mod:`nfunc.general` all
reduce one update step to the same tiny problem: solve a quadratic

    a**2 = l*a + m

for the correction ``a`` and pick one of its two roots.  This module owns
that quadratic (with a numerically stable root extraction), the guarded
logarithms the steppers need, and the rational log-ratio approximation the
update formulas are built on.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass

Scalar = float

#: Machine epsilon for IEEE-754 binary64, the only float width we support.
EPS: Scalar = sys.float_info.epsilon


class NFuncError(Exception):
    """Base class for every error raised by this package."""


class DomainError(NFuncError):
    """An argument fell outside the mathematical domain of an operation."""


class NoRealRoot(NFuncError):
    """The update quadratic has no real root.

    Attributes:
        discriminant: the (negative) value of ``l*l + 4*m`` that was seen.
    """

    def __init__(self, discriminant: Scalar) -> None:
        super().__init__(
            f"update quadratic has no real root (discriminant {discriminant:.6g})"
        )
        self.discriminant = discriminant


class RootBranch(enum.Enum):
    """Which root of the update quadratic to take.

    PLUS is the algebraically larger root and is the standard choice for
    the positive-branch solvers.  MINUS selects the smaller root, which is
    the meaningful correction in parts of the negative-exponent problem.
    """

    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class QuadraticCoeffs:
    """Coefficients of the update quadratic ``a**2 = l*a + m``."""

    l: Scalar
    m: Scalar


def log_ratio_approx(t: Scalar) -> Scalar:
    """Rational approximation of ``ln((t + 1) / t)`` for ``t > 0``.

    Returns ``2 / (2*t + 1)``, the (1,1) Pade-style approximant obtained by
    truncating the odd series ``ln((t+1)/t) = 2*(u + u**3/3 + ...)`` with
    ``u = 1/(2*t + 1)`` after its first term.  The truncation error is
    positive and below ``u**3`` for ``t >= 1``, which is what makes the
    quadratic update steps built on it self-correcting.

    Raises:
        DomainError: if ``t <= 0``.
    """
    if t <= 0.0:
        raise DomainError(f"log_ratio_approx requires t > 0, got {t!r}")
    return 2.0 / (2.0 * t + 1.0)


def guarded_ln(x: Scalar, context: str = "ln") -> Scalar:
    """``ln(x)`` that reports *which* quantity went out of domain.

    Raises:
        DomainError: if ``x <= 0``; the message names ``context``.
    """
    if x <= 0.0:
        raise DomainError(f"{context}: ln argument must be positive, got {x!r}")
    return math.log(x)


def guarded_lnln(x: Scalar, context: str = "lnln") -> Scalar:
    """``ln(ln(x))``, defined only for ``x > 1``.

    Raises:
        DomainError: if ``x <= 1``; the message names ``context``.
    """
    if x <= 1.0:
        raise DomainError(f"{context}: lnln argument must exceed 1, got {x!r}")
    return math.log(math.log(x))


# Discriminants in [-64*EPS*l*l, 0) are indistinguishable from zero at the
# precision the coefficients were computed to; treat them as a double root.
_DISC_SLACK = 64.0 * EPS


def _stable_roots(l: Scalar, m: Scalar) -> tuple[Scalar, Scalar]:
    """Both roots of ``a**2 = l*a + m`` as ``(plus, minus)``.

    Extracts the large-magnitude root first, with the sign of ``l`` chosen
    so the sum inside never cancels, then recovers the small root from the
    product ``plus * minus = -m``.  Raises NoRealRoot below the tolerance
    band around a vanishing discriminant.
    """
    disc = l * l + 4.0 * m
    if disc < 0.0:
        if disc >= -_DISC_SLACK * l * l:
            disc = 0.0
        else:
            raise NoRealRoot(disc)
    s = math.sqrt(disc)
    if l >= 0.0:
        big = (l + s) / 2.0
        small = -m / big if big != 0.0 else 0.0
        return big, small
    big = (l - s) / 2.0
    small = -m / big if big != 0.0 else 0.0
    return small, big


def quadratic_root(coeffs: QuadraticCoeffs, branch: RootBranch) -> Scalar:
    """One root of ``a**2 = l*a + m``, selected by ``branch``.

    PLUS returns the algebraically larger root, MINUS the smaller; the two
    coincide when the discriminant sits inside the zero-tolerance band.

    Raises:
        NoRealRoot: if ``l*l + 4*m`` is negative beyond the tolerance band.
    """
    plus, minus = _stable_roots(coeffs.l, coeffs.m)
    return plus if branch is RootBranch.PLUS else minus


def smallest_root(coeffs: QuadraticCoeffs) -> Scalar:
    """The smaller-magnitude root of the update quadratic.

    The correction a step is looking for is the root comparable in size to
    the current error, not its divergent partner.  For the positive-branch
    steppers the plus root always is that root; on the negative branch the
    roles swap whenever the log factor of the defining equation exceeds 1,
    so those steppers select by magnitude instead of by sign.

    Raises:
        NoRealRoot: as for :func:`quadratic_root`.
    """
    plus, minus = _stable_roots(coeffs.l, coeffs.m)
    return plus if abs(plus) <= abs(minus) else minus
