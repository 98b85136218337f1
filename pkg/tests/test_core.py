"""Tests for the quadratic-update kernel and guarded logarithms."""

import math
from decimal import Decimal, getcontext

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from nfunc.core import (
    EPS,
    DomainError,
    NoRealRoot,
    QuadraticCoeffs,
    RootBranch,
    guarded_ln,
    guarded_lnln,
    log_ratio_approx,
    quadratic_root,
    smallest_root,
)

coeff = st.floats(min_value=-1e8, max_value=1e8, allow_nan=False)


def _residual(a, l, m):
    return a * a - l * a - m


class TestQuadraticRoot:
    @given(l=coeff, m=coeff)
    def test_roots_satisfy_quadratic(self, l, m):
        assume(l * l + 4.0 * m >= 0.0)
        scale = l * l + abs(m) + 1.0
        for branch in RootBranch:
            a = quadratic_root(QuadraticCoeffs(l, m), branch)
            assert abs(_residual(a, l, m)) <= 16.0 * EPS * scale

    @given(l=coeff, m=coeff)
    def test_plus_not_below_minus(self, l, m):
        assume(l * l + 4.0 * m >= 0.0)
        coeffs = QuadraticCoeffs(l, m)
        plus = quadratic_root(coeffs, RootBranch.PLUS)
        minus = quadratic_root(coeffs, RootBranch.MINUS)
        assert plus >= minus

    def test_known_roots(self):
        # a**2 = a + 6 has roots 3 and -2
        coeffs = QuadraticCoeffs(1.0, 6.0)
        assert quadratic_root(coeffs, RootBranch.PLUS) == pytest.approx(3.0, rel=1e-15)
        assert quadratic_root(coeffs, RootBranch.MINUS) == pytest.approx(-2.0, rel=1e-15)

    def test_small_root_immune_to_cancellation(self):
        # with l huge and m tiny the minus root is near -m/l and would lose
        # every digit if formed as (l - sqrt(l*l + 4*m)) / 2 directly
        l, m = 1e8, 1.0
        a = quadratic_root(QuadraticCoeffs(l, m), RootBranch.MINUS)
        getcontext().prec = 50
        ld, md = Decimal(l), Decimal(m)
        exact = float((ld - (ld * ld + 4 * md).sqrt()) / 2)
        assert abs(a - exact) <= 4.0 * EPS * abs(exact)

    def test_negative_l_mirror(self):
        l, m = -1e8, 1.0
        a = quadratic_root(QuadraticCoeffs(l, m), RootBranch.PLUS)
        getcontext().prec = 50
        ld, md = Decimal(l), Decimal(m)
        exact = float((ld + (ld * ld + 4 * md).sqrt()) / 2)
        assert abs(a - exact) <= 4.0 * EPS * abs(exact)

    def test_discriminant_band_collapses_to_double_root(self):
        l = 2.0
        m = -(l * l / 4.0) * (1.0 + 8.0 * EPS)  # disc = -8*EPS*l*l, inside the band
        coeffs = QuadraticCoeffs(l, m)
        assert quadratic_root(coeffs, RootBranch.PLUS) == pytest.approx(1.0, rel=1e-12)
        assert quadratic_root(coeffs, RootBranch.MINUS) == pytest.approx(1.0, rel=1e-12)

    def test_no_real_root_reports_discriminant(self):
        with pytest.raises(NoRealRoot) as excinfo:
            quadratic_root(QuadraticCoeffs(2.0, -2.0), RootBranch.PLUS)
        assert excinfo.value.discriminant == pytest.approx(-4.0)

    def test_degenerate_zero_coefficients(self):
        assert quadratic_root(QuadraticCoeffs(0.0, 0.0), RootBranch.PLUS) == 0.0


class TestSmallestRoot:
    @given(l=coeff, m=coeff)
    def test_picks_smaller_magnitude(self, l, m):
        assume(l * l + 4.0 * m >= 0.0)
        coeffs = QuadraticCoeffs(l, m)
        a = smallest_root(coeffs)
        both = [quadratic_root(coeffs, b) for b in RootBranch]
        assert abs(a) == min(abs(r) for r in both)

    def test_prefers_correction_scale(self):
        # roots of a**2 = 10a + 0.1 are ~10.01 and ~-0.00999; the correction
        # a step wants is the small one, not its divergent partner
        a = smallest_root(QuadraticCoeffs(10.0, 0.1))
        assert a == pytest.approx(-0.009990019950139583, rel=1e-12)


class TestLogRatioApprox:
    def test_value_at_one(self):
        assert log_ratio_approx(1.0) == 2.0 / 3.0

    @pytest.mark.parametrize("t", [0.0, -1.0, -1e-300])
    def test_rejects_nonpositive(self, t):
        with pytest.raises(DomainError):
            log_ratio_approx(t)

    def test_truncation_error_sign_and_size(self):
        # ln((t+1)/t) - 2/(2t+1) = 2u**3/3 + 2u**5/5 + ... with u = 1/(2t+1):
        # strictly positive, and below u**3 once t >= 1.  Checked in 50-digit
        # decimal so double rounding cannot blur the inequality.
        getcontext().prec = 50
        for t in (1, 2, 5, 17, 1000, 10**6, 10**9, 10**12):
            td = Decimal(t)
            u = 1 / (2 * td + 1)
            err = ((td + 1) / td).ln() - 2 * u
            assert 0 < err <= u**3


class TestGuardedLogs:
    def test_values(self):
        assert guarded_ln(math.e) == pytest.approx(1.0, rel=1e-15)
        assert guarded_lnln(math.exp(math.e)) == pytest.approx(1.0, rel=1e-15)

    def test_ln_names_the_failing_context(self):
        with pytest.raises(DomainError, match="stopping check"):
            guarded_ln(0.0, "stopping check")

    def test_lnln_requires_argument_above_one(self):
        with pytest.raises(DomainError):
            guarded_lnln(1.0)
        with pytest.raises(DomainError, match="probe"):
            guarded_lnln(0.5, "probe")
