"""Tests for the three primitive iteration schemes and the dispatcher."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfunc import (
    PRECISION_LIMIT_X,
    SolveConfig,
    SolveStatus,
    forward,
    forward_negative,
    nfunc,
    solve_method1,
    solve_method2,
    solve_method3,
    step_method1,
    step_method2,
    step_method3,
)
from nfunc.core import EPS, DomainError
from nfunc.oracle import nfunc_bisect

OMEGA = 0.5671432904097838


class TestForwardMaps:
    def test_point_values(self):
        assert forward(0.0) == 0.0
        assert forward(1.0) == pytest.approx(math.exp(math.e), rel=1e-15)
        assert forward(-1.0) == pytest.approx(-math.exp(1.0 / math.e), rel=1e-15)
        assert forward_negative(1.0) == pytest.approx(math.exp(1.0 / math.e), rel=1e-15)

    def test_overflow_guards(self):
        with pytest.raises(OverflowError):
            forward(6.6)
        with pytest.raises(OverflowError):
            forward_negative(-6.6)


class TestStepFormulas:
    # Frozen from direct evaluation of the update algebra; where a bundled
    # table prints a different second iterate, the table cell is the one
    # that is off (the runs still converge to the same root).
    @pytest.mark.parametrize(
        "X, z2",
        [
            (1e-3, 2.7377332877285916),
            (1.0, 3.848482307248689),
            (10.0, 14.708356879459721),
            (1e5, 122744.03539430932),
        ],
    )
    def test_step_method1_from_two(self, X, z2):
        st1 = step_method1(2.0, X)
        assert st1.iterate_after == pytest.approx(z2, rel=1e-12)
        assert st1.iterate_after == st1.iterate_before + st1.a

    @pytest.mark.parametrize(
        "X, z2",
        [
            (1.0, 1.2840878362767252),
            (100.0, 4.283737106526766),
            (1e5, 10.882082591063641),
        ],
    )
    def test_step_method2_from_two(self, X, z2):
        st2 = step_method2(2.0, X)
        assert st2.iterate_after == pytest.approx(z2, rel=1e-12)

    def test_step_method3_values(self):
        assert step_method3(0.5, 1.0).iterate_after == pytest.approx(
            0.5676084520568347, rel=1e-12
        )
        assert step_method3(6.999, 7.0).iterate_after == pytest.approx(
            6.965264136295924, rel=1e-12
        )

    def test_index_recorded(self):
        assert step_method1(2.0, 1.0, index=7).index == 7

    def test_domain_guards(self):
        with pytest.raises(DomainError):
            step_method1(1.0, 1.0)  # ln ln 1 undefined
        with pytest.raises(DomainError):
            step_method2(1.0, 10.0)
        with pytest.raises(DomainError):
            step_method3(1.5, 1.0)  # y > X: log of a negative ratio
        with pytest.raises(DomainError):
            step_method3(1.0, 1.0)  # y = X: ln ln 1 again


class TestSolveDefaults:
    def test_method1_default_start(self):
        res = solve_method1(1.0)
        assert res.trace[0].iterate_before == 2.0
        assert res.status is SolveStatus.CONVERGED
        assert res.y == pytest.approx(0.2698741375734492, rel=1e-12)

    def test_method2_default_start_above_one(self):
        assert solve_method2(10.0).trace[0].iterate_before == 2.0

    def test_method2_below_one_still_converges(self):
        # the default start for X < 1 sits just above the z = 1 boundary;
        # the first attempt may hand over to a retry, so only the outcome
        # is part of the contract here
        res = solve_method2(0.5)
        assert res.status is SolveStatus.CONVERGED
        assert res.y == pytest.approx(0.15546321384154013, rel=1e-10)

    def test_method3_default_start(self):
        res = solve_method3(1.0)
        assert res.trace[0].iterate_before == 0.5
        assert res.y == pytest.approx(OMEGA, rel=1e-12)
        big = solve_method3(7.0)
        assert big.status is SolveStatus.CONVERGED
        assert big.y == pytest.approx(6.993578652, rel=1e-9)

    def test_explicit_guess_is_used(self):
        res = solve_method1(1000.0, SolveConfig(initial_guess=1e10))
        assert res.trace[0].iterate_before == 1e10
        assert res.y == pytest.approx(1.840212179492939, rel=1e-10)

    def test_result_has_small_residual(self):
        res = solve_method2(42.0)
        assert abs(res.final_residual) <= 1e-9 * 42.0
        assert res.relative_error_estimate <= 1e-9


class TestConfigValidation:
    def test_rejects_bad_tol(self):
        with pytest.raises(ValueError):
            SolveConfig(tol=0.0)

    def test_rejects_bad_max_iter(self):
        with pytest.raises(ValueError):
            SolveConfig(max_iter=0)

    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError):
            SolveConfig(method="bisection")


class TestDispatcher:
    def test_zero_is_exact(self):
        res = nfunc(0.0)
        assert res.y == 0.0
        assert res.status is SolveStatus.CONVERGED
        assert res.trace == ()

    def test_negative_branch_value(self):
        assert nfunc(-1.0).y == pytest.approx(-OMEGA, rel=1e-10)

    def test_method_selection(self):
        via1 = nfunc(10.0, SolveConfig(method="method1"))
        via2 = nfunc(10.0, SolveConfig(method="method2"))
        assert via1.y == pytest.approx(via2.y, rel=1e-10)

    def test_sign_restrictions(self):
        with pytest.raises(ValueError):
            nfunc(-1.0, SolveConfig(method="method1"))
        with pytest.raises(ValueError):
            nfunc(1.0, SolveConfig(method="method3"))

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            nfunc(math.inf)
        with pytest.raises(DomainError):
            nfunc(math.nan)

    def test_monotone_over_sign_change(self):
        grid = [-10.0, -1.0, -0.1, 0.1, 1.0, 10.0, 1e3, 1e5]
        ys = [nfunc(x).y for x in grid]
        assert all(a < b for a, b in zip(ys, ys[1:]))
        assert all((x > 0) == (y > 0) for x, y in zip(grid, ys))


class TestMethodAgreement:
    @pytest.mark.parametrize("X", [0.5, 1.0, 3.0, 10.0, 1e3, 1e5])
    def test_methods_1_and_2_agree(self, X):
        y1 = solve_method1(X).y
        y2 = solve_method2(X).y
        assert abs(y1 - y2) <= 1e-10 * abs(y2)


class TestCorrectionDecay:
    # after the first step (which only measures guess quality) the
    # correction sizes must shrink monotonically on well-posed runs
    @pytest.mark.parametrize("X", [1e-3, 1.0, 10.0, 1e5])
    def test_method1_corrections_shrink(self, X):
        trace = solve_method1(X).trace
        sizes = [abs(s.a) for s in trace[1:]]
        assert all(b <= a for a, b in zip(sizes, sizes[1:]))

    @pytest.mark.parametrize("X", [1e-3, 1.0, 1e2, 1e5, 1e10, 1e20])
    def test_method2_corrections_shrink(self, X):
        trace = solve_method2(X).trace
        sizes = [abs(s.a) for s in trace[1:]]
        assert all(b <= a for a, b in zip(sizes, sizes[1:]))


class TestPrecisionLimit:
    def test_far_negative_branch_is_flagged(self):
        res = solve_method3(100.0)
        assert res.precision_limited
        assert res.status is SolveStatus.CONVERGED
        assert res.y == 100.0
        assert res.trace == ()

    def test_threshold_location(self):
        assert solve_method3(PRECISION_LIMIT_X + 1.0).precision_limited
        assert not solve_method3(36.0).precision_limited

    def test_negative_dispatch_keeps_flag(self):
        res = nfunc(-100.0)
        assert res.precision_limited
        assert res.y == -100.0
        assert not math.isnan(res.final_residual)


class TestExhaustionIsHonest:
    def test_max_iter_one_reports_failure(self):
        res = solve_method1(1e5, SolveConfig(max_iter=1))
        assert res.status is not SolveStatus.CONVERGED
        assert math.isfinite(res.y)


class TestAgainstOracle:
    @settings(max_examples=40)
    @given(X=st.floats(min_value=1e-6, max_value=1e6))
    def test_positive_branch_matches_bisection(self, X):
        got = nfunc(X).y
        want = nfunc_bisect(X)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))

    @settings(max_examples=25)
    @given(X=st.floats(min_value=-20.0, max_value=-1e-3))
    def test_negative_branch_matches_bisection(self, X):
        got = nfunc(X).y
        want = nfunc_bisect(X)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))

    # |y| floor: the positive-branch methods iterate in z = 1 + y, whose
    # spacing near 1 caps the recoverable relative accuracy at EPS / y
    @settings(max_examples=30)
    @given(
        y=st.one_of(
            st.floats(min_value=1e-6, max_value=6.5),
            st.floats(min_value=-6.5, max_value=-1e-6),
        )
    )
    def test_roundtrip_through_forward(self, y):
        X = forward(y)
        back = nfunc(X).y
        assert back == pytest.approx(y, rel=1e-8)
