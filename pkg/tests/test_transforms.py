"""Tests for the equation-shape catalogue and its reductions."""

import math
import random

import pytest

from nfunc import SolveStatus, solve_method1, solve_method2
from nfunc.core import DomainError
from nfunc.general import NoSolutionOnBranch
from nfunc.transforms import (
    EquationShape,
    TransformableEquation,
    UntransformableError,
    canonicalize,
    original_residual,
    original_sides,
    solve_transformed,
)


def _eq(shape, **params):
    return TransformableEquation(shape, params)


class TestConstruction:
    def test_wrong_parameter_set_is_rejected(self):
        with pytest.raises(DomainError, match="takes parameters"):
            _eq(EquationShape.PRODUCT_LOGLOG, q=5.0)
        with pytest.raises(DomainError):
            _eq(EquationShape.SCALED_DOUBLE_EXP, a=1.0, b=2.0)  # missing p

    def test_non_finite_parameter_is_rejected(self):
        with pytest.raises(DomainError):
            _eq(EquationShape.PRODUCT_LOGLOG, p=math.inf)

    def test_values_are_coerced_to_float(self):
        eq = _eq(EquationShape.PRODUCT_LOGLOG, p=1000)
        assert isinstance(eq.params["p"], float)

    def test_template_is_exposed(self):
        assert "ln(ln(" in _eq(EquationShape.PRODUCT_LOGLOG, p=2.0).template


class TestCanonicalization:
    def test_weighted_log_exp_mapping(self):
        prob = canonicalize(_eq(EquationShape.WEIGHTED_LOG_EXP, q=2.0, r=1.0, s=3.0))
        assert prob.p == pytest.approx(2.0)
        assert prob.X == pytest.approx(math.exp(3.0), rel=1e-15)

    def test_loglog_plus_power_mapping(self):
        prob = canonicalize(_eq(EquationShape.LOGLOG_PLUS_POWER, p=3.0, q=2.0, r=1.0))
        assert prob.p == pytest.approx(3.0)
        assert prob.X == pytest.approx(8.0 * math.e, rel=1e-14)

    def test_power_double_exp_mapping(self):
        prob = canonicalize(_eq(EquationShape.POWER_DOUBLE_EXP, q=0.5, p=7.0))
        assert prob.p == pytest.approx(2.0)
        assert prob.X == pytest.approx(7.0)

    @pytest.mark.parametrize(
        "shape, params",
        [
            (EquationShape.SHIFTED_LOG_EXP, dict(p=1.0, q=-2.0, r=0.0)),
            (EquationShape.LOGLOG_RATIO, dict(p=2.0, q=3.0, r=0.0)),
            (EquationShape.LOGLOG_RATIO, dict(p=-2.0, q=3.0, r=6.0)),
            (EquationShape.LOGLOG_PLUS_LINEAR, dict(p=800.0)),
            (EquationShape.PRODUCT_LOGLOG, dict(p=-1.0)),
            (EquationShape.EXP_TIMES_LOG, dict(p=0.0)),
            (EquationShape.SCALED_DOUBLE_EXP, dict(a=0.0, b=1.0, p=1.0)),
            (EquationShape.SCALED_DOUBLE_EXP, dict(a=1.0, b=1.0, p=-2.0)),
            (EquationShape.WEIGHTED_LOG_EXP, dict(q=0.0, r=1.0, s=1.0)),
            (EquationShape.WEIGHTED_LOG_EXP, dict(q=1.0, r=-1.0, s=1.0)),
            (EquationShape.LOGLOG_POWER_RATIO, dict(p=1.0, q=0.0, r=1.0)),
            (EquationShape.LOGLOG_PLUS_POWER, dict(p=1.0, q=-1.0, r=1.0)),
            (EquationShape.LINEAR_PLUS_DOUBLE_EXP, dict(p=0.0, q=1.0, r=1.0, s=1.0)),
            (EquationShape.EXP_POWER_TIMES_LOG, dict(p=1.0, q=1.0, r=-1.0)),
            (EquationShape.PRODUCT_LOGLOG_POWER, dict(p=1.0, q=1.0, r=0.0)),
            (EquationShape.POWER_DOUBLE_EXP, dict(q=0.0, p=1.0)),
        ],
    )
    def test_condition_violations_raise(self, shape, params):
        with pytest.raises(UntransformableError, match=shape.value):
            canonicalize(_eq(shape, **params))


class TestReferenceSolutions:
    def test_product_form_bit_identical_to_method_one(self):
        res = solve_transformed(_eq(EquationShape.PRODUCT_LOGLOG, p=1000.0))
        direct = solve_method1(1000.0)
        assert res.y == math.exp(math.exp(direct.y))
        assert res.y == pytest.approx(543.4155969316239, rel=1e-12)
        assert abs(res.final_residual) <= 1e-9 * 1000.0

    def test_exp_log_form_bit_identical_to_method_two(self):
        res = solve_transformed(_eq(EquationShape.EXP_TIMES_LOG, p=100.0))
        direct = solve_method2(100.0)
        assert res.y == math.exp(direct.y)
        assert math.log(res.y) == pytest.approx(1.4440285454944362, rel=1e-12)

    def test_loglog_plus_linear_at_zero(self):
        res = solve_transformed(_eq(EquationShape.LOGLOG_PLUS_LINEAR, p=0.0))
        assert math.log(res.y) == pytest.approx(0.2698741375734492, rel=1e-10)

    def test_loglog_ratio_scales_the_unit_solution(self):
        res = solve_transformed(_eq(EquationShape.LOGLOG_RATIO, p=2.0, q=3.0, r=6.0))
        assert res.y == pytest.approx(1.619244825440695, rel=1e-10)

    def test_weighted_log_exp_reduces_to_plain_solve(self):
        res = solve_transformed(
            _eq(EquationShape.WEIGHTED_LOG_EXP, q=1.0, r=1.0, s=math.log(10.0))
        )
        assert res.y == pytest.approx(0.8854976721962089, rel=1e-10)

    def test_scaled_double_exp(self):
        res = solve_transformed(_eq(EquationShape.SCALED_DOUBLE_EXP, a=2.0, b=3.0, p=14.0))
        assert res.y == pytest.approx(0.3619674211, rel=1e-9)

    def test_power_double_exp_lands_on_one(self):
        res = solve_transformed(
            _eq(EquationShape.POWER_DOUBLE_EXP, q=2.0, p=math.exp(math.e))
        )
        assert res.y == 1.0
        assert res.final_residual == 0.0

    def test_tiny_exp_log_routes_around_the_log_singularity(self):
        # for p at roundoff scale the z-space root collapses into z = 1;
        # the solver must switch to the exponent-space path and land within
        # one float spacing of the true root.  The residual can do no better
        # than the granularity of ln z just above 1, so bound it by that.
        from nfunc.core import EPS

        p = 1e-15
        res = solve_transformed(_eq(EquationShape.EXP_TIMES_LOG, p=p))
        assert res.status is SolveStatus.CONVERGED
        assert abs(res.y - (1.0 + p / math.e)) <= 2.0 * EPS
        assert abs(res.final_residual) <= math.e * 2.0 * EPS

    def test_back_map_overflow_is_loud(self):
        with pytest.raises(UntransformableError, match="overflows"):
            solve_transformed(
                _eq(EquationShape.EXP_POWER_TIMES_LOG, p=1e-4, q=1.0, r=1e4)
            )


class TestOriginalSides:
    def test_product_form_sides(self):
        z = math.exp(math.e)
        lhs, rhs = original_sides(_eq(EquationShape.PRODUCT_LOGLOG, p=5.0), z)
        assert lhs == pytest.approx(z, rel=1e-15)  # lnln(e**e) = 1
        assert rhs == 5.0

    def test_residual_is_lhs_minus_rhs(self):
        eq = _eq(EquationShape.LOGLOG_PLUS_LINEAR, p=3.0)
        z = 2.5
        lhs, rhs = original_sides(eq, z)
        assert original_residual(eq, z) == pytest.approx(lhs - rhs, rel=1e-15)


def _clamped(rng, lo, hi, floor=0.05, repl=0.5):
    v = rng.uniform(lo, hi)
    if abs(v) < floor:
        return repl if v >= 0.0 else -repl
    return v


def _log_uniform(rng, lo, hi):
    return math.exp(rng.uniform(math.log(lo), math.log(hi)))


def _draw(shape, rng):
    S = EquationShape
    if shape is S.SHIFTED_LOG_EXP:
        return dict(p=rng.uniform(-20, 20), q=_log_uniform(rng, 1e-2, 1e2),
                    r=rng.uniform(-20, 20))
    if shape is S.LOGLOG_RATIO:
        return dict(p=_clamped(rng, -50, 50), q=_clamped(rng, -50, 50),
                    r=_clamped(rng, -30, 30))
    if shape is S.LOGLOG_PLUS_LINEAR:
        return dict(p=rng.uniform(-12, 300))
    if shape in (S.PRODUCT_LOGLOG, S.EXP_TIMES_LOG):
        return dict(p=_log_uniform(rng, 1e-6, 1e6))
    if shape is S.SCALED_DOUBLE_EXP:
        return dict(a=_clamped(rng, -10, 10), b=_clamped(rng, -10, 10),
                    p=_clamped(rng, -10, 10))
    if shape is S.WEIGHTED_LOG_EXP:
        return dict(q=_clamped(rng, -8, 8), r=_log_uniform(rng, 0.05, 20),
                    s=rng.uniform(-10, 10))
    if shape in (S.LOGLOG_POWER_RATIO, S.PRODUCT_LOGLOG_POWER):
        return dict(p=_log_uniform(rng, 0.1, 1e4), q=_clamped(rng, -6, 6),
                    r=_log_uniform(rng, 0.1, 50))
    if shape is S.LOGLOG_PLUS_POWER:
        return dict(p=_clamped(rng, -8, 8), q=_log_uniform(rng, 0.2, 8),
                    r=rng.uniform(-10, 30))
    if shape is S.LINEAR_PLUS_DOUBLE_EXP:
        return dict(p=_clamped(rng, -8, 8), q=_log_uniform(rng, 0.2, 5),
                    r=_clamped(rng, -8, 8), s=rng.uniform(-10, 10))
    if shape is S.EXP_POWER_TIMES_LOG:
        return dict(p=_log_uniform(rng, 0.5, 3), q=_log_uniform(rng, 0.5, 3),
                    r=_log_uniform(rng, 0.5, 50))
    if shape is S.POWER_DOUBLE_EXP:
        return dict(p=_log_uniform(rng, 1e-4, 1e4), q=_clamped(rng, -5, 5))
    raise AssertionError(f"no draw rule for {shape}")


class TestRoundTrips:
    # Solve each recognized shape from random parameters and substitute the
    # answer back into the ORIGINAL equation.  A reduction slip of any kind
    # (wrong canonical X, wrong back map, wrong branch) shows up here as a
    # residual no tolerance tweak could hide.
    @pytest.mark.parametrize("shape", list(EquationShape))
    def test_solution_satisfies_original_equation(self, shape):
        rng = random.Random(20260822)
        used = 0
        for _ in range(60):
            if used >= 20:
                break
            params = _draw(shape, rng)
            eq = TransformableEquation(shape, params)
            try:
                res = solve_transformed(eq)
            except (UntransformableError, NoSolutionOnBranch):
                continue  # parameter draw outside the shape's conditions
            used += 1
            assert res.status is SolveStatus.CONVERGED, (shape, params)
            lhs, rhs = original_sides(eq, res.y)
            scale = max(1.0, abs(lhs), abs(rhs))
            assert abs(lhs - rhs) <= 1e-9 * scale, (shape, params, res.y)
        assert used >= 10, f"draw region too tight for {shape}"
