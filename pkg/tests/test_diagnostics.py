"""Tests for convergence-rate reports and self-correction probes."""

import math

import pytest

from nfunc import SolveConfig, solve_method1, solve_method2
from nfunc.core import DomainError
from nfunc.diagnostics import (
    ConvergenceReport,
    InsufficientData,
    ProbeOutcome,
    analyze_trace,
    self_correction_probe,
)
from nfunc.solvers import IterationStep


def _fake_trace(sizes):
    steps = []
    x = 10.0
    for k, a in enumerate(sizes, start=1):
        steps.append(IterationStep(k, x, 0.0, 0.0, a, x + a, 1.0 / k))
        x += a
    return tuple(steps)


class TestAnalyzeTrace:
    def test_short_trace_is_not_measurable(self):
        with pytest.raises(InsufficientData):
            analyze_trace(_fake_trace([1.0, 0.1]))

    def test_real_run_shows_shrinking_ratios(self):
        trace = solve_method1(1e-3).trace
        rep = analyze_trace(trace)
        assert len(rep.ratios) == len(trace) - 1
        assert rep.superlinear
        assert rep.steps_to_tol == len(trace)
        assert rep.residual_history == tuple(s.residual for s in trace)
        # after the guess-quality ratio, each one falls hard
        assert all(r < 0.5 for r in rep.ratios[1:])

    def test_first_ratio_does_not_decide_the_flag(self):
        # a terrible start (huge first ratio) must not mask a superlinear tail
        trace = _fake_trace([1e-6, 10.0, 0.1, 1e-4, 1e-9])
        rep = analyze_trace(trace)
        assert rep.superlinear

    def test_constant_corrections_are_not_superlinear(self):
        rep = analyze_trace(_fake_trace([1.0, 0.9, 0.8, 0.75, 0.72]))
        assert not rep.superlinear

    def test_growing_tail_is_not_superlinear(self):
        rep = analyze_trace(_fake_trace([1.0, 0.1, 0.01, 0.2]))
        assert not rep.superlinear

    def test_steps_to_tol_counts_first_small_step(self):
        trace = _fake_trace([1.0, 1e-12, 1e-13])
        rep = analyze_trace(trace, tol=1e-9)
        assert rep.steps_to_tol == 2

    def test_steps_to_tol_minus_one_when_never_reached(self):
        rep = analyze_trace(_fake_trace([1.0, 0.5, 0.25]), tol=1e-15)
        assert rep.steps_to_tol == -1

    def test_exact_landing_gives_zero_ratio(self):
        rep = analyze_trace(_fake_trace([1.0, 0.0, 0.0]))
        assert rep.ratios[0] == 0.0


class TestSelfCorrectionProbe:
    def test_recovers_from_midrun_kick(self):
        out = self_correction_probe(1e3, method=1, perturb_at=3, factor=1.5)
        assert out.y_clean == pytest.approx(1.840212179492939, rel=1e-10)
        assert out.y_perturbed == pytest.approx(out.y_clean, rel=1e-9)
        assert out.extra_steps >= 0

    def test_factor_one_changes_nothing(self):
        out = self_correction_probe(1.0, method=2, perturb_at=2, factor=1.0)
        assert out.y_perturbed == out.y_clean
        assert out.extra_steps == 0

    def test_recovers_from_violent_kick(self):
        # multiply an early iterate by 100: still comes home
        out = self_correction_probe(100.0, method=2, perturb_at=2, factor=100.0)
        assert out.y_perturbed == pytest.approx(1.4440285454944362, rel=1e-6)
        assert out.extra_steps >= 0

    def test_domain_exit_is_data_not_crash(self):
        # shrinking a method-1 iterate under z = 1 ends the perturbed run
        out = self_correction_probe(1e3, method=1, perturb_at=2, factor=1e-4)
        assert math.isnan(out.y_perturbed)
        assert out.extra_steps == -1
        assert math.isfinite(out.y_clean)

    def test_grid_of_gentle_probes(self):
        for X in (1e-3, 1.0, 10.0, 1e5):
            for factor in (0.5, 2.0):
                out = self_correction_probe(X, method=2, perturb_at=2, factor=factor)
                assert out.y_perturbed == pytest.approx(out.y_clean, rel=1e-7), (X, factor)

    def test_input_validation(self):
        with pytest.raises(DomainError):
            self_correction_probe(-1.0, method=1, perturb_at=2, factor=1.5)
        with pytest.raises(DomainError):
            self_correction_probe(1.0, method=1, perturb_at=0, factor=1.5)
        with pytest.raises(DomainError):
            self_correction_probe(1.0, method=7, perturb_at=2, factor=1.5)

    def test_respects_config_budget(self):
        out = self_correction_probe(
            1e3, method=1, perturb_at=2, factor=1.5, cfg=SolveConfig(max_iter=2)
        )
        assert out.extra_steps == -1
