import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subdiff.fractional import TimeSeriesField
from subdiff.semigroup import GridFunction, LevySymbol, semigroup_apply
from subdiff.subordination import fourier_ml_solution, solution_field
from subdiff.verify import (
    PoleError,
    ResidualReport,
    nonuniqueness_demo,
    residual_fractional,
    residual_higher_order,
    transform_identity,
)

BROWNIAN = LevySymbol.brownian(1.0)


def small_datum(points=256, half_width=32.0):
    return GridFunction.from_callable(lambda x: np.exp(-(x**2)), 1, half_width, points)


class TestTransformIdentity:
    def test_order_two_example(self):
        a, b, gap = transform_identity(2, -1.0, 4.0)
        assert a == pytest.approx(1.0 / 6.0, rel=1e-14)
        assert b == pytest.approx(1.0 / 6.0, rel=1e-14)
        assert gap < 1e-15

    def test_order_three_example(self):
        a, b, gap = transform_identity(3, -1.0, 8.0)
        assert a == pytest.approx(1.0 / 12.0, rel=1e-14)
        assert b == pytest.approx(1.0 / 12.0, rel=1e-14)
        assert gap < 1e-15

    def test_zero_symbol(self):
        for n, s in ((2, 4.0), (5, 3.0)):
            a, b, gap = transform_identity(n, 0.0, s)
            assert a == pytest.approx(1.0 / s, rel=1e-14)
            assert gap < 1e-16

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_random_sweep(self, n):
        # the algebraic core: 1e3 random (psi, s) pairs per order
        rng = np.random.default_rng(1234 + n)
        for _ in range(1000):
            psi = complex(-rng.uniform(0, 10), rng.uniform(-10, 10))
            s_lo = max(2.0 * abs(psi) ** n, 1.0)
            s = s_lo * 10 ** rng.uniform(0.0, np.log10(max(100.0 / s_lo, 4.0)))
            a, b, gap = transform_identity(n, psi, s)
            assert gap <= 1e-12 * abs(b)

    @given(
        re=st.floats(-10, -0.01),
        im=st.floats(-10, 10),
        mult=st.floats(2.0, 50.0),
        n=st.integers(2, 5),
    )
    @settings(max_examples=200, deadline=None)
    def test_identity_property(self, re, im, mult, n):
        psi = complex(re, im)
        s = max(1.0, mult * abs(psi) ** n)
        a, b, gap = transform_identity(n, psi, s)
        assert gap <= 1e-12 * max(abs(b), 1e-30)

    def test_pole_guard(self):
        with pytest.raises(PoleError):
            transform_identity(2, -1.0, 1.0)  # s = psi^2 exactly

    def test_usage_errors(self):
        with pytest.raises(ValueError):
            transform_identity(1, -1.0, 4.0)
        with pytest.raises(ValueError):
            transform_identity(2, -1.0, -4.0)
        with pytest.raises(ValueError):
            transform_identity(2, 1.0, 4.0)  # Re psi > 0


class TestResidualReports:
    def test_report_invariants_and_json(self):
        rep = ResidualReport("demo", 0.1, 0.05, 16.0, 64, linf=1e-4, l1=2e-5,
                             tolerance=1e-3, details={"t_min": 0.5})
        assert rep.passed is True
        payload = json.loads(rep.to_json())
        assert payload["equation"] == "demo" and payload["passed"] is True
        rep2 = ResidualReport("demo", 0.1, 0.05, 16.0, 64, linf=1e-2, l1=2e-5, tolerance=1e-3)
        assert rep2.passed is False
        rep3 = ResidualReport("demo", 0.1, 0.05, 16.0, 64, linf=1e-2, l1=2e-5)
        assert rep3.passed is None
        with pytest.raises(ValueError):
            ResidualReport("demo", 0.1, 0.05, 16.0, 64, linf=-1.0, l1=0.0)


class TestResidualHigherOrder:
    def test_order_one_is_cauchy_residual(self):
        # u = T(t) f solves du/dt = L u; residual shrinks at second order
        # on a window where |d^3 u/dt^3| is pinned by the window edge
        f = small_datum()
        linfs = []
        for tau in (1 / 8, 1 / 16):
            times = np.arange(0, round(1 / tau) + 1) * tau
            values = np.stack([semigroup_apply(BROWNIAN, t, f).values for t in times])
            fld = TimeSeriesField(times, values, 1, f.half_width, f.points)
            linfs.append(residual_higher_order(BROWNIAN, 1, fld, f, t_min=0.5).linf)
        assert linfs[0] / linfs[1] == pytest.approx(4.0, rel=0.25)

    def test_equivalence_beta_half_n2(self):
        f = small_datum()
        linfs = []
        for tau in (1 / 8, 1 / 16):
            times = np.arange(0, round(1 / tau) + 1) * tau
            fld = solution_field(BROWNIAN, 0.5, times, f)
            linfs.append(residual_higher_order(BROWNIAN, 2, fld, f, t_min=0.5).linf)
        assert linfs[0] / linfs[1] >= 1.7

    def test_equivalence_beta_third_n3(self):
        f = small_datum(points=512, half_width=40.0)
        linfs = []
        for tau in (1 / 8, 1 / 16):
            times = np.arange(0, round(1 / tau) + 1) * tau
            fld = solution_field(BROWNIAN, 1 / 3, times, f)
            linfs.append(residual_higher_order(BROWNIAN, 3, fld, f, t_min=0.5).linf)
        assert linfs[0] / linfs[1] >= 1.5

    def test_grid_mismatch_rejected(self):
        f = small_datum()
        other = small_datum(points=128)
        times = np.linspace(0.0, 1.0, 9)
        values = np.stack([f.values] * 9)
        fld = TimeSeriesField(times, values, 1, f.half_width, f.points)
        with pytest.raises(ValueError):
            residual_higher_order(BROWNIAN, 2, fld, other)

    def test_initial_datum_mismatch_rejected(self):
        f = small_datum()
        times = np.linspace(0.0, 1.0, 9)
        values = np.stack([f.values + 0.5 + 0.1 * i for i in range(9)])
        fld = TimeSeriesField(times, values, 1, f.half_width, f.points)
        with pytest.raises(ValueError, match="initial datum"):
            residual_higher_order(BROWNIAN, 2, fld, f)


class TestResidualFractional:
    def test_zero_symbol_exact_zero(self):
        # psi == 0 and u == f: Caputo of a constant vanishes identically
        null = LevySymbol.general_triple(drift=(0.0,))
        f = small_datum(points=64, half_width=8.0)
        times = np.linspace(0.0, 1.0, 9)
        fld = TimeSeriesField(times, np.stack([f.values] * 9), 1, f.half_width, f.points)
        rep = residual_fractional(null, 0.5, fld, f)
        assert rep.linf == 0.0 and rep.l1 == 0.0

    def test_l1_scheme_order_on_ml_solution(self):
        # residual ratio under tau halving: at least the halving the L1
        # scheme guarantees; superconvergence (up to ~2^1.5) is allowed
        f = small_datum()
        linfs = []
        for tau in (1 / 8, 1 / 16):
            times = np.arange(0, round(1 / tau) + 1) * tau
            fld = solution_field(BROWNIAN, 0.5, times, f, solver=fourier_ml_solution)
            linfs.append(residual_fractional(BROWNIAN, 0.5, fld, f, t_min=0.5).linf)
        ratio = linfs[0] / linfs[1]
        assert 1.6 <= ratio <= 3.2

    def test_beta_third_converges(self):
        f = small_datum(points=512, half_width=40.0)
        linfs = []
        for tau in (1 / 8, 1 / 16):
            times = np.arange(0, round(1 / tau) + 1) * tau
            fld = solution_field(BROWNIAN, 1 / 3, times, f)
            linfs.append(residual_fractional(BROWNIAN, 1 / 3, fld, f, t_min=0.5).linf)
        assert linfs[0] / linfs[1] >= 1.5

    def test_window_validation(self):
        f = small_datum(points=64, half_width=8.0)
        times = np.linspace(0.0, 1.0, 9)
        fld = TimeSeriesField(times, np.stack([f.values] * 9), 1, f.half_width, f.points)
        with pytest.raises(ValueError, match="window"):
            residual_fractional(LevySymbol.general_triple(drift=(0.0,)), 0.5, fld, f, t_min=2.0)


@pytest.fixture(scope="module")
def demo():
    t_grid = np.linspace(0.01, 1.0, 100)
    x_grid = np.linspace(0.0, 12.0, 1201)
    return nonuniqueness_demo(t_grid, x_grid)


class TestNonuniquenessDemo:
    def test_analytic_residual(self, demo):
        report, _ = demo
        assert report.linf <= 1e-6
        assert report.passed is True

    def test_finite_difference_order(self, demo):
        _, traces = demo
        assert traces["fd_order"] >= 1.8

    def test_initial_trace_vanishes(self, demo):
        _, traces = demo
        # u(0.01, 0) = (0.04 pi)^(-1/2) e^(-25), frozen from the formula
        assert traces["initial_trace_sup"] == pytest.approx(3.9178e-11, rel=1e-3)
        assert traces["initial_trace_sup"] <= 1e-8
        sup = traces["sup_trace"]
        assert sup[0] < sup[-1]  # grows away from zero initial data

    def test_l1_mass_at_unit_time(self, demo):
        _, traces = demo
        assert traces["l1_at_end"] == pytest.approx(0.23975, abs=1e-3)
        assert traces["l1_at_end_exact"] == pytest.approx(0.2397500611, abs=1e-9)
        assert traces["l1_at_end"] >= 0.2

    def test_grid_validation(self):
        with pytest.raises(ValueError, match="X_max"):
            nonuniqueness_demo(np.linspace(0.01, 1.0, 10), np.linspace(0.0, 5.0, 100))
        with pytest.raises(ValueError):
            nonuniqueness_demo(np.linspace(0.001, 1.0, 10), np.linspace(0.0, 12.0, 100))
