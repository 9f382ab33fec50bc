import numpy as np
import pytest
from scipy.integrate import simpson

from subdiff.fractional import mittag_leffler
from subdiff.semigroup import GridFunction, LevySymbol, semigroup_apply
from subdiff.subordination import (
    QuadratureError,
    fourier_ml_solution,
    solution_field,
    subordinate_solution,
)


@pytest.fixture(scope="module")
def brownian():
    return LevySymbol.brownian(1.0)


@pytest.fixture(scope="module")
def datum():
    return GridFunction.from_callable(lambda x: np.exp(-(x**2)), 1, 48.0, 512)


def l1_gap(a: GridFunction, b: GridFunction) -> float:
    return float(np.abs(a.values - b.values).sum() * a.spacing**a.dim)


class TestSubordinateSolution:
    def test_short_time_recovers_datum(self, brownian, datum):
        u = subordinate_solution(brownian, 0.5, 1e-10, datum)
        assert l1_gap(u, datum) < 1e-4

    def test_mass_conserved(self, brownian, datum):
        for t in (0.25, 1.0, 4.0):
            u = subordinate_solution(brownian, 0.5, t, datum)
            assert abs(u.mass - datum.mass) < 1e-6

    def test_half_beta_closed_form_weights(self, brownian, datum):
        # independent route: Simpson quadrature of
        # (2/sqrt(4 pi t)) int T(s) f exp(-s^2/(4t)) ds on a fine s-grid
        t = 1.0
        s_grid = np.linspace(0.0, 14.0 * np.sqrt(t), 4097)
        spectrum = np.fft.fft(datum.values)
        psi = brownian(*datum.freq_meshes())
        stack = np.empty((s_grid.size, datum.points))
        for i, s in enumerate(s_grid):
            stack[i] = np.fft.ifft(np.exp(s * psi) * spectrum).real
        weights = 2.0 / np.sqrt(4.0 * np.pi * t) * np.exp(-(s_grid**2) / (4.0 * t))
        reference = simpson(stack * weights[:, None], x=s_grid, axis=0)
        u = subordinate_solution(brownian, 0.5, t, datum)
        assert np.abs(u.values - reference).max() < 1e-8

    def test_fourier_coefficient_matches_ml_oracle(self, brownian):
        # on the box L = 8 pi the discrete frequency k = 1 sits at index 8
        f = GridFunction.gaussian(1, 8.0 * np.pi, 512, width=0.5)
        u = subordinate_solution(brownian, 0.5, 1.0, f)
        ratio = np.fft.fft(u.values)[8] / np.fft.fft(f.values)[8]
        expected = mittag_leffler(0.5, -1.0)
        assert abs(ratio - expected) < 1e-4

    def test_positivity_and_sup_monotonicity(self, brownian, datum):
        sups = []
        for t in (0.25, 0.5, 1.0, 2.0):
            u = subordinate_solution(brownian, 0.5, t, datum)
            assert u.values.min() > -1e-8
            sups.append(u.values.max())
        assert all(a >= b - 1e-12 for a, b in zip(sups, sups[1:]))

    def test_subdiffusive_variance_growth(self, brownian, datum):
        # Var u(t) - Var f = 2 E[E_t] grows like sqrt(t): slope 1/2 in log-log
        x = datum.axis
        var0 = (datum.values * x**2).sum() / datum.values.sum()
        times = np.array([1.0, 2.0, 4.0, 8.0])
        spread = []
        for t in times:
            u = subordinate_solution(brownian, 0.5, t, datum)
            spread.append((u.values * x**2).sum() / u.values.sum() - var0)
        slope = np.polyfit(np.log(times), np.log(spread), 1)[0]
        assert slope == pytest.approx(0.5, rel=0.05)

    def test_identity_symbol_returns_datum(self, datum):
        # psi == 0 (zero triple): E_beta(0) = 1, so u = f for all t
        null = LevySymbol.general_triple(drift=(0.0,))
        u = subordinate_solution(null, 0.5, 3.0, datum)
        assert l1_gap(u, datum) < 1e-10
        v = fourier_ml_solution(null, 1 / 3, 3.0, datum)
        assert l1_gap(v, datum) < 1e-12

    def test_quadrature_failure_raises(self, brownian, datum):
        with pytest.raises(QuadratureError, match="refinement history"):
            subordinate_solution(brownian, 0.5, 1.0, datum, rel_tol=0.0, max_refinements=1)

    def test_parameter_validation(self, brownian, datum):
        with pytest.raises(ValueError):
            subordinate_solution(brownian, 1.2, 1.0, datum)
        with pytest.raises(ValueError):
            subordinate_solution(brownian, 0.5, 0.0, datum)


class TestFourierMlSolution:
    @pytest.mark.parametrize("beta,t", [(1 / 3, 0.25), (0.5, 1.0), (1 / 3, 4.0)])
    def test_oracle_agreement_brownian(self, brownian, datum, beta, t):
        u = subordinate_solution(brownian, beta, t, datum)
        v = fourier_ml_solution(brownian, beta, t, datum)
        assert l1_gap(u, v) < 1e-6

    def test_oracle_agreement_isotropic(self, datum):
        sym = LevySymbol.isotropic_stable(1.5, 1.0)
        u = subordinate_solution(sym, 0.5, 1.0, datum)
        v = fourier_ml_solution(sym, 0.5, 1.0, datum)
        assert l1_gap(u, v) < 1e-6

    def test_beta_one_limit_is_semigroup(self, brownian, datum):
        v = fourier_ml_solution(brownian, 1.0, 0.7, datum)
        w = semigroup_apply(brownian, 0.7, datum)
        assert np.abs(v.values - w.values).max() < 1e-12

    def test_2d_oracle_agreement(self):
        f = GridFunction.gaussian(2, 12.0, 64, width=1.0)
        sym = LevySymbol.brownian(1.0, dim=2)
        u = subordinate_solution(sym, 0.5, 0.5, f)
        v = fourier_ml_solution(sym, 0.5, 0.5, f)
        assert l1_gap(u, v) < 1e-6
        assert abs(u.mass - f.mass) < 1e-6

    def test_coordinate_stable_symbol_supported(self):
        # complex-valued symbol exercises the complex branch of E_beta
        f = GridFunction.gaussian(1, 24.0, 256, width=1.0)
        sym = LevySymbol.coordinate_stable((1.4,), 0.5)
        u = subordinate_solution(sym, 0.5, 1.0, f)
        v = fourier_ml_solution(sym, 0.5, 1.0, f)
        assert l1_gap(u, v) < 1e-6
        assert abs(u.mass - f.mass) < 1e-6


class TestSolutionField:
    def test_field_construction(self, brownian, datum):
        times = np.linspace(0.0, 1.0, 9)
        fld = solution_field(brownian, 0.5, times, datum)
        assert fld.values.shape == (9, 512)
        np.testing.assert_array_equal(fld.values[0], datum.values)
        assert fld.tau == pytest.approx(0.125)

    def test_requires_zero_start(self, brownian, datum):
        with pytest.raises(ValueError):
            solution_field(brownian, 0.5, np.linspace(0.5, 1.0, 5), datum)
