import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twophaselab import fit_algebraic_tail, fit_exponential_tail, weighted_inequality_check
from twophaselab.analysis import (InsufficientDataError, fit_loglog,
                                  fit_reciprocal, grid_integral, simpson_weights)


class TestExponentialFit:
    def test_exact_model(self):
        x = np.linspace(0.0, 10.0, 400)
        fit = fit_exponential_tail(x, np.exp(-2.0 * x))
        assert fit.rate_or_slope == pytest.approx(2.0, abs=1e-10)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_mild_modulation(self):
        x = np.linspace(0.0, 30.0, 1500)
        y = 3.0 * np.exp(-0.5 * x) * (1.0 + 0.01 * np.sin(x))
        fit = fit_exponential_tail(x, y)
        assert fit.rate_or_slope == pytest.approx(0.5, rel=0.02)

    def test_constant_flagged(self):
        x = np.linspace(0.0, 10.0, 100)
        fit = fit_exponential_tail(x, np.ones_like(x))
        assert fit.rate_or_slope == pytest.approx(0.0, abs=1e-12)
        assert fit.low_confidence

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            fit_exponential_tail(np.linspace(0, 1, 5), np.exp(-np.linspace(0, 1, 5)))

    @settings(max_examples=40, deadline=None)
    @given(scale=st.floats(1e-6, 1e6), rate=st.floats(0.1, 4.0))
    def test_scale_equivariance(self, scale, rate):
        x = np.linspace(0.0, 8.0, 300)
        y = np.exp(-rate * x)
        f1 = fit_exponential_tail(x, y)
        f2 = fit_exponential_tail(x, scale * y)
        assert f2.rate_or_slope == pytest.approx(f1.rate_or_slope, rel=1e-12)


class TestAlgebraicFit:
    def test_exact_reciprocal(self):
        # far enough out that 1 + x and x are indistinguishable in the window
        x = np.linspace(0.0, 2000.0, 4000)
        fit = fit_algebraic_tail(x, 1.0 / (1.0 + x))
        assert fit.rate_or_slope == pytest.approx(1.0, abs=1e-10)
        assert fit.loglog_exponent == pytest.approx(-1.0, abs=1e-2)

    def test_small_delta_family(self):
        delta = 0.01
        x = np.linspace(0.0, 4.0e4, 8000)
        fit = fit_algebraic_tail(x, delta / (1.0 + delta * x))
        assert fit.loglog_exponent == pytest.approx(-1.0, rel=0.01)

    def test_model_selection_prefers_exponential_for_exponential_data(self):
        x = np.linspace(0.0, 12.0, 600)
        y = np.exp(-x)
        exp_fit = fit_exponential_tail(x, y)
        alg_fit = fit_algebraic_tail(x, y)
        assert exp_fit.r_squared > alg_fit.loglog_r_squared

    @settings(max_examples=30, deadline=None)
    @given(scale=st.floats(1e-4, 1e4))
    def test_loglog_scale_equivariance(self, scale):
        x = np.linspace(1.0, 100.0, 500)
        y = 1.0 / (1.0 + x) ** 2
        f1 = fit_loglog(x, y)
        f2 = fit_loglog(x, scale * y)
        assert f2.rate_or_slope == pytest.approx(f1.rate_or_slope, rel=1e-12)


class TestQuadrature:
    def test_simpson_exact_on_cubics_even_intervals(self):
        x = np.linspace(0.0, 1.0, 11)
        w = simpson_weights(x.size, x[1] - x[0])
        assert w @ x**3 == pytest.approx(0.25, rel=1e-14)

    def test_simpson_exact_on_cubics_odd_intervals(self):
        x = np.linspace(0.0, 1.0, 12)  # 11 intervals: Simpson + 3/8 closure
        w = simpson_weights(x.size, x[1] - x[0])
        assert w @ x**3 == pytest.approx(0.25, rel=1e-14)

    def test_grid_integral_gaussian(self):
        x = np.linspace(0.0, 40.0, 4001)
        val = grid_integral(x, np.exp(-((x - 20.0) / 2.0) ** 2))
        assert val == pytest.approx(2.0 * np.sqrt(np.pi), rel=1e-12)


class TestWeightedInequalities:
    def test_zero_function(self):
        x = np.linspace(0.0, 20.0, 500)
        rep = weighted_inequality_check(np.zeros_like(x), x, c0=1.0, delta=0.1)
        assert rep.exp_holds and rep.alg_holds
        assert rep.exp_ratio == 0.0

    def test_reference_function(self):
        x = np.linspace(0.0, 40.0, 2000)
        psi = x * np.exp(-x)
        rep = weighted_inequality_check(psi, x, c0=1.0, delta=0.1)
        assert rep.exp_holds and rep.alg_holds
        assert rep.exp_ratio < 1.0
        assert rep.alg_ratio < 1.0

    def test_random_smooth_functions(self):
        rng = np.random.default_rng(99)
        x = np.linspace(0.0, 50.0, 1500)
        for _ in range(100):
            psi = np.zeros_like(x)
            for _ in range(rng.integers(1, 5)):
                psi += rng.uniform(-2, 2) * np.exp(
                    -((x - rng.uniform(0, 40)) / rng.uniform(0.5, 5.0)) ** 2)
            rep = weighted_inequality_check(
                psi, x, c0=float(rng.uniform(0.2, 3.0)),
                delta=float(rng.uniform(1e-4, 0.5)), j=3.0)
            assert rep.exp_holds and rep.alg_holds

    def test_j_must_exceed_two(self):
        x = np.linspace(0.0, 10.0, 200)
        with pytest.raises(InsufficientDataError):
            weighted_inequality_check(np.exp(-x), x, c0=1.0, delta=0.1, j=2.0)


class TestReciprocalFit:
    def test_window_override(self):
        x = np.linspace(0.0, 100.0, 2000)
        y = 1.0 / (2.0 + 3.0 * x)
        fit = fit_reciprocal(x, y, window=(50.0, 100.0))
        assert fit.rate_or_slope == pytest.approx(3.0, rel=1e-10)
        assert fit.window[0] >= 50.0
