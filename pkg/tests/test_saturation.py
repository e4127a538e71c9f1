"""Correlated-detection model: closed forms, simulation, and curve fitting.

The analytic no-detection probability is cross-checked against mpmath's
arbitrary-precision beta function, an independent route from the
scipy/betaln implementation under test.
"""

import math

import mpmath
import pytest

from vfkit.saturation import (
    FitResult,
    NoFitError,
    SaturationDomainError,
    SaturationParams,
    SimCurve,
    analytic_no_detection,
    asymptotic_limit,
    beta_params_from,
    dr_upper_bound,
    fit_saturation,
    n_eff,
    simulate_exchangeable,
)


def mpmath_no_detection(p_bar: float, rho: float, n: int) -> float:
    with mpmath.workdps(60):
        s = 1 / mpmath.mpf(rho) - 1
        alpha = mpmath.mpf(p_bar) * s
        beta = (1 - mpmath.mpf(p_bar)) * s
        return float(mpmath.beta(alpha, beta + n) / mpmath.beta(alpha, beta))


class TestParams:
    def test_validation(self):
        with pytest.raises(SaturationDomainError):
            SaturationParams(p_bar=0.0, rho_eff=0.1, n=5)
        with pytest.raises(SaturationDomainError):
            SaturationParams(p_bar=1.0, rho_eff=0.1, n=5)
        with pytest.raises(SaturationDomainError):
            SaturationParams(p_bar=0.5, rho_eff=-0.1, n=5)
        with pytest.raises(SaturationDomainError):
            SaturationParams(p_bar=0.5, rho_eff=1.1, n=5)
        with pytest.raises(SaturationDomainError):
            SaturationParams(p_bar=0.5, rho_eff=0.5, n=0)

    def test_frozen(self):
        params = SaturationParams(p_bar=0.5, rho_eff=0.5, n=5)
        with pytest.raises(Exception):
            params.p_bar = 0.4


class TestEffectiveSize:
    def test_hand_values(self):
        assert n_eff(100, 0.1) == pytest.approx(100 / 10.9, abs=1e-12)
        assert n_eff(10, 0.0) == 10.0
        assert n_eff(10, 1.0) == 1.0
        assert n_eff(1, 0.7) == 1.0

    def test_monotone_decreasing_in_rho(self):
        vals = [n_eff(50, rho) for rho in (0.0, 0.1, 0.3, 0.7, 1.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(SaturationDomainError):
            n_eff(0, 0.5)
        with pytest.raises(SaturationDomainError):
            n_eff(10, 1.5)


class TestCeiling:
    def test_single_test_gives_p(self):
        params = SaturationParams(p_bar=0.37, rho_eff=0.5, n=1)
        assert dr_upper_bound(params) == pytest.approx(0.37, abs=1e-12)

    def test_full_correlation_pins_at_p(self):
        for n in (1, 10, 10_000):
            params = SaturationParams(p_bar=0.25, rho_eff=1.0, n=n)
            assert dr_upper_bound(params) == pytest.approx(0.25, abs=1e-12)

    def test_monotone_in_n_and_bounded_by_limit(self):
        prev = 0.0
        limit = asymptotic_limit(0.2, 0.3)
        for n in (1, 2, 5, 20, 100, 10_000):
            val = dr_upper_bound(SaturationParams(p_bar=0.2, rho_eff=0.3, n=n))
            assert val >= prev
            assert val < limit + 1e-12
            prev = val

    def test_limit_hand_value(self):
        assert asymptotic_limit(0.5, 0.5) == 0.75

    def test_limit_rejects_independence(self):
        with pytest.raises(SaturationDomainError, match="independence"):
            asymptotic_limit(0.5, 0.0)

    def test_large_n_approaches_limit(self):
        limit = asymptotic_limit(0.2, 0.3)
        val = dr_upper_bound(SaturationParams(p_bar=0.2, rho_eff=0.3, n=10 ** 6))
        assert abs(val - limit) < 1e-3


class TestAnalyticNoDetection:
    def test_matches_mpmath_oracle(self):
        for p in (0.05, 0.2, 0.5, 0.9):
            for rho in (0.01, 0.3, 0.75, 0.99):
                for n in (1, 2, 10, 100, 1000):
                    ours = analytic_no_detection(p, rho, n)
                    ref = mpmath_no_detection(p, rho, n)
                    assert ours == pytest.approx(ref, rel=1e-11, abs=1e-300)

    def test_independence_boundary(self):
        assert analytic_no_detection(0.3, 0.0, 4) == pytest.approx(0.7 ** 4, abs=1e-15)

    def test_full_correlation_boundary(self):
        for n in (1, 7, 500):
            assert analytic_no_detection(0.3, 1.0, n) == pytest.approx(0.7, abs=1e-15)

    def test_degenerate_p(self):
        assert analytic_no_detection(0.0, 0.5, 10) == 1.0
        assert analytic_no_detection(1.0, 0.5, 10) == 0.0
        assert analytic_no_detection(0.4, 0.5, 0) == 1.0

    def test_decreasing_in_n(self):
        vals = [analytic_no_detection(0.2, 0.3, n) for n in range(1, 200)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_beta_moments(self):
        alpha, beta = beta_params_from(0.2, 0.3)
        mean = alpha / (alpha + beta)
        # correlation of two draws sharing q equals 1/(alpha+beta+1)
        corr = 1.0 / (alpha + beta + 1.0)
        assert mean == pytest.approx(0.2, abs=1e-12)
        assert corr == pytest.approx(0.3, abs=1e-12)
        with pytest.raises(SaturationDomainError):
            beta_params_from(0.2, 0.0)
        with pytest.raises(SaturationDomainError):
            beta_params_from(0.2, 1.0)


class TestSimulation:
    def test_curve_is_monotone_and_in_range(self):
        curve = simulate_exchangeable(n_max=50, p_bar=0.2, rho=0.3, trials=5000, seed=1)
        drs = [dr for _, dr in curve.points]
        assert len(drs) == 50
        assert all(0.0 <= v <= 1.0 for v in drs)
        assert all(a <= b for a, b in zip(drs, drs[1:]))
        assert [n for n, _ in curve.points] == list(range(1, 51))

    def test_seeded_reproducibility(self):
        a = simulate_exchangeable(30, 0.3, 0.4, trials=2000, seed=7)
        b = simulate_exchangeable(30, 0.3, 0.4, trials=2000, seed=7)
        c = simulate_exchangeable(30, 0.3, 0.4, trials=2000, seed=8)
        assert a.points == b.points
        assert a.points != c.points

    def test_independent_case_matches_closed_form(self):
        trials = 60_000
        curve = simulate_exchangeable(40, 0.15, 0.0, trials=trials, seed=3)
        for n, dr in curve.points:
            expect = 1.0 - 0.85 ** n
            se = math.sqrt(max(expect * (1 - expect), 1e-12) / trials)
            assert abs(dr - expect) < 4 * se + 1e-9

    def test_full_correlation_is_flat(self):
        curve = simulate_exchangeable(30, 0.4, 1.0, trials=50_000, seed=5)
        drs = [dr for _, dr in curve.points]
        assert max(drs) - min(drs) == 0.0
        assert abs(drs[0] - 0.4) < 0.01

    def test_mixture_matches_analytic(self):
        trials = 40_000
        curve = simulate_exchangeable(60, 0.2, 0.3, trials=trials, seed=11)
        for n, dr in curve.points:
            expect = 1.0 - analytic_no_detection(0.2, 0.3, n)
            se = math.sqrt(max(expect * (1 - expect), 1e-12) / trials)
            assert abs(dr - expect) < 4 * se + 1e-9

    def test_validation(self):
        with pytest.raises(SaturationDomainError):
            simulate_exchangeable(0, 0.2, 0.3, trials=10, seed=0)
        with pytest.raises(ValueError):
            simulate_exchangeable(5, 0.2, 0.3, trials=0, seed=0)


class TestFit:
    def test_recovers_own_model_exactly(self):
        # noise-free curve drawn from the fitted family itself
        pts = [
            (n, dr_upper_bound(SaturationParams(p_bar=0.3, rho_eff=0.2, n=n)))
            for n in range(1, 81)
        ]
        fit = fit_saturation(pts)
        assert isinstance(fit, FitResult)
        assert fit.p_hat == pytest.approx(0.3, abs=1e-3)
        assert fit.rho_hat == pytest.approx(0.2, abs=1e-3)
        assert fit.rmse < 1e-4

    def test_independent_curve_fits_zero_rho(self):
        pts = [(n, 1.0 - 0.75 ** n) for n in range(1, 41)]
        fit = fit_saturation(pts)
        assert fit.p_hat == pytest.approx(0.25, abs=1e-3)
        assert fit.rho_hat < 1e-3

    def test_accepts_sim_curve_object(self):
        curve = SimCurve(
            points=[(n, dr_upper_bound(SaturationParams(p_bar=0.4, rho_eff=0.5, n=n)))
                    for n in range(1, 31)],
            trials=0,
            seed=0,
        )
        fit = fit_saturation(curve)
        assert fit.p_hat == pytest.approx(0.4, abs=1e-3)
        assert fit.rho_hat == pytest.approx(0.5, abs=1e-3)

    def test_rejects_degenerate_input(self):
        with pytest.raises(NoFitError):
            fit_saturation([(1, 0.1), (2, 0.2)])
        with pytest.raises(NoFitError):
            fit_saturation([(1, 0.0), (2, 0.0), (3, 0.0)])
        with pytest.raises(NoFitError):
            fit_saturation([(1, 0.5), (2, 1.0), (3, 0.7)])
