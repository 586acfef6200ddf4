import math

import numpy as np
import pytest

from maassforms.bessel import BesselEvaluator, k_bessel, truncation_level, u_switch
from maassforms.errors import AccuracyError, DomainError


def k0_series(x: float, terms: int = 40) -> float:
    """Power-series oracle for K_0, independent of the quadrature route.

    K_0(x) = -(ln(x/2) + gamma) I_0(x) + sum_{k>=1} (x^2/4)^k / (k!)^2 H_k
    """
    euler_gamma = 0.5772156649015328606
    q = x * x / 4.0
    i0 = 1.0
    series = 0.0
    term = 1.0
    harmonic = 0.0
    for k in range(1, terms):
        term *= q / (k * k)
        harmonic += 1.0 / k
        i0 += term
        series += term * harmonic
    return -(math.log(x / 2.0) + euler_gamma) * i0 + series


class TestOracles:
    def test_k0_series_value(self):
        # frozen from the series itself at x=1
        assert k0_series(1.0) == pytest.approx(0.42102443824070834, rel=1e-14)

    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.0, 4.0])
    def test_r0_matches_series(self, x):
        ev = BesselEvaluator(0.0)
        assert ev.eval_one(x) == pytest.approx(k0_series(x), rel=1e-10)

    def test_large_u_asymptotic(self):
        # sqrt(pi/2u) e^{-u} leading term; 2% window at u=50 for R <= 16
        u = 50.0
        lead = math.sqrt(math.pi / (2 * u)) * math.exp(-u)
        for R in [0.0, 4.0, 8.0, 12.0, 16.0]:
            val = BesselEvaluator(R).eval_one(u) * math.exp(-math.pi * R / 2.0)
            assert val == pytest.approx(lead, rel=0.02), R


class TestEvaluator:
    def test_values_real_and_finite(self):
        ev = BesselEvaluator(5.436180461)
        vals = ev.eval_many(np.geomspace(0.1, 100.0, 40))
        assert np.all(np.isfinite(vals))

    def test_sign_of_r_irrelevant(self):
        upts = np.geomspace(0.5, 50.0, 11)
        a = BesselEvaluator(7.25).eval_many(upts)
        b = BesselEvaluator(-7.25).eval_many(upts)
        assert np.array_equal(a, b)

    def test_eigenvalue_accessor(self):
        assert BesselEvaluator(2.0).eigenvalue == pytest.approx(4.25)

    def test_positive_decay_beyond_turning_point(self):
        ev = BesselEvaluator(3.0)
        vals = ev.eval_many(np.linspace(10.0, 40.0, 7))
        assert np.all(vals > 0)
        assert np.all(np.diff(vals) < 0)

    def test_rejects_nonpositive_argument(self):
        with pytest.raises(DomainError):
            BesselEvaluator(1.0).eval_one(0.0)
        with pytest.raises(DomainError):
            BesselEvaluator(1.0).eval_one(-2.0)

    def test_rejects_outside_window(self):
        with pytest.raises(AccuracyError):
            BesselEvaluator(1.0).eval_one(1e-5)
        with pytest.raises(AccuracyError):
            BesselEvaluator(1.0).eval_one(2e4)

    def test_rejects_unknown_method(self):
        with pytest.raises(DomainError):
            BesselEvaluator(1.0, method="simpson")

    def test_huge_argument_underflows_to_zero(self):
        assert BesselEvaluator(1.0).eval_one(900.0) == 0.0

    def test_cache_bitwise_transparency(self):
        ev = BesselEvaluator(3.7)
        first = ev.eval_many([0.9, 1.7, 31.0])
        again = ev.eval_many([0.9, 1.7, 31.0])
        assert np.array_equal(first, again)
        scalar = ev.eval_one(1.7)
        assert scalar == first[1]

    def test_k_bessel_function(self):
        ev = BesselEvaluator(0.0)
        assert k_bessel(ev, 1.0) == ev.eval_one(1.0)


class TestDualQuadrature:
    def test_agreement_on_grid(self):
        # 50-point grid over the working window; the two node families must
        # agree to 1e-10 relative
        r_values = [0.0, 4.0, 8.0, 12.0, 16.0]
        u_values = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 150.0, 200.0]
        for R in r_values:
            gl = BesselEvaluator(R, method="legendre")
            cc = BesselEvaluator(R, method="chebyshev")
            a = gl.eval_many(u_values)
            b = cc.eval_many(u_values)
            scale = np.maximum(np.abs(a), 1e-3)
            assert np.max(np.abs(a - b) / scale) < 1e-10, R

    def test_against_reference_library(self):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 30
        rng = np.random.default_rng(5)
        for _ in range(25):
            R = rng.uniform(0.0, 17.0)
            u = float(np.exp(rng.uniform(np.log(0.05), np.log(300.0))))
            ref = float((mpmath.besselk(mpmath.mpc(0, R), mpmath.mpf(u))
                         * mpmath.exp(mpmath.pi * R / 2)).real)
            got = BesselEvaluator(R).eval_one(u)
            assert got == pytest.approx(ref, rel=1e-9, abs=1e-12), (R, u)


class TestTruncationLevel:
    def test_monotone_in_y0(self):
        ms = [truncation_level(11.8, y0, 1e-6) for y0 in (0.08, 0.12, 0.16, 0.24)]
        assert ms == sorted(ms, reverse=True)

    def test_monotone_in_eps(self):
        m6 = truncation_level(11.8, 0.08, 1e-6)
        m8 = truncation_level(11.8, 0.08, 1e-8)
        assert m8 >= m6

    def test_regression_value(self):
        # frozen from the implemented bound
        assert truncation_level(11.8, 0.08, 1e-6) == 57

    def test_rejects_degenerate(self):
        with pytest.raises(DomainError):
            truncation_level(5.0, 0.0, 1e-6)
        with pytest.raises(DomainError):
            truncation_level(5.0, 0.1, 2.0)

    def test_switch_point_positive(self):
        assert u_switch(0.0) == 3.0
        assert u_switch(16.0) > 16.0
