"""Tests for the gamma-function layer.

Frozen reference values were generated from independent oracles: direct
quadrature of the defining integrals (with the endpoint singularity
removed by substitution where needed), integration by parts for integer
shapes, and 40-digit mpmath evaluation.  The quadrature oracles are
re-run here so a regression in either side shows up as a disagreement.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from asymloss import specfun
from asymloss.errors import DomainError, RangeError

# gamma(0.5, 1) lower: substitute t = u^2 so the integrand is smooth,
# 2 * integral_0^1 exp(-u^2) du; frozen from that quadrature (= sqrt(pi) erf(1)).
LOWER_HALF_ONE = 1.4936482656248540
# Gamma(2, 1) upper: integration by parts gives (1 + 1) e^-1 = 2/e.
UPPER_TWO_ONE = 0.7357588823428847
# mpmath, 40 digits:
LOWER_FIVE_2P5 = 2.6117275460603702
UPPER_TENTH_THREE = 0.014891224816681061


def lower_half_by_substitution(x):
    # integral_0^x t^(-1/2) e^(-t) dt with t = u^2
    val, err = integrate.quad(lambda u: 2.0 * math.exp(-u * u), 0.0, math.sqrt(x),
                              epsabs=1e-13, epsrel=1e-13)
    assert err < 1e-12
    return val


class TestGamma:
    def test_integers_are_factorials(self):
        assert specfun.gamma(1.0) == 1.0
        assert specfun.gamma(5.0) == 24.0

    def test_half_integer(self):
        assert specfun.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)

    def test_recurrence(self):
        a = np.geomspace(0.05, 120.0, 60)
        np.testing.assert_allclose(specfun.gamma(a + 1.0), a * specfun.gamma(a), rtol=1e-13)

    def test_matches_log_gamma(self):
        a = np.geomspace(0.1, 100.0, 25)
        np.testing.assert_allclose(
            np.log(specfun.gamma(a)), specfun.log_gamma(a), rtol=0, atol=1e-12
        )

    def test_rejects_nonpositive_and_nonfinite(self):
        for bad in (0.0, -1.0, math.nan, math.inf):
            with pytest.raises(DomainError):
                specfun.gamma(bad)

    def test_overflow_is_range_error(self):
        with pytest.raises(RangeError):
            specfun.gamma(200.0)
        # log form still works out there
        assert specfun.log_gamma(200.0) == pytest.approx(857.9336698258574, rel=1e-13)

    def test_array_in_float_out_convention(self):
        out = specfun.gamma([1.0, 2.0, 4.0])
        assert isinstance(out, np.ndarray)
        np.testing.assert_array_equal(out, [1.0, 1.0, 6.0])
        assert isinstance(specfun.gamma(3.0), float)


class TestIncompletePair:
    def test_exponential_shape_is_elementary(self):
        # a = 1: lower = 1 - e^-x, upper = e^-x
        for x in (0.0, 0.3, 1.0, 4.7, 30.0):
            assert specfun.lower_incomplete(1.0, x) == pytest.approx(-math.expm1(-x), rel=1e-14)
            assert specfun.upper_incomplete(1.0, x) == pytest.approx(math.exp(-x), rel=1e-14)

    def test_frozen_singular_shape(self):
        got = specfun.lower_incomplete(0.5, 1.0)
        assert got == pytest.approx(LOWER_HALF_ONE, rel=1e-12)
        assert got == pytest.approx(lower_half_by_substitution(1.0), rel=1e-12)

    def test_frozen_spot_values(self):
        assert specfun.lower_incomplete(5.0, 2.5) == pytest.approx(LOWER_FIVE_2P5, rel=1e-13)
        assert specfun.upper_incomplete(0.1, 3.0) == pytest.approx(UPPER_TENTH_THREE, rel=1e-13)
        assert specfun.upper_incomplete(2.0, 1.0) == pytest.approx(UPPER_TWO_ONE, rel=1e-13)

    def test_boundary_at_zero(self):
        assert specfun.lower_incomplete(2.5, 0.0) == 0.0
        assert specfun.upper_incomplete(3.0, 0.0) == pytest.approx(2.0, rel=1e-15)

    def test_complementarity_grid(self):
        a = np.geomspace(0.1, 20.0, 12)[:, None]
        x = np.concatenate([[0.0], np.geomspace(1e-3, 50.0, 15)])[None, :]
        total = specfun.lower_incomplete(a, x) + specfun.upper_incomplete(a, x)
        np.testing.assert_allclose(total, np.broadcast_to(specfun.gamma(a), total.shape),
                                   rtol=1e-12)

    def test_lower_monotone_in_x(self):
        x = np.linspace(0.0, 12.0, 200)
        for a in (0.3, 1.0, 4.0):
            vals = specfun.lower_incomplete(a, x)
            assert np.all(np.diff(vals) >= 0.0)

    def test_derivative_matches_integrand(self):
        h = 1e-5
        for a in (0.7, 2.0, 6.0):
            for x in (0.4, 1.3, 5.0):
                numeric = (specfun.lower_incomplete(a, x + h)
                           - specfun.lower_incomplete(a, x - h)) / (2 * h)
                exact = x ** (a - 1.0) * math.exp(-x)
                assert numeric == pytest.approx(exact, rel=1e-7)

    def test_rejects_negative_x(self):
        with pytest.raises(DomainError):
            specfun.lower_incomplete(1.0, -0.1)
        with pytest.raises(DomainError):
            specfun.upper_incomplete(1.0, [0.5, -2.0])


class TestRegularized:
    def test_bounds_and_complement(self):
        a = np.geomspace(0.2, 10.0, 8)[:, None]
        x = np.geomspace(1e-2, 40.0, 12)[None, :]
        p = specfun.regularized_lower(a, x)
        q = specfun.regularized_upper(a, x)
        assert np.all((p >= 0.0) & (p <= 1.0))
        np.testing.assert_allclose(p + q, 1.0, rtol=0, atol=1e-13)

    def test_inverse_round_trip(self):
        for a in (0.4, 1.0, 3.5):
            for p in (1e-6, 0.25, 0.5, 0.975, 1 - 1e-9):
                x = specfun.regularized_lower_inv(a, p)
                assert specfun.regularized_lower(a, x) == pytest.approx(p, rel=1e-10)

    def test_inverse_endpoints(self):
        assert specfun.regularized_lower_inv(2.0, 0.0) == 0.0
        assert specfun.regularized_lower_inv(2.0, 1.0) == math.inf

    def test_rejects_bad_p(self):
        with pytest.raises(DomainError):
            specfun.regularized_lower_inv(1.0, -0.1)
        with pytest.raises(DomainError):
            specfun.regularized_lower_inv(1.0, 1.5)
