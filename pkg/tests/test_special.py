"""Distribution-function checks against independent oracles.

Oracles here never touch the package's incomplete-beta/gamma code:
closed forms (exponential CDF, F(d,d) median), a finite-sum t CDF for even
df, and bisection on a Taylor-series erf.  Tolerances: 1e-10 for the CDF
contracts, 1e-8 for the quantile.
"""

from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from covadj import DomainError, chisq_cdf, chisq_sf, f_cdf, f_sf, normal_quantile


def t_cdf_even_df(x: float, nu: int) -> float:
    """Student-t CDF for even df via the classical finite sum."""
    assert nu % 2 == 0
    u = nu / (nu + x * x)
    coef = 1.0
    total = 0.0
    for j in range(nu // 2):
        if j > 0:
            coef *= (2 * j - 1) / (2 * j)
        total += coef * u ** j
    return 0.5 + 0.5 * x / math.sqrt(nu + x * x) * total


def erf_series(x: float) -> float:
    """Taylor erf; plenty accurate for |x| <= 3."""
    total = 0.0
    term = x
    n = 0
    while abs(term) > 1e-18:
        total += term / (2 * n + 1)
        n += 1
        term *= -x * x / n
    return 2.0 / math.sqrt(math.pi) * total


def phi_series(z: float) -> float:
    return 0.5 * (1.0 + erf_series(z / math.sqrt(2.0)))


class TestFCdf:
    def test_median_of_symmetric_df(self):
        # F(d, d) has median exactly 1
        assert f_cdf(1.0, 2.0, 2.0) == pytest.approx(0.5, abs=1e-12)
        assert f_cdf(1.0, 7.0, 7.0) == pytest.approx(0.5, abs=1e-12)

    def test_lower_support_bound(self):
        assert f_cdf(0.0, 3.0, 8.0) == 0.0

    def test_against_even_df_t_oracle(self):
        # F(1, nu) is the square of t(nu)
        for x, nu in ((4.0, 10), (1.3, 4), (7.5, 38), (0.2, 20)):
            expected = 1.0 - 2.0 * (1.0 - t_cdf_even_df(math.sqrt(x), nu))
            assert f_cdf(x, 1.0, nu) == pytest.approx(expected, abs=1e-10)

    def test_sf_complements_cdf(self):
        for x, d1, d2 in ((0.7, 1, 37), (3.2, 2, 18), (12.0, 1, 4.37)):
            assert f_cdf(x, d1, d2) + f_sf(x, d1, d2) == pytest.approx(1.0, abs=1e-12)

    def test_monotone_nondecreasing(self):
        prev = -1.0
        for i in range(200):
            v = f_cdf(0.05 * i, 3.0, 11.0)
            assert 0.0 <= v <= 1.0
            assert v >= prev
            prev = v

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            f_cdf(-0.1, 2, 2)
        with pytest.raises(DomainError):
            f_cdf(1.0, 0.0, 2)
        with pytest.raises(DomainError):
            f_cdf(1.0, 2, -3)


class TestChisqCdf:
    def test_two_df_is_exponential(self):
        # chi-square(2) is Exp(mean 2): CDF 1 - exp(-x/2)
        assert chisq_cdf(2 * math.log(2), 2) == pytest.approx(0.5, abs=1e-12)
        for x in (1.0, 5.0, 10.0):
            assert chisq_cdf(x, 2) == pytest.approx(1 - math.exp(-x / 2), abs=1e-10)
            assert chisq_sf(x, 2) == pytest.approx(math.exp(-x / 2), rel=1e-10)

    def test_lower_support_bound(self):
        assert chisq_cdf(0.0, 5.0) == 0.0

    def test_monotone_and_bounded(self):
        prev = -1.0
        for i in range(200):
            v = chisq_cdf(0.1 * i, 7.3)
            assert 0.0 <= v <= 1.0
            assert v >= prev
            prev = v

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            chisq_cdf(-1.0, 2)
        with pytest.raises(DomainError):
            chisq_cdf(1.0, 0.0)


class TestNormalQuantile:
    def test_median(self):
        assert normal_quantile(0.5) == 0.0

    def test_975_value(self):
        assert normal_quantile(0.975) == pytest.approx(1.95996, abs=1e-4)

    def test_antisymmetry(self):
        for p in (0.01, 0.1, 0.3):
            assert normal_quantile(p) + normal_quantile(1 - p) == pytest.approx(
                0.0, abs=1e-12)

    def test_against_erf_bisection(self):
        # invert the series-based Phi by bisection, compare at 1e-8
        for p in (0.6, 0.8, 0.95, 0.975, 0.99):
            lo, hi = 0.0, 3.5
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if phi_series(mid) < p:
                    lo = mid
                else:
                    hi = mid
            assert normal_quantile(p) == pytest.approx(0.5 * (lo + hi), abs=1e-8)

    def test_domain_errors(self):
        for p in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(DomainError):
                normal_quantile(p)

    @given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
    def test_roundtrip_through_series_phi(self, p):
        z = normal_quantile(p)
        if abs(z) <= 3.0:  # series oracle trustworthy here
            assert phi_series(z) == pytest.approx(p, abs=1e-9)
