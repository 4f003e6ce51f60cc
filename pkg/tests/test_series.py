import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crnx.series import SeriesVerdict, analyze_series, log_ratio, log_terms


def power(p):
    """sum_{n>=1} n^-p."""
    return (0.0, lambda n: -p * math.log1p(1.0 / n), 1)


@pytest.mark.parametrize("p", [2, 3, 1.5, 4])
def test_power_series_bracket_contains_zeta(p):
    log_first, ratio, start = power(p)
    s = analyze_series(log_first, ratio, start, terms=20_000)
    exact = float(mpmath.zeta(p))
    assert s.verdict is SeriesVerdict.FINITE
    assert s.lower <= exact <= s.upper
    assert s.tail_exponent == pytest.approx(p, rel=1e-3)


@pytest.mark.parametrize("p", [1.0, 0.5, 0.0])
def test_slow_power_series_diverge(p):
    s = analyze_series(*power(p), terms=10_000)
    assert s.verdict is SeriesVerdict.DIVERGENT
    assert s.upper == math.inf


def test_geometric_series():
    s = analyze_series(math.log(0.5), lambda n: math.log(0.5), 1, terms=200)
    assert s.verdict is SeriesVerdict.FINITE
    assert s.lower <= 1.0 <= s.upper
    assert s.value == pytest.approx(1.0, rel=1e-14)


def test_exponential_series():
    # sum 1/n! from n = 0
    s = analyze_series(0.0, lambda n: -math.log(n + 1), 0, terms=50)
    assert s.value == pytest.approx(math.e, rel=1e-15)
    assert s.test == "ratio test"


def test_terminating_series():
    s = analyze_series(0.0, lambda n: -math.inf if n == 3 else 0.0, 0, terms=10)
    assert s.verdict is SeriesVerdict.FINITE and s.value == 4.0 and s.test == "terminating"


def test_growing_terms_diverge():
    s = analyze_series(0.0, lambda n: math.log1p(1.0 / n), 1, terms=1000)
    assert s.verdict is SeriesVerdict.DIVERGENT
    assert s.test == "non-vanishing terms"


@pytest.mark.parametrize("q", [1, 2])
def test_logarithmic_borderline_is_inconclusive(q):
    # 1/(n log^q n): exponent tends to 1 too slowly for a sound verdict
    def ratio(n):
        return -math.log1p(1.0 / n) - q * (math.log(math.log(n + 1)) - math.log(math.log(n)))

    s = analyze_series(-q * math.log(math.log(2)) - math.log(2), ratio, 2, terms=10_000)
    assert s.verdict is SeriesVerdict.INCONCLUSIVE


@pytest.mark.parametrize("terms", [1_000, 10_000, 100_000])
def test_embedded_series_verdicts_stable(terms):
    # prod_{x=2}^n (x-1)^2/x^2 = 1/n^2 and prod (x-1)/x = 1/n
    sq = analyze_series(math.log(0.25), lambda n: 2 * log_ratio(n, n + 1), 2, terms)
    lin = analyze_series(math.log(0.5), lambda n: log_ratio(n, n + 1), 2, terms)
    assert sq.verdict is SeriesVerdict.FINITE
    assert sq.lower <= math.pi**2 / 6 - 1 <= sq.upper
    assert lin.verdict is SeriesVerdict.DIVERGENT


@given(st.integers(1, 10**30), st.integers(1, 10**30))
def test_log_ratio_exact_rounding(a, b):
    with mpmath.workprec(200):
        expected = float(mpmath.log(mpmath.mpf(a) / mpmath.mpf(b)))
    assert log_ratio(a, b) == pytest.approx(expected, rel=1e-14, abs=1e-300)


def test_log_ratio_special_values():
    assert log_ratio(0, 3) == -math.inf
    assert log_ratio(3, 0) == math.inf
    assert log_ratio(Fraction(1, 3), Fraction(2, 3)) == pytest.approx(-math.log(2), rel=1e-15)
    assert log_ratio(1e300, 1e-300) == pytest.approx(600 * math.log(10))


def test_log_terms_cumulative():
    logs = log_terms(0.0, lambda n: -math.log(2.0), 0, 5)
    np.testing.assert_allclose(np.exp(logs), [1, 0.5, 0.25, 0.125, 0.0625, 0.03125])
