import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from fracpicard.errors import DomainError, RangeError
from fracpicard.specfun import (
    MLParams,
    Z_MAX,
    gamma,
    log_gamma,
    mittag_leffler,
    mittag_leffler_many,
    wendel_check,
)

# frozen from the series at elevated precision, cross-checked against erfcx
E_HALF_MINUS_ONE = 0.42758357615580755


def test_log_gamma_values():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-15)
    assert log_gamma(171.5) == pytest.approx(math.lgamma(171.5), rel=1e-15)
    np.testing.assert_allclose(log_gamma(np.array([2.0, 3.0, 4.0])), np.log([1.0, 2.0, 6.0]), atol=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_log_gamma_domain(x):
    with pytest.raises(DomainError):
        log_gamma(x)


def test_gamma():
    assert gamma(5.0) == 24.0
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    with pytest.raises(RangeError):
        gamma(171.0)
    with pytest.raises(DomainError):
        gamma(0.0)


@given(st.floats(0.01, 100.0))
def test_log_gamma_recurrence(x):
    # ln Gamma(x + 1) = ln x + ln Gamma(x)
    assert log_gamma(x + 1.0) == pytest.approx(math.log(x) + log_gamma(x), abs=1e-12, rel=1e-13)


def test_ml_exponential_and_cosh():
    assert mittag_leffler(MLParams(1.0, 1.0, 1.0)) == pytest.approx(math.e, rel=1e-15)
    assert mittag_leffler(MLParams(1.0, 1.0, -20.0)) == pytest.approx(math.exp(-20.0), rel=1e-13)
    assert mittag_leffler(MLParams(2.0, 1.0, 4.0)) == pytest.approx(math.cosh(2.0), rel=1e-15)


def test_ml_half_oracle():
    assert mittag_leffler(MLParams(0.5, 1.0, -1.0)) == pytest.approx(E_HALF_MINUS_ONE, abs=1e-15)
    assert special.erfcx(1.0) == pytest.approx(E_HALF_MINUS_ONE, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 26.0))
def test_ml_half_matches_erfcx(x):
    # E_{1/2}(-x) = exp(x^2) erfc(x)
    got = mittag_leffler(MLParams(0.5, 1.0, -x))
    assert got == pytest.approx(special.erfcx(x), rel=1e-12, abs=1e-15)


def test_ml_many_shape():
    z = np.array([[0.0, -1.0], [1.0, -0.5]])
    out = mittag_leffler_many(0.5, 1.0, z)
    assert out.shape == z.shape
    assert out[0, 0] == 1.0


def test_ml_errors():
    with pytest.raises(DomainError):
        MLParams(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        MLParams(0.5, -1.0, 1.0)
    with pytest.raises(RangeError):
        MLParams(0.5, 1.0, Z_MAX + 1.0)
    # terms would exceed double range during summation
    with pytest.raises(RangeError):
        mittag_leffler(MLParams(0.3, 0.7, 12.0))


def test_wendel_known_gap():
    lo, mid, hi = wendel_check(100.0, 0.3)
    assert lo <= mid <= hi == 1.0
    # the sandwich closes like a(1 - a)/(2x): 1.05e-3 here
    assert 1.0e-3 < mid - lo < 1.1e-3
    lo, mid, _ = wendel_check(1e4, 0.3)
    assert mid - lo < 1e-3


@given(st.floats(0.01, 1e6), st.floats(0.01, 1.0))
def test_wendel_sandwich(x, a):
    lo, mid, hi = wendel_check(x, a)
    assert lo <= mid * (1 + 1e-13)
    assert mid <= hi * (1 + 1e-13)


def test_wendel_domain():
    with pytest.raises(DomainError):
        wendel_check(0.0, 0.5)
    with pytest.raises(DomainError):
        wendel_check(1.0, 1.5)
