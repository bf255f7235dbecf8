import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fracpicard.contraction import (
    BOUNDARY_TOL,
    N0_SEARCH_LIMIT,
    ContractionParams,
    GateStatus,
    c_n,
    derive_beta,
    find_n0,
    log_c_n,
    multiorder_M,
    ratio,
    validity_gate,
    wendel_terms,
)
from fracpicard.errors import DomainError, HypothesisError


def test_derive_beta():
    assert derive_beta(0.5, 4.0) == pytest.approx((1.0 / 3.0, 4.0 / 3.0))
    assert derive_beta(0.7, math.inf) == (0.7, 1.0)
    with pytest.raises(HypothesisError):
        derive_beta(0.5, 2.0)
    with pytest.raises(DomainError):
        derive_beta(1.5, 4.0)


def test_factorial_case():
    params = ContractionParams(1.0, math.inf, 2.0, 1.0)
    for n, want in [(1, 2.0), (2, 2.0), (3, 4 / 3), (4, 2 / 3)]:
        assert c_n(params, n) == pytest.approx(want, rel=1e-13)
    report = find_n0(params)
    assert report.n0 == 4
    np.testing.assert_allclose(report.C, [2, 2, 4 / 3, 2 / 3], rtol=1e-13)
    assert report.to_csv().splitlines()[0] == "n,C_n,ratio,B_n,bound"
    assert "n0 = 4" in report.summary()


def test_zero_norm():
    report = find_n0(ContractionParams(0.5, 4.0, 0.0, 1.0))
    assert report.n0 == 1 and report.C[0] == 0.0


def test_small_norm_gives_n0_one():
    assert find_n0(ContractionParams(0.5, 4.0, 1e-3, 1.0)).n0 == 1


def test_n0_beyond_trace_limit():
    params = ContractionParams(0.0646, math.inf, 2.8, 0.65)
    report = find_n0(params, n_max=1000)
    assert report.truncated and not report.exhausted
    assert report.C.size == 1000
    assert log_c_n(params, report.n0) < 0 <= log_c_n(params, report.n0 - 1)


params_strategy = st.builds(
    lambda rho, qf, g, T, inf: ContractionParams(rho, math.inf if inf else (1 + qf) / rho, g, T),
    st.floats(0.05, 1.0),
    st.floats(0.05, 5.0),
    st.floats(0.01, 5.0),
    st.floats(0.1, 3.0),
    st.booleans(),
)


@settings(max_examples=60, deadline=None)
@given(params_strategy, st.integers(1, 999))
def test_ratio_consistency(params, n):
    lhs = log_c_n(params, n + 1) - log_c_n(params, n)
    assert math.exp(lhs) == pytest.approx(ratio(params, n), rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(params_strategy)
def test_n0_minimal(params):
    report = find_n0(params, n_max=1000)
    n0 = report.n0
    if n0 is None:
        # only when the crossing lies past what doubles can resolve
        assert report.exhausted and log_c_n(params, N0_SEARCH_LIMIT) >= 0
        return
    assert log_c_n(params, n0) < 0
    if n0 > 1:
        ks = np.arange(1, n0, dtype=float) if n0 < 10**5 else np.array([1.0, n0 - 1.0])
        assert np.all(np.asarray(log_c_n(params, ks)) >= 0)


@settings(max_examples=40)
@given(st.floats(0.01, 1.0))
def test_wendel_terms_bounded(beta):
    B, bound = wendel_terms(beta, np.arange(1, 2000))
    # equality holds at beta = 1; allow for Gamma-ratio rounding just below it
    assert np.all(B <= bound * (1 + 1e-10))


def test_multiorder_M():
    assert multiorder_M([0.5], 2.0) == pytest.approx(1.0)
    want = 1.0 + math.gamma(0.5) / math.gamma(1.0)
    assert multiorder_M([0.5, 1.0], 1.0) == pytest.approx(want)
    assert multiorder_M([0.5, 1.0], 4.0) == pytest.approx(1.0 + 2.0 * math.gamma(0.5))
    with pytest.raises(DomainError):
        multiorder_M([], 1.0)


def test_gate_examples():
    assert validity_gate([0.5], 4.0).ok
    g = validity_gate([0.5], 2.0)
    assert g.status is GateStatus.BOUNDARY and g.index == 0 and "may not exist" in g.message
    g = validity_gate([1.0, 0.4], 2.0)
    assert g.status is GateStatus.INSUFFICIENT and g.order == 0.4
    assert validity_gate([1.0, 1.0], 1.0).ok
    assert not validity_gate([1.0, 0.9], 1.0).ok
    assert validity_gate([0.5], 2.0 * (1 + BOUNDARY_TOL / 4)).status is GateStatus.BOUNDARY


@settings(max_examples=100)
@given(st.lists(st.floats(0.05, 1.0), min_size=1, max_size=4), st.floats(1.0, 50.0))
def test_gate_soundness(alphas, p):
    gate = validity_gate(alphas, p)
    if gate.ok and not (p == 1 and all(a == 1 for a in alphas)):
        derive_beta(min(alphas), p)
    else:
        assume(not gate.ok)
        assert gate.status in (GateStatus.BOUNDARY, GateStatus.INSUFFICIENT)
