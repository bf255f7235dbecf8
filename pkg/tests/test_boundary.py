import math

import numpy as np
import pytest
from scipy import integrate

from fracpicard.boundary import (
    HLSpec,
    hl_sigma,
    nonuniqueness_demo,
    nonuniqueness_table,
    phi1_corrected,
    sigma_lp_norm_exact,
    unboundedness_demo,
)
from fracpicard.errors import DomainError


def test_spec_validation():
    HLSpec()
    with pytest.raises(DomainError):
        HLSpec(lam=0.5)  # sigma not in L^2
    with pytest.raises(DomainError):
        HLSpec(lam=1.5)  # J^(1/2) sigma stays bounded
    with pytest.raises(DomainError):
        HLSpec(p=1.0)
    with pytest.raises(DomainError):
        HLSpec(t0=1.5)


def test_sigma_values():
    s = hl_sigma(HLSpec())
    np.testing.assert_array_equal(s(np.array([0.5, 0.9])), [0.0, 0.0])
    assert s(np.array([0.25]))[0] == pytest.approx(2.0 / (1.0 + math.log(4.0)))


def test_exact_norm():
    spec = HLSpec()
    # int_0^t0 w^-1 (1 - ln w)^-2 dw = 1/(1 - ln t0)
    assert sigma_lp_norm_exact(spec) == pytest.approx((1.0 / (1.0 + math.log(2.0))) ** 0.5, rel=1e-15)
    sub, _ = integrate.quad(lambda s: hl_sigma(spec)(np.array([s]))[0] ** 2, 0.1, 0.4)
    assert sigma_lp_norm_exact(spec, 0.1, 0.4) ** 2 == pytest.approx(sub, rel=1e-10)


def test_small_demo_shape():
    table = unboundedness_demo(HLSpec(), [64, 128, 256])
    assert table.order == 0.5
    sups = table.sup_column()
    assert np.all(np.diff(sups) > 0)
    assert all(r.argmax_t == 0.5 for r in table.rows)
    assert table.to_csv().splitlines()[0] == "N,sup_J,sigma_lp_norm"
    with pytest.raises(DomainError):
        unboundedness_demo(HLSpec(), [128, 64])


def test_phi1_continuous():
    assert phi1_corrected(0.5) == 0.25
    assert phi1_corrected(1.0) == pytest.approx(0.5625)
    assert phi1_corrected(0.5 + 1e-12) == pytest.approx(0.25, abs=1e-11)


def test_nonuniqueness_converges():
    coarse = nonuniqueness_demo(256)
    fine = nonuniqueness_demo(1024)
    assert fine.residual_phi1 < coarse.residual_phi1
    assert fine.residual_phi2 == 0.0
    assert fine.separation == 0.5625
    lines = nonuniqueness_table([64, 128]).splitlines()
    assert lines[0] == "N,res1,res2,separation" and len(lines) == 3
