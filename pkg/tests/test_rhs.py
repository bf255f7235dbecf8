import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracpicard.errors import ConfigError, EvaluationError
from fracpicard.fracgrid import GridFunction, make_grid
from fracpicard.rhs import (
    CaratheodoryRHS,
    catalog,
    check_growth,
    check_lipschitz,
    nemytskii_eval,
    weight_lp_norm,
)


def test_zero():
    f = catalog("zero", dim=2)
    assert np.all(f([3.0, -1.0], 0.2) == 0.0)
    assert f.growth_constant == 0.0
    assert check_growth(f, 5.0, 200).passed and check_lipschitz(f, 5.0, 200).passed


def test_linear_scalar():
    f = catalog("linear_scalar", lam=-1.0)
    assert f([2.0], 0.3)[0] == -2.0
    assert f.growth_constant == 1.0
    assert f.lipschitz_weight(np.array([0.5]))[0] == 1.0


def test_linear_system_witnesses():
    f = catalog("linear_system", A=[[0.0, 2.0], [-1.0, 0.0]], forcing=[1.0, 0.0])
    np.testing.assert_array_equal(f([1.0, 1.0], 0.0), [3.0, -1.0])
    assert f.growth_constant == pytest.approx(2.0)
    assert check_growth(f, 10.0, 2000, seed=3).passed
    assert check_lipschitz(f, 10.0, 2000, seed=3).passed


def test_catalog_errors():
    with pytest.raises(ConfigError):
        catalog("nope")
    with pytest.raises(ConfigError):
        catalog("linear_scalar", mu=2)
    with pytest.raises(ConfigError):
        catalog("linear_system", A=[[1.0, 2.0]])


def test_intro_nonuniqueness():
    f = catalog("intro_nonuniqueness")
    assert f([4.0], 0.25)[0] == 4.0
    assert f([4.0], 0.75)[0] == 2.0
    assert f([-1.0], 0.1)[0] == 0.0
    assert check_growth(f, 5.0, 3000).passed
    lip = check_lipschitz(f, 1.0, 3000)
    assert not lip.passed
    assert lip.witness["reason"] == "no Lipschitz weight declared"
    assert lip.witness["quotient"] > 1e3


def test_lipschitz_falsified_with_wrong_weight():
    f = catalog("linear_scalar", lam=3.0)
    report = check_lipschitz(f, 1.0, 500, weight=lambda t: np.ones_like(t))
    assert not report.passed and report.witness["quotient"] == pytest.approx(3.0)


def test_growth_falsified():
    bad = CaratheodoryRHS(1, lambda x, t: 2 * x, 1.0, lambda t: np.zeros_like(t))
    assert not check_growth(bad, 1.0, 100).passed


@settings(max_examples=20)
@given(st.integers(0, 2**32))
def test_growth_deterministic_in_seed(seed):
    f = catalog("linear_scalar", lam=2.0)
    a, b = check_growth(f, 3.0, 90, seed=seed), check_growth(f, 3.0, 90, seed=seed)
    assert a.witness == b.witness and a.passed


def test_hl_forced():
    f = catalog("hl_forced", p=2.0, lam=1.0, t0=0.5)
    assert f.p == 2.0
    assert f([1.0], 0.75)[0] == 1.0
    assert f([0.0], 0.25)[0] == pytest.approx(0.25**-0.5 / (1 - math.log(0.25)))


@pytest.mark.filterwarnings("ignore:divide by zero")
def test_nemytskii_and_errors():
    g = make_grid(1.0, 4)
    phi = GridFunction(g, np.column_stack([g.nodes, -g.nodes]))
    f = catalog("linear_system", A=[[0.0, 1.0], [1.0, 0.0]])
    out = nemytskii_eval(f, phi)
    np.testing.assert_array_equal(out.values, phi.values[:, ::-1])
    blowup = CaratheodoryRHS(1, lambda x, t: x / (t - 0.5), 1.0, lambda t: np.zeros_like(t))
    with pytest.raises(EvaluationError) as info:
        nemytskii_eval(blowup, GridFunction.constant(g, 1.0))
    assert info.value.node == 2


def test_weight_lp_norm():
    g = make_grid(1.0, 1000)
    assert weight_lp_norm(lambda t: np.full_like(t, 3.0), 2.0, g) == pytest.approx(3.0)
    assert weight_lp_norm(lambda t: t, math.inf, g) == pytest.approx(1.0, abs=1e-3)
