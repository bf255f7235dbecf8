import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracpicard.errors import DomainError, ShapeError
from fracpicard.fracgrid import GridFunction, make_grid
from fracpicard.fracint import (
    MAX_TABLE_NODES,
    QuadratureRule,
    build_weights,
    caputo_l1,
    holder_envelope,
    rl_integral,
    rl_integral_direct,
)

# J^{0.3} t at t = 1 equals 1/Gamma(2.3)
J03_T_AT_1 = 0.857109621959463


def _J(alpha, g, rule=QuadratureRule.TRAPEZOID):
    return rl_integral(build_weights(alpha, g.grid, rule), g)


def test_linear_is_exact_for_trapezoid():
    g = make_grid(1.0, 32, 1.7)
    t = GridFunction.from_callable(g, lambda s: s)
    out = _J(0.3, t).values[:, 0]
    assert out[-1] == pytest.approx(J03_T_AT_1, abs=1e-14)
    np.testing.assert_allclose(out, g.nodes**1.3 / math.gamma(2.3), atol=1e-14)


def test_order_one_is_ordinary_integral():
    g = make_grid(1.0, 50)
    t = GridFunction.from_callable(g, lambda s: s)
    np.testing.assert_allclose(_J(1.0, t).values[:, 0], g.nodes**2 / 2, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1.0), st.integers(1, 200), st.floats(1.0, 4.0), st.sampled_from(list(QuadratureRule)))
def test_constants_exact(alpha, N, r, rule):
    g = make_grid(1.0, N, r)
    out = _J(alpha, GridFunction.constant(g, 1.0), rule).values[:, 0]
    np.testing.assert_allclose(out, g.nodes**alpha / math.gamma(alpha + 1), atol=1e-13)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 1.0), st.integers(1, 120), st.floats(-5, 5), st.floats(-5, 5))
def test_linearity_and_causality(alpha, N, a, b):
    g = make_grid(1.0, N, 1.5)
    u = GridFunction.from_callable(g, np.cos)
    v = GridFunction.from_callable(g, lambda s: s**2)
    table = build_weights(alpha, g)
    lhs = rl_integral(table, GridFunction(g, a * u.values + b * v.values)).values
    rhs = a * rl_integral(table, u).values + b * rl_integral(table, v).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
    assert np.all(np.triu(table.dense(), 1) == 0.0)
    assert rl_integral(table, u).values[0, 0] == 0.0


def test_direct_bit_identical_to_table():
    g = make_grid(1.0, 300, 2.0)
    f = GridFunction.from_callable(g, lambda s: np.column_stack([np.exp(s), np.sin(5 * s)]))
    for rule in QuadratureRule:
        a = rl_integral(build_weights(0.37, g, rule), f).values
        b = rl_integral_direct(0.37, f, rule).values
        assert np.array_equal(a, b)


def test_weights_positive():
    table = build_weights(0.4, make_grid(1.0, 64, 2.0))
    dense = table.dense()
    assert np.all(dense[np.tril_indices(65)][1:] >= 0.0)


def test_errors():
    g = make_grid(1.0, 8)
    with pytest.raises(DomainError):
        build_weights(0.0, g)
    with pytest.raises(DomainError):
        build_weights(1.5, g)
    with pytest.raises(ShapeError):
        rl_integral(build_weights(0.5, g), GridFunction.constant(make_grid(1.0, 9), 1.0))
    with pytest.raises(DomainError):
        build_weights(0.5, make_grid(1.0, MAX_TABLE_NODES))


def test_caputo_l1_linear():
    g = make_grid(1.0, 256)
    t = GridFunction.from_callable(g, lambda s: s)
    d = caputo_l1(0.5, t)
    # D^{1/2} t = t^{1/2} / Gamma(3/2); exact for linear data
    assert d.values[-1, 0] == pytest.approx(2 / math.sqrt(math.pi), abs=1e-13)
    assert d.meta["extrapolated_nodes"] == (0,)
    assert d.values[0, 0] == d.values[1, 0]


def test_caputo_order_one_is_difference_quotient():
    g = make_grid(1.0, 10, 2.0)
    h = GridFunction.from_callable(g, lambda s: s**3)
    d = caputo_l1(1.0, h).values[1:, 0]
    np.testing.assert_allclose(d, np.diff(g.nodes**3) / np.diff(g.nodes), rtol=1e-14)


def test_caputo_constant_is_zero():
    g = make_grid(1.0, 40, 2.0)
    assert np.all(caputo_l1(0.3, GridFunction.constant(g, 7.0)).values == 0.0)


def test_holder_envelope_bounds_integral():
    g = make_grid(1.0, 2000)
    f = GridFunction.from_callable(g, lambda s: 1 + np.sin(9 * s))
    p, alpha = 3.0, 0.6
    norm = float(np.sum(((f.values[1:, 0] + f.values[:-1, 0]) / 2) ** p * np.diff(g.nodes)) ** (1 / p))
    J = rl_integral_direct(alpha, f).values[:, 0]
    env = np.array([holder_envelope(alpha, p, norm, t) for t in g.nodes])
    assert np.all(J <= env * (1 + 1e-6))
    assert holder_envelope(0.5, np.inf, 2.0, 4.0) == pytest.approx(2.0 * 2.0 / 0.5)
    with pytest.raises(DomainError):
        holder_envelope(0.5, 2.0, 1.0, 1.0)
