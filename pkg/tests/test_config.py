import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracpicard.config import (
    BoundaryConfig,
    Config,
    ContractionConfig,
    OutputConfig,
    ProblemConfig,
    dump_config,
    parse_config,
    with_threads,
)
from fracpicard.errors import ConfigError

SAMPLE = """\
# multi-order oscillator
[problem]
orders = 0.5, 1
initial = 1, 0
rhs = linear_system
rhs.A = 0, 1; -1, 0
N = 128
p = 4
r = auto

[output]
solution = sol.csv
"""


def test_parse_sample():
    cfg = parse_config(SAMPLE)
    pc = cfg.problem
    assert pc.orders == (0.5, 1.0) and pc.initial == (1.0, 0.0)
    assert pc.rhs_params == {"A": [[0.0, 1.0], [-1.0, 0.0]]}
    assert pc.r is None and pc.N == 128 and pc.p == 4.0
    assert cfg.output.solution == "sol.csv" and cfg.output.trace == "trace.csv"
    problem = pc.to_problem()
    assert problem.grading == 2.0 and problem.rhs.dim == 2


@pytest.mark.parametrize(
    "text, line, field",
    [
        ("[problem]\norders = 0.5\ninitial = 1\nrhs = zero\nfoo = 1\n", 5, "foo"),
        ("[nope]\n", 1, None),
        ("orders = 1\n", 1, None),
        ("[problem]\norders = 0.5, x\n", 2, "orders"),
        ("[problem]\norders = 0.5\ninitial = 1\nrhs = zero\nN = 3.5\n", 5, "N"),
        ("[problem]\norders = 0.5\ninitial = 1\nrhs = nosuch\n", 4, "rhs"),
        ("[problem]\norders = 0.5\ninitial = 1\nrhs = linear_scalar\nrhs.mu = 1\n", 5, "rhs.mu"),
        ("[problem]\norders = 0.5\norders = 0.6\n", 3, "orders"),
        ("[boundary]\nmode = circle\n", 2, "mode"),
        ("[problem]\norders = 0.5\ninitial = 1\nrhs = zero\nrule = simpson\n", 5, "rule"),
    ],
)
def test_errors_are_addressed(text, line, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line
    assert info.value.field == field
    assert f"line {line}" in str(info.value)


def test_missing_required_key():
    with pytest.raises(ConfigError) as info:
        parse_config("[problem]\norders = 0.5\n")
    assert info.value.field == "initial"


def test_dimension_mismatch_is_config_error():
    with pytest.raises(ConfigError):
        parse_config("[problem]\norders = 0.5, 1\ninitial = 1\nrhs = linear_scalar\nrhs.lam = 1\n")


def _same_problem(a, b):
    assert (a.orders, a.xi, a.T, a.N, a.p, a.r, a.tol, a.max_iter, a.rule) == (
        b.orders, b.xi, b.T, b.N, b.p, b.r, b.tol, b.max_iter, b.rule)
    assert (a.rhs.name, a.rhs.params) == (b.rhs.name, b.rhs.params)


def test_roundtrip_sample():
    cfg = parse_config(SAMPLE)
    again = parse_config(dump_config(cfg))
    assert again == cfg
    _same_problem(cfg.problem.to_problem(), again.problem.to_problem())


def test_roundtrip_all_sections():
    cfg = Config(
        problem=ProblemConfig(orders=(1.0,), initial=(2.0,), rhs="linear_system",
                              rhs_params={"A": [[-1.0]], "forcing": [0.5]}, p=1.0, max_iter=9, threads=2),
        contraction=ContractionConfig(rho=0.5, q=math.inf, g_norm=1.5),
        boundary=BoundaryConfig(mode="nonunique", levels=(16, 32)),
        output=OutputConfig(summary="s.txt"),
    )
    assert parse_config(dump_config(cfg)) == cfg


orders = st.lists(st.floats(0.26, 1.0), min_size=1, max_size=3)


@settings(max_examples=60, deadline=None)
@given(
    orders,
    st.floats(-1e6, 1e6),
    st.floats(0.01, 100.0),
    st.integers(1, 10**5),
    st.one_of(st.none(), st.floats(1.0, 5.0)),
    st.floats(1e-14, 1e-2),
    st.sampled_from(["rectangle", "trapezoid"]),
    st.one_of(st.none(), st.integers(1, 64)),
)
def test_roundtrip_property(ords, lam, T, N, r, tol, rule, threads):
    n = len(ords)
    pc = ProblemConfig(
        orders=tuple(ords), initial=tuple(float(i) for i in range(n)), rhs="linear_system",
        rhs_params={"A": [[lam] * n for _ in range(n)], "forcing": [lam] * n},
        T=T, N=N, r=r, tol=tol, p=4.0, rule=rule, threads=threads,
    )
    cfg = Config(problem=pc)
    again = parse_config(dump_config(cfg))
    assert again == cfg
    _same_problem(pc.to_problem(), again.problem.to_problem())


def test_with_threads():
    cfg = with_threads(parse_config(SAMPLE), 4)
    assert cfg.problem.threads == 4


def test_inline_comments():
    cfg = parse_config("[problem]  # main block\norders = 0.5  # order\ninitial = 1\nrhs = zero\n")
    assert cfg.problem.orders == (0.5,)
