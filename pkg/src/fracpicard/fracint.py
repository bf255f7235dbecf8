"""Riemann-Liouville fractional integral and L1 Caputo derivative on grids.

Both transforms use product integration: the density is replaced by a
piecewise-constant or piecewise-linear interpolant and integrated exactly
against the kernel (t - s)^(alpha - 1) / Gamma(alpha). On a cell of length h
at distance a from t_i the zeroth moment is (a^alpha - (a - h)^alpha) / alpha.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, ShapeError
from .fracgrid import Grid, GridFunction
from .specfun import log_gamma

# Above this many nodes build_weights refuses to store the table; use rl_integral_direct.
MAX_TABLE_NODES = 2**13 + 1


class QuadratureRule(str, enum.Enum):
    RECTANGLE = "rectangle"  # piecewise-constant density, left sample
    TRAPEZOID = "trapezoid"  # piecewise-linear density

    @property
    def code(self) -> int:
        return _kernels.RECTANGLE if self is QuadratureRule.RECTANGLE else _kernels.TRAPEZOID


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0 < alpha <= 1:
        raise DomainError(f"fractional order must lie in (0, 1], got {alpha}")
    return alpha


def _inv_gamma(alpha: float) -> float:
    return math.exp(-log_gamma(alpha))


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Causal weights with (J^alpha g)(t_i) ~ sum_{k<=i} w[i, k] g(t_k).

    Rows are stored packed: row i occupies ``weights[i*(i+1)//2 : ...+i+1]``.
    """

    alpha: float
    grid: Grid
    rule: QuadratureRule
    weights: np.ndarray

    def row(self, i: int) -> np.ndarray:
        if not 0 <= i <= self.grid.N:
            raise IndexError(i)
        off = i * (i + 1) // 2
        return self.weights[off : off + i + 1]

    def dense(self) -> np.ndarray:
        """Full (N+1) x (N+1) lower-triangular matrix; for inspection and tests."""
        n = self.grid.N + 1
        out = np.zeros((n, n))
        for i in range(n):
            out[i, : i + 1] = self.row(i)
        return out


def build_weights(alpha: float, grid: Grid, rule: QuadratureRule | str = QuadratureRule.TRAPEZOID) -> WeightTable:
    """Product-integration weights for J^alpha on ``grid``."""
    alpha = _check_alpha(alpha)
    rule = QuadratureRule(rule)
    if grid.nodes.size > MAX_TABLE_NODES:
        raise DomainError(
            f"grid has {grid.nodes.size} nodes; tables are limited to {MAX_TABLE_NODES} "
            "(use rl_integral_direct)"
        )
    packed = _kernels.build_packed(grid.nodes, alpha, rule.code, _inv_gamma(alpha))
    packed.setflags(write=False)
    return WeightTable(alpha, grid, rule, packed)


def rl_integral(table: WeightTable, g: GridFunction) -> GridFunction:
    """Apply the table componentwise; node 0 of the result is zero."""
    if not table.grid.same_as(g.grid):
        raise ShapeError("weight table and grid function use different grids")
    out = _kernels.apply_packed(table.weights, np.ascontiguousarray(g.values))
    return GridFunction(g.grid, out)


def rl_integral_direct(
    alpha: float, g: GridFunction, rule: QuadratureRule | str = QuadratureRule.TRAPEZOID
) -> GridFunction:
    """One-shot J^alpha g computing weights on the fly (no O(N^2) storage).

    Bit-identical to ``rl_integral(build_weights(alpha, g.grid, rule), g)``.
    """
    alpha = _check_alpha(alpha)
    rule = QuadratureRule(rule)
    out = _kernels.apply_direct(
        g.grid.nodes, alpha, rule.code, _inv_gamma(alpha), np.ascontiguousarray(g.values)
    )
    return GridFunction(g.grid, out)


def caputo_l1(alpha: float, g: GridFunction) -> GridFunction:
    """L1 approximation of the Caputo derivative of order alpha.

    g is treated as piecewise linear, so on each cell its derivative is the
    slope s_k and D^alpha g(t_i) = sum_k s_k (J^{1-alpha} 1_cell)(t_i). For
    alpha = 1 this is the backward difference quotient. Node 0 carries no
    value of its own; it is copied from node 1 and listed in
    ``meta["extrapolated_nodes"]``.
    """
    alpha = _check_alpha(alpha)
    t = g.grid.nodes
    slopes = np.diff(g.values, axis=0) / np.diff(t)[:, None]
    out = np.empty_like(g.values)
    if alpha == 1.0:
        out[1:] = slopes
    else:
        # J^{1-alpha} of the piecewise-constant slope with left samples
        padded = np.vstack([slopes, np.zeros((1, g.dim))])
        beta = 1.0 - alpha
        conv = _kernels.apply_direct(t, beta, _kernels.RECTANGLE, _inv_gamma(beta), padded)
        out[1:] = conv[1:]
    out[0] = out[1]
    return GridFunction(g.grid, out, meta={"extrapolated_nodes": (0,)})


def holder_envelope(alpha: float, p: float, g_lp_norm: float, t: float) -> float:
    """Hoelder bound |J^alpha g(t)| <= t^(alpha - 1/p) ||g||_p / c,
    c = ((alpha p - 1) / (p - 1))^((p - 1) / p)."""
    if not p > 1:
        raise DomainError(f"envelope needs p > 1, got {p}")
    if not alpha > 1.0 / p:
        raise DomainError(
            f"envelope undefined for alpha = {alpha} <= 1/p = {1.0 / p}: "
            "J^alpha need not map L^p into bounded functions"
        )
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if math.isinf(p):
        c = alpha
    else:
        c = ((alpha * p - 1.0) / (p - 1.0)) ** ((p - 1.0) / p)
    # no 1/Gamma(alpha) factor: Gamma >= 1 on (0, 1], so the bound stays valid
    exponent = alpha - (0.0 if math.isinf(p) else 1.0 / p)
    return t**exponent * g_lp_norm / c
