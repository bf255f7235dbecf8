"""numba kernels for causal product-integration convolutions.

Row i of a weight table holds w[i, 0..i] in packed lower-triangular storage
at offset i*(i+1)/2. Every row is summed independently in increasing k with
Neumaier compensation, so results do not depend on the thread count.
"""

from __future__ import annotations

import math

import numba
import numpy as np
from numba import njit, prange

# TBB in this image is too old; pick a layer explicitly to skip the probe.
if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER = "workqueue"

RECTANGLE = 0
TRAPEZOID = 1

_SERIES_CUTOFF = 0.25


@njit(cache=True)
def _one_minus_pow(x, e):
    # 1 - (1 - x)^e without cancellation for small x
    if x >= 1.0:
        return 1.0
    return -math.expm1(e * math.log1p(-x))


@njit(cache=True)
def _first_moment(x, alpha):
    # int_0^x (1 - v)^(alpha - 1) v dv
    if x < _SERIES_CUTOFF:
        c = 1.0
        xp = x * x
        total = xp / 2.0
        j = 0
        while True:
            c *= (j + 1.0 - alpha) / (j + 1.0)
            xp *= x
            term = c * xp / (j + 3.0)
            total += term
            j += 1
            if abs(term) <= 1e-18 * total or j > 200:
                break
        return total
    return _one_minus_pow(x, alpha) / alpha - _one_minus_pow(x, alpha + 1.0) / (alpha + 1.0)


@njit(cache=True)
def cell_moments(a, h, alpha):
    """Kernel moments of one cell [t_k, t_k + h] seen from t_i = t_k + a.

    Returns (I0, A): I0 = int (t_i - s)^(alpha-1) ds over the cell and A the
    part of it carried by the hat function of the cell's right node.
    """
    x = h / a
    if x > 1.0:
        x = 1.0
    a_pow = a ** alpha
    i0 = a_pow * _one_minus_pow(x, alpha) / alpha
    right = a_pow * _first_moment(x, alpha) / x
    return i0, right


@njit(cache=True)
def fill_row(nodes, i, alpha, rule, scale, out):
    """Write weights w[i, 0..i] into out[0..i]."""
    ti = nodes[i]
    for k in range(i + 1):
        out[k] = 0.0
    for k in range(i):
        a = ti - nodes[k]
        h = nodes[k + 1] - nodes[k]
        i0, right = cell_moments(a, h, alpha)
        if rule == RECTANGLE:
            out[k] += i0 * scale
        else:
            out[k] += (i0 - right) * scale
            out[k + 1] += right * scale


@njit(cache=True)
def _neumaier_dot(w, off, v, col, count):
    s = 0.0
    c = 0.0
    for k in range(count):
        y = w[off + k] * v[k, col]
        t = s + y
        if abs(s) >= abs(y):
            c += (s - t) + y
        else:
            c += (y - t) + s
        s = t
    return s + c


@njit(parallel=True, cache=True)
def build_packed(nodes, alpha, rule, scale):
    n_nodes = nodes.size
    total = n_nodes * (n_nodes + 1) // 2
    packed = np.zeros(total)
    for i in prange(1, n_nodes):
        off = i * (i + 1) // 2
        fill_row(nodes, i, alpha, rule, scale, packed[off:off + i + 1])
    return packed


@njit(parallel=True, cache=True)
def apply_packed(packed, values):
    n_nodes, dim = values.shape
    out = np.zeros((n_nodes, dim))
    for i in prange(1, n_nodes):
        off = i * (i + 1) // 2
        for col in range(dim):
            out[i, col] = _neumaier_dot(packed, off, values, col, i + 1)
    return out


@njit(parallel=True, cache=True)
def apply_direct(nodes, alpha, rule, scale, values):
    """Same as build_packed + apply_packed without storing the table."""
    n_nodes, dim = values.shape
    out = np.zeros((n_nodes, dim))
    for i in prange(1, n_nodes):
        row = np.empty(i + 1)
        fill_row(nodes, i, alpha, rule, scale, row)
        for col in range(dim):
            out[i, col] = _neumaier_dot(row, 0, values, col, i + 1)
    return out


@njit(cache=True)
def row_dot(packed, i, values, col, count):
    """Compensated sum_{k < count} w[i, k] * values[k, col]."""
    return _neumaier_dot(packed, i * (i + 1) // 2, values, col, count)


def set_threads(n: int) -> int:
    """Set the numba worker count, capped at NUMBA_NUM_THREADS. Returns the count used."""
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


__all__ = [
    "RECTANGLE",
    "TRAPEZOID",
    "apply_direct",
    "apply_packed",
    "build_packed",
    "cell_moments",
    "fill_row",
    "row_dot",
    "set_threads",
]


def _warmup() -> None:  # pragma: no cover - exercised implicitly
    nodes = np.linspace(0.0, 1.0, 3)
    vals = np.ones((3, 1))
    apply_packed(build_packed(nodes, 0.5, TRAPEZOID, 1.0), vals)
    apply_direct(nodes, 0.5, RECTANGLE, 1.0, vals)
    row_dot(build_packed(nodes, 0.5, RECTANGLE, 1.0), 2, vals, 0, 2)
