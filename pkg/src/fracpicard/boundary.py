"""Failure-mode demonstrators: nonexistence at alpha = 1/p, nonuniqueness without a Lipschitz bound.

Nonexistence: sigma(s) = (t0 - s)^(-1/p) (c - ln(t0 - s))^(-lam) for s < t0
(zero afterwards) is p-integrable for lam > 1/p, but

    J^(1/p) sigma(t0) = (1/Gamma(1/p)) int_0^t0 w^(-1) (c - ln w)^(-lam) dw

diverges for lam <= 1. Placing the singularity in the interior makes it meet
the kernel's own endpoint singularity. The right-hand side f(x, t) = x + sigma(t)
then admits no continuous solution at order 1/p.

Nonuniqueness: x' = 2 sqrt(x) on [0, 1/2], x' = sqrt(x) on (1/2, 1], x(0) = 0
is solved by 0 and by t^2 on [0, 1/2], ((t + 1/2)/2)^2 on (1/2, 1].
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError
from .fracgrid import GridFunction, make_grid_toward, sup_norm_diff
from .fracint import _kernels, _inv_gamma, _check_alpha
from .rhs import catalog

# grading of the demo grids toward t0; keeps the smallest cell (~t0 N^-3)
# well above double spacing at t0 for N <= 2^14
HL_GRADING = 3.0


@dataclass(frozen=True)
class HLSpec:
    p: float = 2.0
    lam: float = 1.0
    t0: float = 0.5
    shift: float = 1.0
    T: float = 1.0

    def __post_init__(self) -> None:
        if not self.p > 1:
            raise DomainError(f"p must be > 1, got {self.p}")
        if not 1.0 / self.p < self.lam <= 1.0:
            raise DomainError(
                f"lam must lie in (1/p, 1] = ({1.0 / self.p}, 1], got {self.lam}: "
                "otherwise sigma is not in L^p or J^(1/p) sigma stays bounded"
            )
        if not 0 < self.t0 <= self.T:
            raise DomainError(f"need 0 < t0 <= T, got t0={self.t0}, T={self.T}")
        if not self.shift >= 1:
            raise DomainError(f"shift must be >= 1, got {self.shift}")
        if not self.shift - math.log(self.t0) > 1:
            raise DomainError(
                f"shift - ln(t0) = {self.shift - math.log(self.t0)} must exceed 1"
            )


def hl_sigma(spec: HLSpec) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised sigma(s) for ``spec``; zero for s >= t0."""
    p, lam, t0, c = spec.p, spec.lam, spec.t0, spec.shift

    def sigma(s):
        s = np.asarray(s, dtype=float)
        w = t0 - s
        out = np.zeros_like(s)
        pos = w > 0
        wp = w[pos]
        out[pos] = wp ** (-1.0 / p) * (c - np.log(wp)) ** (-lam)
        return out

    return sigma


def sigma_lp_norm_exact(spec: HLSpec, a: float = 0.0, b: float | None = None) -> float:
    """(int_a^b |sigma|^p)^(1/p) from the antiderivative of w^-1 (c - ln w)^(-p lam)."""
    b = spec.T if b is None else b
    return _sigma_power_integral(spec, a, b) ** (1.0 / spec.p)


def _sigma_power_integral(spec: HLSpec, a, b):
    # int_a^b |sigma(s)|^p ds with u = c - ln(t0 - s): int u^(-p lam) du
    e = spec.p * spec.lam - 1.0
    a = np.minimum(np.asarray(a, dtype=float), spec.t0)
    b = np.minimum(np.asarray(b, dtype=float), spec.t0)

    def prim(s):
        w = spec.t0 - s
        with np.errstate(divide="ignore", invalid="ignore"):
            u = spec.shift - np.log(w)
        return np.where(w > 0, -(u ** (-e)) / e, 0.0)

    # F(s) = -(c - ln(t0 - s))^(-e)/e is increasing, F(t0) = 0
    return prim(b) - prim(a)


class HLRow(NamedTuple):
    N: int
    sup_J: float
    sigma_lp_norm: float
    sigma_lp_norm_midpoint: float
    argmax_t: float


@dataclass
class HLTable:
    spec: HLSpec
    order: float
    rows: list

    def sup_column(self) -> np.ndarray:
        return np.array([r.sup_J for r in self.rows])

    def norm_column(self) -> np.ndarray:
        return np.array([r.sigma_lp_norm for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        buf.write("N,sup_J,sigma_lp_norm\n")
        for r in self.rows:
            buf.write(f"{r.N},{r.sup_J!r},{r.sigma_lp_norm!r}\n")
        return buf.getvalue()


def unboundedness_demo(
    spec: HLSpec, levels: Sequence[int], order: float | None = None, grading: float = HL_GRADING
) -> HLTable:
    """sup over nodes of J^order sigma for each grid size N (order defaults to 1/p).

    Grids are graded toward t0. sigma is taken piecewise constant with its
    value at each cell midpoint, so the singular node t0 is never sampled,
    and integrated exactly against the kernel. ``sigma_lp_norm`` integrates
    |sigma|^p exactly over the cells (closed-form antiderivative);
    ``sigma_lp_norm_midpoint`` is the norm of the midpoint samples.
    """
    levels = [int(n) for n in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise DomainError(f"levels must be strictly increasing, got {levels}")
    order = 1.0 / spec.p if order is None else _check_alpha(order)
    sigma = hl_sigma(spec)
    rows = []
    for N in levels:
        grid = make_grid_toward(spec.T, N, spec.t0, grading)
        t = grid.nodes
        mid = 0.5 * (t[1:] + t[:-1])
        sig = sigma(mid)
        # rectangle weights pair node k with cell [t_k, t_k+1]
        samples = np.append(sig, 0.0)[:, None]
        J = _kernels.apply_direct(t, order, _kernels.RECTANGLE, _inv_gamma(order), samples)[:, 0]
        k = int(np.argmax(J))
        h = np.diff(t)
        exact = float(np.sum(_sigma_power_integral(spec, t[:-1], t[1:]))) ** (1.0 / spec.p)
        midpoint = float(np.sum(np.abs(sig) ** spec.p * h)) ** (1.0 / spec.p)
        rows.append(HLRow(N, float(J[k]), exact, midpoint, float(t[k])))
    return HLTable(spec, order, rows)


def phi1_corrected(t):
    """Nonzero solution of the switching sqrt problem, continuous at t = 1/2."""
    t = np.asarray(t, dtype=float)
    return np.where(t <= 0.5, t**2, ((t + 0.5) / 2.0) ** 2)


class NonuniquenessResult(NamedTuple):
    residual_phi1: float
    residual_phi2: float
    separation: float


def nonuniqueness_demo(N: int) -> NonuniquenessResult:
    """Differential residuals of both candidate solutions with alpha = 1, and their distance.

    Residuals use p = 1 (the classical case) on a uniform grid of N cells and
    skip node 0 and the switching node t = 1/2.
    """
    from .picard import ProblemSpec, differential_residual

    if N < 16:
        raise DomainError(f"N must be >= 16, got {N}")
    problem = ProblemSpec(
        orders=(1.0,), xi=(0.0,), rhs=catalog("intro_nonuniqueness"), T=1.0, N=N, p=1.0, r=1.0
    )
    grid = problem.grid()
    breakpoints = np.nonzero(grid.nodes == 0.5)[0].tolist()
    phi1 = GridFunction(grid, phi1_corrected(grid.nodes))
    phi2 = GridFunction.constant(grid, 0.0)
    r1 = differential_residual(problem, phi1, exclude=breakpoints)
    r2 = differential_residual(problem, phi2, exclude=breakpoints)
    return NonuniquenessResult(r1, r2, sup_norm_diff(phi1, phi2))


def nonuniqueness_table(levels: Sequence[int]) -> str:
    buf = io.StringIO(newline="")
    buf.write("N,res1,res2,separation\n")
    for N in levels:
        r = nonuniqueness_demo(int(N))
        buf.write(f"{int(N)},{r.residual_phi1!r},{r.residual_phi2!r},{r.separation!r}\n")
    return buf.getvalue()
