"""Global-in-time Picard iteration for multi-order Caputo systems.

The system  D^{alpha_j} phi_j = f_j(phi, t),  phi(0) = xi  is solved in its
integral form  phi = T(phi),  T(phi)_j = xi_j + J^{alpha_j} f_j(phi(.), .),
by iterating T on whole paths (waveform relaxation). A fractional Adams
predictor-corrector provides an independent time-stepping cross-check.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .contraction import (
    ContractionParams,
    ContractionReport,
    GateResult,
    find_n0,
    multiorder_M,
    validity_gate,
)
from .errors import DomainError, EvaluationError, FracPicardError, ShapeError
from .fracgrid import Grid, GridFunction, make_grid, sup_norm_diff, to_csv, trapezoid_lp
from .fracint import QuadratureRule, WeightTable, build_weights, caputo_l1
from .rhs import CaratheodoryRHS, nemytskii_eval, weight_lp_norm

DEFAULT_TOL = 1e-10
MAX_DEFAULT_GRADING = 4.0


class GateRejected(FracPicardError):
    """The order/exponent pair fails the validity gate; nothing was solved."""

    def __init__(self, gate: GateResult):
        super().__init__(str(gate))
        self.gate = gate


def default_grading(orders: Sequence[float]) -> float:
    """1/alpha_0 capped at 4: clusters nodes where the solution behaves like t^alpha_0."""
    return min(1.0 / min(orders), MAX_DEFAULT_GRADING)


@dataclass(frozen=True)
class ProblemSpec:
    """Orders, initial value, right-hand side and discretisation of one problem.

    ``r = None`` selects :func:`default_grading`; ``max_iter = None`` selects
    max(4 * predicted n0, 200).
    """

    orders: tuple
    xi: tuple
    rhs: CaratheodoryRHS
    T: float = 1.0
    N: int = 256
    p: float = 2.0
    r: Optional[float] = None
    tol: float = DEFAULT_TOL
    max_iter: Optional[int] = None
    rule: QuadratureRule = QuadratureRule.TRAPEZOID

    def __post_init__(self) -> None:
        object.__setattr__(self, "orders", tuple(float(a) for a in self.orders))
        object.__setattr__(self, "xi", tuple(float(x) for x in self.xi))
        object.__setattr__(self, "rule", QuadratureRule(self.rule))
        if not self.orders:
            raise DomainError("at least one order is required")
        if any(not 0 < a <= 1 for a in self.orders):
            raise DomainError(f"orders must lie in (0, 1], got {self.orders}")
        if not (len(self.orders) == len(self.xi) == self.rhs.dim):
            raise ShapeError(
                f"{len(self.orders)} orders, {len(self.xi)} initial values, rhs dimension {self.rhs.dim}"
            )
        if not self.T > 0:
            raise DomainError(f"T must be > 0, got {self.T}")
        if not self.tol > 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")

    @property
    def alpha0(self) -> float:
        return min(self.orders)

    @property
    def grading(self) -> float:
        return default_grading(self.orders) if self.r is None else float(self.r)

    def grid(self) -> Grid:
        return make_grid(self.T, self.N, self.grading)

    def tables(self, grid: Optional[Grid] = None, rule: Optional[QuadratureRule] = None) -> dict:
        grid = self.grid() if grid is None else grid
        rule = self.rule if rule is None else rule
        return {a: build_weights(a, grid, rule) for a in sorted(set(self.orders))}


def _order_columns(orders: Sequence[float]) -> dict:
    cols: dict = {}
    for j, a in enumerate(orders):
        cols.setdefault(a, []).append(j)
    return cols


def apply_T(problem: ProblemSpec, phi: GridFunction, tables: dict) -> GridFunction:
    """T(phi)_j = xi_j + J^{alpha_j} f_j(phi(.), .) with one weight table per distinct order."""
    if phi.dim != len(problem.orders):
        raise ShapeError(f"path dimension {phi.dim} != number of equations {len(problem.orders)}")
    F = nemytskii_eval(problem.rhs, phi).values
    out = np.empty_like(F)
    for a, cols in _order_columns(problem.orders).items():
        table: WeightTable = tables[a]
        if not table.grid.same_as(phi.grid):
            raise ShapeError("weight table grid differs from the path grid")
        out[:, cols] = _kernels.apply_packed(table.weights, np.ascontiguousarray(F[:, cols]))
    out += np.asarray(problem.xi)
    out[0] = problem.xi
    return GridFunction(phi.grid, out)


def predicted_contraction(problem: ProblemSpec, grid: Optional[Grid] = None) -> Optional[ContractionReport]:
    """n0 for the weight g = M l with rho = alpha_0, q = p; None without a Lipschitz weight.

    The classical case (all orders 1, p = 1) uses q = inf with g_norm = M sup l.
    """
    ell = problem.rhs.lipschitz_weight
    if ell is None:
        return None
    grid = problem.grid() if grid is None else grid
    M = multiorder_M(problem.orders, problem.T)
    q = problem.p
    if q == 1:
        q = math.inf
    g_norm = M * weight_lp_norm(ell, q, grid)
    if not math.isfinite(g_norm):
        return None
    return find_n0(ContractionParams(rho=problem.alpha0, q=q, g_norm=g_norm, T=problem.T))


@dataclass
class SolveReport:
    solution: GridFunction
    iterations: int
    diffs: list
    converged: bool
    integral_residual: float
    differential_residual: float
    gate: GateResult
    predicted_n0: Optional[int]
    contraction: Optional[ContractionReport] = None
    max_iter: int = 0
    notes: list = field(default_factory=list)

    def trace_csv(self) -> str:
        buf = io.StringIO(newline="")
        buf.write("k,diff\n")
        for k, d in enumerate(self.diffs, start=1):
            buf.write(f"{k},{float(d)!r}\n")
        return buf.getvalue()

    def solution_csv(self) -> str:
        return to_csv(self.solution)

    def summary(self) -> str:
        lines = [
            f"gate = {self.gate.status.value}",
            f"gate_message = {self.gate.message}",
            f"predicted_n0 = {self.predicted_n0 if self.predicted_n0 is not None else 'none'}",
            f"iterations = {self.iterations}",
            f"max_iter = {self.max_iter}",
            f"converged = {str(self.converged).lower()}",
            f"final_diff = {float(self.diffs[-1]) if self.diffs else 0.0!r}",
            f"integral_residual = {self.integral_residual!r}",
            f"differential_residual = {self.differential_residual!r}",
        ]
        final = self.solution.values[-1]
        lines.append("final_value = " + ",".join(repr(float(v)) for v in final))
        lines.extend(f"note = {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def _excluded_nodes(problem: ProblemSpec, grid: Grid) -> np.ndarray:
    mask = np.zeros(grid.nodes.size, dtype=bool)
    mask[0] = True
    with np.errstate(all="ignore"):
        for weight in (problem.rhs.growth_weight, problem.rhs.lipschitz_weight):
            if weight is not None:
                mask |= ~np.isfinite(np.asarray(weight(grid.nodes), dtype=float))
    return mask


def differential_residual(
    problem: ProblemSpec, candidate: GridFunction, exclude: Sequence[int] = ()
) -> float:
    """Discrete L^p norm of D^{alpha_j} phi_j - f_j(phi, .) stacked over j.

    Node 0 and nodes where a witness weight is singular are zeroed, as are
    any indices in ``exclude``.
    """
    F = nemytskii_eval(problem.rhs, candidate).values
    D = np.empty_like(F)
    for a, cols in _order_columns(problem.orders).items():
        sub = GridFunction(candidate.grid, candidate.values[:, cols])
        D[:, cols] = caputo_l1(a, sub).values
    mags = np.linalg.norm(D - F, axis=1)
    mask = _excluded_nodes(problem, candidate.grid)
    mask[list(exclude)] = True
    mags[mask] = 0.0
    if math.isinf(problem.p):
        return float(np.max(mags))
    return trapezoid_lp(candidate.grid.nodes, mags, problem.p)


def residual_check(
    problem: ProblemSpec, candidate: GridFunction, tables: Optional[dict] = None,
    exclude: Sequence[int] = (),
) -> tuple[float, float]:
    """(integral residual, differential residual) of a candidate path."""
    if tables is None:
        tables = problem.tables(candidate.grid)
    integral = sup_norm_diff(candidate, apply_T(problem, candidate, tables))
    return integral, differential_residual(problem, candidate, exclude)


def picard_solve(
    problem: ProblemSpec,
    initial: Optional[GridFunction] = None,
    threads: Optional[int] = None,
    tables: Optional[dict] = None,
) -> SolveReport:
    """Iterate phi^{k+1} = T(phi^k) from phi^0 = xi (or ``initial``).

    Stops once the successive difference is <= tol and the integral residual
    is <= 10 tol, or after max_iter iterations (then ``converged`` is False).

    Raises
    ------
    GateRejected
        If the orders and p fail :func:`validity_gate`.
    """
    gate = validity_gate(problem.orders, problem.p)
    if not gate.ok:
        raise GateRejected(gate)
    if threads is not None:
        _kernels.set_threads(threads)
    grid = problem.grid() if tables is None else next(iter(tables.values())).grid
    notes = []
    if problem.p > problem.rhs.p:
        notes.append(f"rhs witnesses are only claimed in L^{problem.rhs.p}, below p = {problem.p}")
    report = predicted_contraction(problem, grid)
    n0 = report.n0 if report is not None else None
    max_iter = problem.max_iter
    if max_iter is None:
        max_iter = max(4 * n0, 200) if n0 is not None else 200
    if tables is None:
        tables = problem.tables(grid)

    cur = GridFunction.constant(grid, problem.xi) if initial is None else initial
    if not cur.grid.same_as(grid) or cur.dim != len(problem.xi):
        raise ShapeError("initial iterate must live on the problem grid with matching dimension")
    nxt = apply_T(problem, cur, tables)
    diffs: list = []
    converged = False
    residual = math.nan
    while len(diffs) < max_iter:
        diff = sup_norm_diff(nxt, cur)
        diffs.append(diff)
        after = apply_T(problem, nxt, tables)
        residual = sup_norm_diff(after, nxt)
        if diff <= problem.tol and residual <= 10 * problem.tol:
            converged = True
            break
        cur, nxt = nxt, after
    if not converged:
        notes.append(f"max_iter = {max_iter} reached before tol = {problem.tol}")
    return SolveReport(
        solution=nxt,
        iterations=len(diffs),
        diffs=diffs,
        converged=converged,
        integral_residual=residual,
        differential_residual=differential_residual(problem, nxt),
        gate=gate,
        predicted_n0=n0,
        contraction=report,
        max_iter=max_iter,
        notes=notes,
    )


def adams_pc_solve(problem: ProblemSpec, threads: Optional[int] = None) -> GridFunction:
    """Fractional Adams predictor-corrector on the problem grid.

    Each step predicts with rectangle (left-sample) weights and corrects once
    with trapezoid weights; every equation uses its own order.
    """
    gate = validity_gate(problem.orders, problem.p)
    if not gate.ok:
        raise GateRejected(gate)
    if threads is not None:
        _kernels.set_threads(threads)
    grid = problem.grid()
    t = grid.nodes
    rect = problem.tables(grid, QuadratureRule.RECTANGLE)
    trap = problem.tables(grid, QuadratureRule.TRAPEZOID)
    n = len(problem.orders)
    xi = np.asarray(problem.xi)
    rect_w = [rect[a].weights for a in problem.orders]
    trap_w = [trap[a].weights for a in problem.orders]
    diag = [np.array([trap[a].row(i)[i] for i in range(grid.N + 1)]) for a in problem.orders]
    rhs = problem.rhs
    y = np.zeros((grid.N + 1, n))
    F = np.zeros((grid.N + 1, n))
    y[0] = xi
    F[0] = rhs(xi, t[0])
    pred = np.empty(n)
    for i in range(1, grid.N + 1):
        for j in range(n):
            pred[j] = xi[j] + _kernels.row_dot(rect_w[j], i, F, j, i)
        fp = rhs(pred, t[i])
        for j in range(n):
            y[i, j] = xi[j] + _kernels.row_dot(trap_w[j], i, F, j, i) + diag[j][i] * fp[j]
        F[i] = rhs(y[i], t[i])
        if not np.all(np.isfinite(F[i])):
            raise EvaluationError(f"rhs returned a non-finite value at node {i}", node=i)
    return GridFunction(grid, y)
