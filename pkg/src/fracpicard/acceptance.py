"""Acceptance suite: nine end-to-end checks with fixed tolerances.

Each ``criterion_k`` returns a :class:`CriterionResult`; ``run_all`` runs them
in order. Used by ``fracpicard selftest`` and by the test suite.
"""

from __future__ import annotations

import math
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .boundary import HLSpec, nonuniqueness_demo, unboundedness_demo
from .contraction import (
    ContractionParams,
    GateStatus,
    find_n0,
    log_c_n,
    log_ratio,
    validity_gate,
    wendel_terms,
)
from .fracgrid import Grid, GridFunction, make_grid, sup_norm_diff
from .fracint import QuadratureRule, build_weights, caputo_l1, rl_integral, rl_integral_direct
from .picard import ProblemSpec, adams_pc_solve, picard_solve
from .rhs import catalog, check_lipschitz
from .specfun import log_gamma, mittag_leffler_many, wendel_check

CONVERGENCE_LEVELS = (2**8, 2**9, 2**10, 2**11)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number} ({self.name}, {self.seconds:.1f} s): {self.detail}"


def _strictly_decreasing(xs) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:]))


def _fmt(xs) -> str:
    return "[" + ", ".join(f"{x:.3e}" for x in xs) + "]"


def _timed(number: int, name: str, limit: float | None, body: Callable[[], tuple[bool, str]]) -> CriterionResult:
    start = time.perf_counter()
    ok, detail = body()
    elapsed = time.perf_counter() - start
    if limit is not None:
        within = elapsed < limit
        detail += f"; runtime {elapsed:.1f} s vs limit {limit:.0f} s"
        ok = ok and within
    return CriterionResult(number, name, bool(ok), detail, elapsed)


# ---------------------------------------------------------------------------


def criterion_1(seed: int = 0) -> CriterionResult:
    """Constants are integrated exactly on random grids."""

    def body():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for k in range(50):
            alpha = float(rng.uniform(0.01, 1.0))
            N = int(rng.integers(4, 513))
            if k % 2:
                # random nonuniform grid: sorted uniform draws
                inner = np.sort(rng.uniform(0.0, 1.0, N - 1))
                nodes = np.concatenate([[0.0], inner, [1.0]]) * float(rng.uniform(0.5, 3.0))
                if np.any(np.diff(nodes) <= 0):
                    nodes = np.linspace(0.0, nodes[-1], N + 1)
                grid = Grid(nodes, kind="graded")
            else:
                grid = make_grid(float(rng.uniform(0.5, 3.0)), N, float(rng.uniform(1.0, 4.0)))
            rule = QuadratureRule.TRAPEZOID if k % 4 < 2 else QuadratureRule.RECTANGLE
            one = GridFunction.constant(grid, 1.0)
            J = rl_integral(build_weights(alpha, grid, rule), one).values[:, 0]
            exact = grid.nodes**alpha * math.exp(-log_gamma(alpha + 1.0))
            worst = max(worst, float(np.max(np.abs(J - exact))))
        return worst <= 1e-12, f"max abs error {worst:.2e} over 50 draws (tol 1e-12)"

    return _timed(1, "quadrature exactness", 5.0, body)


def criterion_2(seed: int = 0) -> CriterionResult:
    """Semigroup J^0.4 J^0.6 = J^1 and J^a D^a h = h - h(0) under refinement."""

    def body():
        series = {}
        for N in CONVERGENCE_LEVELS:
            grid = make_grid(1.0, N)
            g = GridFunction.from_callable(grid, np.cos)
            composed = rl_integral_direct(0.4, rl_integral_direct(0.6, g))
            series.setdefault("semigroup", []).append(sup_norm_diff(composed, rl_integral_direct(1.0, g)))
            h = GridFunction.from_callable(grid, lambda t: t**2)
            for a in (0.25, 0.5, 0.75):
                back = rl_integral_direct(a, caputo_l1(a, h))
                series.setdefault(f"inversion a={a}", []).append(sup_norm_diff(back, h))
        ok = all(_strictly_decreasing(e) and e[-1] <= 1e-3 for e in series.values())
        detail = "; ".join(f"{k} {_fmt(e)}" for k, e in series.items())
        return ok, detail

    return _timed(2, "semigroup and inversion", 30.0, body)


def ml_problem(N: int) -> ProblemSpec:
    return ProblemSpec(orders=(0.5,), xi=(1.0,), rhs=catalog("linear_scalar", lam=-1.0), T=1.0, N=N, p=4.0)


def criterion_3(seed: int = 0) -> CriterionResult:
    """D^0.5 u = -u against E_0.5(-t^0.5)."""

    def body():
        errors = []
        for N in (2**8, 2**9, 2**10, 2**11, 2**12):
            problem = ml_problem(N)
            report = picard_solve(problem)
            t = report.solution.t
            exact = mittag_leffler_many(0.5, 1.0, -np.sqrt(t))
            errors.append(float(np.max(np.abs(report.solution.values[:, 0] - exact))))
        ok = _strictly_decreasing(errors) and errors[-1] <= 1e-3
        return ok, f"sup errors N=2^8..2^12 {_fmt(errors)} (final tol 1e-3)"

    return _timed(3, "Mittag-Leffler oracle", 60.0, body)


def criterion_4(seed: int = 0) -> CriterionResult:
    """alpha = 1, f = x, xi = 1 gives e^t."""

    def body():
        problem = ProblemSpec(
            orders=(1.0,), xi=(1.0,), rhs=catalog("linear_scalar", lam=1.0), T=1.0, N=2**12, p=1.0
        )
        report = picard_solve(problem)
        err = float(np.max(np.abs(report.solution.values[:, 0] - np.exp(report.solution.t))))
        return report.converged and err <= 1e-6, f"sup error {err:.3e} at N=2^12 (tol 1e-6)"

    return _timed(4, "classical embedding", None, body)


def criterion_5(seed: int = 0) -> CriterionResult:
    """Contraction constants: ratio consistency, Wendel sandwich, minimal n0, factorial case."""

    def body():
        rng = np.random.default_rng(seed)
        ns = np.arange(1, 1001, dtype=float)
        worst_rel = 0.0
        wendel_ok = True
        minimal_ok = True
        for k in range(100):
            rho = float(rng.uniform(0.05, 1.0))
            q = math.inf if k % 5 == 0 else float(1.0 / rho * (1.0 + rng.uniform(0.05, 4.0)))
            params = ContractionParams(rho, q, float(rng.uniform(0.01, 5.0)), float(rng.uniform(0.1, 3.0)))
            lc = np.asarray(log_c_n(params, ns))
            lr = np.asarray(log_ratio(params, ns[:-1]))
            rel = np.abs(np.expm1((lc[1:] - lc[:-1]) - lr))
            worst_rel = max(worst_rel, float(np.max(rel)))
            B, bound = wendel_terms(params.beta, ns)
            wendel_ok &= bool(np.all(B <= bound * (1 + 1e-12)))
            for x in rng.uniform(0.5, 1e4, 5):
                lo, mid, hi = wendel_check(float(x), params.beta)
                wendel_ok &= lo <= mid * (1 + 1e-14) and mid <= hi * (1 + 1e-14)
            report = find_n0(params)
            n0 = report.n0
            if n0 is None:
                minimal_ok = False
                continue
            minimal_ok &= log_c_n(params, n0) < 0 and (n0 == 1 or log_c_n(params, n0 - 1) >= 0)
        classical = find_n0(ContractionParams(1.0, math.inf, 2.0, 1.0)).n0
        ok = worst_rel <= 1e-10 and wendel_ok and minimal_ok and classical == 4
        detail = (
            f"ratio consistency {worst_rel:.2e} (tol 1e-10), wendel {'ok' if wendel_ok else 'violated'}, "
            f"minimal n0 {'ok' if minimal_ok else 'violated'}, factorial n0 = {classical} (want 4)"
        )
        return ok, detail

    return _timed(5, "contraction ledger", 10.0, body)


def criterion_6(seed: int = 0) -> CriterionResult:
    """Gate refuses alpha = 1/p; the boundary demo is unbounded, the companion is not."""

    def body():
        gate = validity_gate([0.5], 2.0)
        levels = [2**e for e in range(8, 15)]
        spec = HLSpec(p=2.0, lam=1.0, t0=0.5)
        table = unboundedness_demo(spec, levels)
        sups = table.sup_column()
        norms = table.norm_column()
        increasing = bool(np.all(np.diff(sups) > 0))
        norm_step = float(abs(norms[-1] - norms[-2]))
        companion = unboundedness_demo(spec, levels, order=0.75).sup_column()
        comp_step = float(abs(companion[-1] - companion[-2]))
        ok = gate.status is GateStatus.BOUNDARY and increasing and norm_step < 1e-3 and comp_step < 1e-2
        detail = (
            f"gate {gate.status.value}; sups {_fmt(sups)} strictly increasing={increasing}; "
            f"last norm step {norm_step:.2e} (tol 1e-3); companion last step {comp_step:.2e} (tol 1e-2)"
        )
        return ok, detail

    return _timed(6, "gate and nonexistence boundary", 120.0, body)


def criterion_7(seed: int = 0) -> CriterionResult:
    """Two solutions of the switching sqrt problem; Lipschitz check catches it near 0."""

    def body():
        res = nonuniqueness_demo(2**12)
        lip = check_lipschitz(catalog("intro_nonuniqueness"), 1.0, 3000, seed=seed)
        near = min(abs(lip.witness["x"][0]), abs(lip.witness["y"][0]))
        ok = (
            res.residual_phi1 <= 1e-3
            and res.residual_phi2 == 0.0
            and res.separation >= 0.5
            and not lip.passed
            and near < 1e-3
        )
        detail = (
            f"residual phi1 {res.residual_phi1:.3e} (tol 1e-3), phi2 {res.residual_phi2!r}, "
            f"separation {res.separation:.4f}; lipschitz {'fails' if not lip.passed else 'passes'} "
            f"with witness |x| = {near:.1e}, quotient {lip.witness['quotient']:.2e}"
        )
        return ok, detail

    return _timed(7, "nonuniqueness", None, body)


def multiorder_problem(N: int = 2**12, tol: float = 1e-10) -> ProblemSpec:
    return ProblemSpec(
        orders=(0.5, 1.0),
        xi=(1.0, 0.0),
        rhs=catalog("linear_system", A=[[0.0, 1.0], [-1.0, 0.0]]),
        T=1.0,
        N=N,
        p=4.0,
        tol=tol,
    )


def window_factor(diffs, n0) -> float:
    """Largest diffs[k + w] / diffs[k] over the trace, w = min(n0, len(diffs) - 1)."""
    d = np.asarray(diffs, dtype=float)
    w = min(int(n0), d.size - 1)
    if w < 1:
        return math.nan
    return float(np.max(d[w:] / d[:-w]))


def criterion_8(seed: int = 0) -> CriterionResult:
    """Multi-order system: Picard vs Adams, windowed contraction, initial-iterate independence."""

    def body():
        problem = multiorder_problem()
        tables = problem.tables()
        report = picard_solve(problem, tables=tables)
        adams = adams_pc_solve(problem)
        gap = sup_norm_diff(report.solution, adams)
        n0 = report.predicted_n0 if report.predicted_n0 is not None else len(report.diffs)
        factor = window_factor(report.diffs, n0)
        t = report.solution.t
        other = GridFunction(report.solution.grid, np.column_stack([np.cos(3 * t) - 2 * t, 5 * np.sin(t)]))
        report2 = picard_solve(problem, initial=other, tables=tables)
        spread = sup_norm_diff(report.solution, report2.solution)
        ok = (
            report.converged
            and report2.converged
            and gap <= 1e-4
            and factor < 1.0
            and spread <= 2 * problem.tol
        )
        detail = (
            f"picard-adams gap {gap:.2e} (tol 1e-4), {report.iterations} iterations, "
            f"window {min(n0, len(report.diffs) - 1)} factor {factor:.3e} (< 1), "
            f"initial-iterate spread {spread:.2e} (tol {2 * problem.tol:.0e})"
        )
        return ok, detail

    return _timed(8, "multi-order cross-check", None, body)


DETERMINISM_CONFIG = """\
[problem]
orders = 0.5, 1
initial = 1, 0
rhs = linear_system
rhs.A = 0, 1; -1, 0
T = 1
N = 4096
p = 4
tol = 1e-10
threads = {threads}
"""


def criterion_9(seed: int = 0) -> CriterionResult:
    """Criterion 8's solve with 1 and 4 threads gives byte-identical CSVs."""

    def body():
        env = dict(os.environ, NUMBA_NUM_THREADS="4")
        blobs = {}
        with tempfile.TemporaryDirectory() as tmp:
            for threads in (1, 4):
                work = Path(tmp) / f"t{threads}"
                work.mkdir()
                cfg = work / "run.cfg"
                cfg.write_text(DETERMINISM_CONFIG.format(threads=threads), encoding="utf-8")
                proc = subprocess.run(
                    [sys.executable, "-m", "fracpicard", "solve", "--config", str(cfg),
                     "--out", str(work), "--seed", str(seed)],
                    env=env, capture_output=True, text=True,
                )
                if proc.returncode != 0:
                    return False, f"solve with {threads} threads exited {proc.returncode}: {proc.stderr.strip()}"
                blobs[threads] = ((work / "solution.csv").read_bytes(), (work / "trace.csv").read_bytes())
        same = blobs[1] == blobs[4]
        return same, f"solution and trace CSVs {'identical' if same else 'DIFFER'} for threads 1 and 4"

    return _timed(9, "determinism", None, body)


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
)


def run_all(seed: int = 0, echo: bool = False) -> list[CriterionResult]:
    results = []
    for crit in CRITERIA:
        result = crit(seed)
        if echo:
            print(result.line(), flush=True)
        results.append(result)
    return results
