"""Command-line entry point.

Exit codes: 0 success, 1 parse / I/O / domain error, 2 validity-gate
rejection, 3 Picard iteration did not converge.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import Config, load_config
from .errors import FracPicardError
from .picard import GateRejected, picard_solve
from .rhs import check_growth, check_lipschitz

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_GATE = 2
EXIT_NOT_CONVERGED = 3

# witness checks run before a solve
_WITNESS_SAMPLES = 4096


def _write(out_dir: Path, name: str, text: str) -> Path:
    path = out_dir / name
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _need(cfg: Config, section: str):
    block = getattr(cfg, section)
    if block is None:
        raise FracPicardError(f"config has no [{section}] section")
    return block


def cmd_solve(cfg: Config, out_dir: Path, seed: int = 0) -> int:
    pc = _need(cfg, "problem")
    problem = pc.to_problem()
    radius = 10.0 * (1.0 + float(np.max(np.abs(problem.xi))))
    checks = [
        check_growth(problem.rhs, radius, _WITNESS_SAMPLES, seed=seed, T=problem.T),
        check_lipschitz(problem.rhs, radius, _WITNESS_SAMPLES, seed=seed, T=problem.T),
    ]
    witness_lines = [f"witness_{c.condition} = {'pass' if c.passed else 'fail'}" for c in checks]
    try:
        report = picard_solve(problem, threads=pc.threads)
    except GateRejected as exc:
        text = f"status = rejected\n{exc}\n" + "\n".join(witness_lines) + "\n"
        _write(out_dir, cfg.output.summary, text)
        print(f"gate rejected: {exc}", file=sys.stderr)
        return EXIT_GATE
    _write(out_dir, cfg.output.solution, report.solution_csv())
    _write(out_dir, cfg.output.trace, report.trace_csv())
    status = "converged" if report.converged else "not_converged"
    summary = f"status = {status}\n" + report.summary() + "\n".join(witness_lines) + "\n"
    _write(out_dir, cfg.output.summary, summary)
    print(summary, end="")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_validate(cfg: Config, out_dir: Path, seed: int = 0) -> int:
    from .contraction import validity_gate

    pc = _need(cfg, "problem")
    problem = pc.to_problem()
    gate = validity_gate(problem.orders, problem.p)
    print(gate)
    radius = 10.0 * (1.0 + float(np.max(np.abs(problem.xi))))
    for check in (check_growth, check_lipschitz):
        print(check(problem.rhs, radius, _WITNESS_SAMPLES, seed=seed, T=problem.T))
    return EXIT_OK if gate.ok else EXIT_GATE


def cmd_contraction(cfg: Config, out_dir: Path, seed: int = 0) -> int:
    from .contraction import ContractionParams, find_n0
    from .picard import predicted_contraction

    if cfg.contraction is not None:
        cc = cfg.contraction
        report = find_n0(ContractionParams(cc.rho, cc.q, cc.g_norm, cc.T), n_max=cc.n_max)
    else:
        problem = _need(cfg, "problem").to_problem()
        report = predicted_contraction(problem)
        if report is None:
            raise FracPicardError("right-hand side declares no Lipschitz weight; no contraction bound")
    _write(out_dir, cfg.output.contraction, report.to_csv())
    _write(out_dir, cfg.output.summary, report.summary())
    print(report.summary(), end="")
    return EXIT_OK if report.n0 is not None else EXIT_ERROR


def cmd_boundary(cfg: Config, out_dir: Path, seed: int = 0) -> int:
    from .boundary import HLSpec, nonuniqueness_table, unboundedness_demo

    bc = _need(cfg, "boundary")
    if bc.mode == "hl":
        spec = HLSpec(p=bc.p, lam=bc.lam, t0=bc.t0, shift=bc.shift)
        table = unboundedness_demo(spec, bc.levels, order=bc.order, grading=bc.grading)
        csv = table.to_csv()
        sups = table.sup_column()
        increasing = bool(np.all(np.diff(sups) > 0))
        summary = (
            f"mode = hl\norder = {table.order!r}\n"
            f"sup_strictly_increasing = {str(increasing).lower()}\n"
            f"last_sup = {float(sups[-1])!r}\n"
        )
    elif bc.mode == "nonunique":
        csv = nonuniqueness_table(bc.levels)
        summary = "mode = nonunique\n"
    else:
        raise FracPicardError(f"unknown boundary mode {bc.mode!r}")
    _write(out_dir, cfg.output.boundary, csv)
    _write(out_dir, cfg.output.summary, summary)
    print(csv, end="")
    return EXIT_OK


def cmd_selftest(seed: int = 0) -> int:
    from .acceptance import run_all

    results = run_all(seed=seed, echo=True)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_ERROR


_COMMANDS = {
    "solve": cmd_solve,
    "validate": cmd_validate,
    "contraction": cmd_contraction,
    "boundary": cmd_boundary,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracpicard", description="Picard iteration for multi-order Caputo systems"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*_COMMANDS, "selftest"):
        p = sub.add_parser(name)
        if name != "selftest":
            p.add_argument("--config", required=True, type=Path, help="configuration file")
            p.add_argument("--out", default=Path("."), type=Path, help="output directory")
        p.add_argument("--seed", default=0, type=int, help="seed for sampled checks (u64)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_ERROR
    if args.command == "selftest":
        return cmd_selftest(args.seed)
    try:
        cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg, args.out, args.seed)
    except (FracPicardError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
