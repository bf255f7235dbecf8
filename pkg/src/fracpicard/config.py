"""Line-oriented configuration files.

Grammar (one entry per line, surrounding whitespace ignored)::

    file     := { line }
    line     := [ section | entry ] [ comment ]
    comment  := "#" any-text
    section  := "[" name "]"
    entry    := key "=" value

Values are scalars, comma-separated lists (``0.5, 1``) or matrices with rows
separated by ``;`` (``0, 1; -1, 0``). A trailing separator forces the
container type, so ``1,`` is a one-element list and ``-1;`` a 1x1 matrix.
``inf`` is accepted wherever a float is. Right-hand-side parameters live in
the problem section under a ``rhs.`` prefix, e.g. ``rhs.lam = -1``.

Sections and keys::

    [problem]      orders, initial, rhs, rhs.*, T, N, r, tol, max_iter, p, rule, threads
    [contraction]  rho, q, g_norm, T, n_max
    [boundary]     mode (hl | nonunique), levels, p, lam, t0, shift, order, grading
    [output]       solution, trace, summary, contraction, boundary

Unknown sections or keys, duplicates and malformed values raise
:class:`ConfigError` carrying the line number and key.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigError, FracPicardError
from .fracint import QuadratureRule
from .picard import ProblemSpec
from .rhs import CATALOG, catalog

_PROBLEM_KEYS = {"orders", "initial", "rhs", "T", "N", "r", "tol", "max_iter", "p", "rule", "threads"}
_CONTRACTION_KEYS = {"rho", "q", "g_norm", "T", "n_max"}
_BOUNDARY_KEYS = {"mode", "levels", "p", "lam", "t0", "shift", "order", "grading"}
_OUTPUT_KEYS = {"solution", "trace", "summary", "contraction", "boundary"}
_SECTIONS = {
    "problem": _PROBLEM_KEYS,
    "contraction": _CONTRACTION_KEYS,
    "boundary": _BOUNDARY_KEYS,
    "output": _OUTPUT_KEYS,
}
BOUNDARY_MODES = ("hl", "nonunique")


@dataclass(frozen=True)
class ProblemConfig:
    orders: tuple
    initial: tuple
    rhs: str
    rhs_params: dict = field(default_factory=dict)
    T: float = 1.0
    N: int = 256
    r: Optional[float] = None  # None: grading chosen from the smallest order
    tol: float = 1e-10
    max_iter: Optional[int] = None
    p: float = 2.0
    rule: str = QuadratureRule.TRAPEZOID.value
    threads: Optional[int] = None

    def to_problem(self) -> ProblemSpec:
        return ProblemSpec(
            orders=self.orders,
            xi=self.initial,
            rhs=catalog(self.rhs, **self.rhs_params),
            T=self.T,
            N=self.N,
            p=self.p,
            r=self.r,
            tol=self.tol,
            max_iter=self.max_iter,
            rule=QuadratureRule(self.rule),
        )


@dataclass(frozen=True)
class ContractionConfig:
    rho: float
    q: float
    g_norm: float
    T: float = 1.0
    n_max: int = 10**6


@dataclass(frozen=True)
class BoundaryConfig:
    mode: str = "hl"
    levels: tuple = tuple(2**e for e in range(8, 15))
    p: float = 2.0
    lam: float = 1.0
    t0: float = 0.5
    shift: float = 1.0
    order: Optional[float] = None  # None: 1/p
    grading: float = 3.0


@dataclass(frozen=True)
class OutputConfig:
    solution: str = "solution.csv"
    trace: str = "trace.csv"
    summary: str = "summary.txt"
    contraction: str = "contraction.csv"
    boundary: str = "boundary.csv"


@dataclass(frozen=True)
class Config:
    problem: Optional[ProblemConfig] = None
    contraction: Optional[ContractionConfig] = None
    boundary: Optional[BoundaryConfig] = None
    output: OutputConfig = OutputConfig()


# ---------------------------------------------------------------------------
# value parsing


def _number(text: str, line: int, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", line, key) from None


def _integer(text: str, line: int, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", line, key) from None


def _float_list(text: str, line: int, key: str) -> tuple:
    items = [s.strip() for s in text.split(",")]
    if items and items[-1] == "":
        items.pop()
    if not items or any(s == "" for s in items):
        raise ConfigError(f"expected a comma-separated list, got {text!r}", line, key)
    return tuple(_number(s, line, key) for s in items)


def _generic(text: str, line: int, key: str) -> Any:
    """Scalar, list or matrix, for catalog parameters."""
    if ";" in text:
        rows = [s for s in text.split(";")]
        if rows[-1].strip() == "":
            rows.pop()
        return [list(_float_list(r, line, key)) for r in rows]
    if "," in text:
        return list(_float_list(text, line, key))
    try:
        return int(text)
    except ValueError:
        return _number(text, line, key)


def _optional(text: str, parse, line: int, key: str):
    return None if text.lower() in ("auto", "none") else parse(text, line, key)


def _split(text: str) -> list[tuple[int, str, str, str]]:
    """(line, section, key, value) for every entry."""
    entries = []
    section = None
    seen: set = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        if s.startswith("["):
            if not s.endswith("]"):
                raise ConfigError(f"malformed section header {s!r}", lineno)
            section = s[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]; expected one of {sorted(_SECTIONS)}", lineno)
            if section in seen:
                raise ConfigError(f"section [{section}] appears twice", lineno)
            seen.add(section)
            continue
        if "=" not in s:
            raise ConfigError(f"expected 'key = value', got {s!r}", lineno)
        if section is None:
            raise ConfigError("entry before any [section] header", lineno)
        key, value = (part.strip() for part in s.split("=", 1))
        if not key:
            raise ConfigError("empty key", lineno)
        allowed = _SECTIONS[section]
        if key not in allowed and not (section == "problem" and key.startswith("rhs.") and len(key) > 4):
            raise ConfigError(f"unknown key in [{section}]; expected one of {sorted(allowed)}", lineno, key)
        if value == "":
            raise ConfigError("empty value", lineno, key)
        entries.append((lineno, section, key, value))
    return entries


def _group(entries) -> dict:
    grouped: dict = {}
    for lineno, section, key, value in entries:
        block = grouped.setdefault(section, {})
        if key in block:
            raise ConfigError(f"duplicate key (first on line {block[key][0]})", lineno, key)
        block[key] = (lineno, value)
    return grouped


def _require(block: dict, section: str, key: str) -> tuple[int, str]:
    if key not in block:
        raise ConfigError(f"[{section}] is missing required key", None, key)
    return block[key]


def _parse_problem(block: dict) -> ProblemConfig:
    kw: dict = {}
    line, v = _require(block, "problem", "orders")
    kw["orders"] = _float_list(v, line, "orders")
    line, v = _require(block, "problem", "initial")
    kw["initial"] = _float_list(v, line, "initial")
    line, v = _require(block, "problem", "rhs")
    kw["rhs"] = v
    kw["rhs_params"] = {
        key[4:]: _generic(v, line, key) for key, (line, v) in block.items() if key.startswith("rhs.")
    }
    scalar = {"T": _number, "tol": _number, "p": _number, "N": _integer}
    for key, parse in scalar.items():
        if key in block:
            line, v = block[key]
            kw[key] = parse(v, line, key)
    for key, parse in (("r", _number), ("max_iter", _integer), ("threads", _integer)):
        if key in block:
            line, v = block[key]
            kw[key] = _optional(v, parse, line, key)
    if "rule" in block:
        line, v = block["rule"]
        try:
            kw["rule"] = QuadratureRule(v.lower()).value
        except ValueError:
            raise ConfigError(f"rule must be one of {[r.value for r in QuadratureRule]}", line, "rule") from None
    factory = CATALOG.get(kw["rhs"])
    if factory is not None:
        accepted = inspect.signature(factory).parameters
        for name in kw["rhs_params"]:
            if name not in accepted:
                raise ConfigError(
                    f"rhs {kw['rhs']!r} takes no parameter {name!r}; accepted: {sorted(accepted)}",
                    block[f"rhs.{name}"][0], f"rhs.{name}",
                )
    cfg = ProblemConfig(**kw)
    if cfg.threads is not None and cfg.threads < 1:
        raise ConfigError("threads must be >= 1", block["threads"][0], "threads")
    # build once so domain errors surface with the offending line
    try:
        cfg.to_problem()
    except ConfigError as exc:
        key = f"rhs.{exc.field}" if exc.field not in (None, "rhs") else "rhs"
        raise ConfigError(exc.message, block.get(key, block["rhs"])[0], key) from None
    except FracPicardError as exc:
        raise ConfigError(str(exc), block["orders"][0], "problem") from None
    return cfg


def _parse_contraction(block: dict) -> ContractionConfig:
    kw: dict = {}
    for key in ("rho", "q", "g_norm"):
        line, v = _require(block, "contraction", key)
        kw[key] = _number(v, line, key)
    if "T" in block:
        kw["T"] = _number(block["T"][1], block["T"][0], "T")
    if "n_max" in block:
        kw["n_max"] = _integer(block["n_max"][1], block["n_max"][0], "n_max")
        if kw["n_max"] < 1:
            raise ConfigError("n_max must be >= 1", block["n_max"][0], "n_max")
    return ContractionConfig(**kw)


def _parse_boundary(block: dict) -> BoundaryConfig:
    kw: dict = {}
    if "mode" in block:
        line, v = block["mode"]
        if v not in BOUNDARY_MODES:
            raise ConfigError(f"unknown mode {v!r}; expected one of {list(BOUNDARY_MODES)}", line, "mode")
        kw["mode"] = v
    if "levels" in block:
        line, v = block["levels"]
        levels = _float_list(v, line, "levels")
        if any(x != int(x) or x < 1 for x in levels):
            raise ConfigError("levels must be positive integers", line, "levels")
        kw["levels"] = tuple(int(x) for x in levels)
    for key in ("p", "lam", "t0", "shift", "grading"):
        if key in block:
            kw[key] = _number(block[key][1], block[key][0], key)
    if "order" in block:
        line, v = block["order"]
        kw["order"] = _optional(v, _number, line, "order")
    return BoundaryConfig(**kw)


def parse_config(text: str) -> Config:
    """Parse configuration text into a :class:`Config`."""
    grouped = _group(_split(text))
    kw: dict = {}
    if "problem" in grouped:
        kw["problem"] = _parse_problem(grouped["problem"])
    if "contraction" in grouped:
        kw["contraction"] = _parse_contraction(grouped["contraction"])
    if "boundary" in grouped:
        kw["boundary"] = _parse_boundary(grouped["boundary"])
    if "output" in grouped:
        kw["output"] = OutputConfig(**{k: v for k, (_, v) in grouped["output"].items()})
    return Config(**kw)


def load_config(path: str | Path) -> Config:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    return parse_config(text)


# ---------------------------------------------------------------------------
# serialisation


def _fmt_scalar(x) -> str:
    if isinstance(x, bool):
        raise TypeError("booleans are not representable")
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _fmt_list(xs) -> str:
    text = ", ".join(_fmt_scalar(x) for x in xs)
    return text + "," if len(xs) == 1 else text


def _fmt_generic(v) -> str:
    if isinstance(v, (list, tuple)):
        if v and isinstance(v[0], (list, tuple)):
            text = "; ".join(_fmt_list(row) for row in v)
            return text + ";" if len(v) == 1 else text
        return _fmt_list(v)
    return _fmt_scalar(v)


def _fmt_optional(v) -> str:
    return "auto" if v is None else _fmt_scalar(v)


def dump_config(cfg: Config) -> str:
    """Inverse of :func:`parse_config`: ``parse_config(dump_config(c)) == c``."""
    out: list[str] = []
    if cfg.problem is not None:
        pc = cfg.problem
        out += [
            "[problem]",
            f"orders = {_fmt_list(pc.orders)}",
            f"initial = {_fmt_list(pc.initial)}",
            f"rhs = {pc.rhs}",
        ]
        out += [f"rhs.{k} = {_fmt_generic(v)}" for k, v in pc.rhs_params.items()]
        out += [
            f"T = {_fmt_scalar(pc.T)}",
            f"N = {pc.N}",
            f"r = {_fmt_optional(pc.r)}",
            f"tol = {_fmt_scalar(pc.tol)}",
            f"max_iter = {_fmt_optional(pc.max_iter)}",
            f"p = {_fmt_scalar(pc.p)}",
            f"rule = {pc.rule}",
            f"threads = {_fmt_optional(pc.threads)}",
            "",
        ]
    if cfg.contraction is not None:
        cc = cfg.contraction
        out += ["[contraction]"]
        out += [f"{f.name} = {_fmt_scalar(getattr(cc, f.name))}" for f in fields(cc)]
        out += [""]
    if cfg.boundary is not None:
        bc = cfg.boundary
        out += ["[boundary]", f"mode = {bc.mode}", f"levels = {_fmt_list(bc.levels)}"]
        out += [f"{k} = {_fmt_scalar(getattr(bc, k))}" for k in ("p", "lam", "t0", "shift")]
        out += [f"order = {_fmt_optional(bc.order)}", f"grading = {_fmt_scalar(bc.grading)}", ""]
    out += ["[output]"]
    out += [f"{f.name} = {getattr(cfg.output, f.name)}" for f in fields(cfg.output)]
    return "\n".join(out) + "\n"


def with_threads(cfg: Config, threads: Optional[int]) -> Config:
    """Copy of ``cfg`` with the problem's thread count replaced."""
    if cfg.problem is None:
        raise ConfigError("no [problem] section")
    return replace(cfg, problem=replace(cfg.problem, threads=threads))
