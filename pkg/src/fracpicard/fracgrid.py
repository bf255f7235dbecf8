"""Time grids on [0, T] and vector-valued samples on them."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .errors import DomainError, ShapeError


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing nodes 0 = t_0 < ... < t_N = T.

    ``kind`` is ``"uniform"`` or ``"graded"``; graded grids cluster nodes
    near ``focus`` with exponent ``r`` (``focus = 0`` for :func:`make_grid`).
    """

    nodes: np.ndarray
    kind: str = "uniform"
    r: float = 1.0
    focus: float = 0.0

    def __post_init__(self) -> None:
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise DomainError("a grid needs at least two nodes (N >= 1)")
        if nodes[0] != 0.0:
            raise DomainError(f"grid must start at t = 0, got {nodes[0]}")
        if not np.all(np.isfinite(nodes)):
            raise DomainError("grid nodes must be finite")
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("grid nodes must be strictly increasing")
        if self.kind not in ("uniform", "graded"):
            raise DomainError(f"unknown grid kind {self.kind!r}")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def N(self) -> int:
        return self.nodes.size - 1

    @property
    def T(self) -> float:
        return float(self.nodes[-1])

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.nodes)

    def same_as(self, other: "Grid") -> bool:
        return self is other or (
            self.nodes.shape == other.nodes.shape and np.array_equal(self.nodes, other.nodes)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.kind == other.kind and self.r == other.r and self.same_as(other)

    __hash__ = None  # type: ignore[assignment]


def make_grid(T: float, N: int, r: float = 1.0) -> Grid:
    """Nodes t_k = T (k/N)^r, k = 0..N. ``r = 1`` gives the uniform grid k T / N."""
    if not (T > 0 and math.isfinite(T)):
        raise DomainError(f"horizon T must be positive and finite, got {T}")
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    if not r >= 1:
        raise DomainError(f"grading exponent r must be >= 1, got {r}")
    N = int(N)
    k = np.arange(N + 1, dtype=float)
    if r == 1:
        nodes = k * T / N
        kind = "uniform"
    else:
        nodes = T * (k / N) ** r
        kind = "graded"
    nodes[-1] = T
    return Grid(nodes, kind=kind, r=float(r))


def make_grid_toward(T: float, N: int, t0: float, r: float) -> Grid:
    """Grid on [0, T] graded toward the interior point ``t0``.

    Half the intervals (rounded up) cover [0, t0] with spacing shrinking like
    (k/M)^r toward t0; the rest cover [t0, T] mirrored. ``t0`` is a node.
    """
    if not 0 < t0 <= T:
        raise DomainError(f"need 0 < t0 <= T, got t0={t0}, T={T}")
    if not r >= 1:
        raise DomainError(f"grading exponent r must be >= 1, got {r}")
    if int(N) != N or N < 2:
        raise DomainError(f"N must be an integer >= 2, got {N}")
    N = int(N)
    if t0 == T:
        left_cells, right_cells = N, 0
    else:
        left_cells = (N + 1) // 2
        right_cells = N - left_cells
    k = np.arange(left_cells + 1, dtype=float)
    left = t0 - t0 * ((left_cells - k) / left_cells) ** r
    left[0], left[-1] = 0.0, t0
    parts = [left]
    if right_cells:
        j = np.arange(1, right_cells + 1, dtype=float)
        right = t0 + (T - t0) * (j / right_cells) ** r
        right[-1] = T
        parts.append(right)
    nodes = np.concatenate(parts)
    if not np.all(np.diff(nodes) > 0):
        raise DomainError(f"t0 = {t0} is too close to 0 or T = {T} to resolve {N} graded cells")
    return Grid(nodes, kind="graded", r=float(r), focus=float(t0))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a path t -> R^n at the nodes of ``grid``; ``values`` has shape (N+1, n)."""

    grid: Grid
    values: np.ndarray
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2:
            raise ShapeError(f"values must be (N+1, n), got shape {vals.shape}")
        if vals.shape[0] != self.grid.nodes.size:
            raise ShapeError(
                f"{vals.shape[0]} samples for a grid with {self.grid.nodes.size} nodes"
            )
        if vals.shape[1] < 1:
            raise ShapeError("dimension n must be positive")
        if not np.all(np.isfinite(vals)):
            raise DomainError("grid function entries must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def component(self, j: int) -> np.ndarray:
        return self.values[:, j]

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Sample a vectorised ``fn(t) -> (N+1,) or (N+1, n)`` at the grid nodes."""
        return cls(grid, np.asarray(fn(grid.nodes), dtype=float))

    @classmethod
    def constant(cls, grid: Grid, value) -> "GridFunction":
        row = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(grid, np.broadcast_to(row, (grid.nodes.size, row.size)))


def _check_compatible(a: GridFunction, b: GridFunction) -> None:
    if not a.grid.same_as(b.grid):
        raise ShapeError("grid functions live on different grids")
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch: {a.dim} vs {b.dim}")


def sup_norm_diff(a: GridFunction, b: GridFunction) -> float:
    """max over nodes of the Euclidean norm of a(t_k) - b(t_k)."""
    _check_compatible(a, b)
    return float(np.max(np.linalg.norm(a.values - b.values, axis=1)))


def lp_norm(g: GridFunction, p: float) -> float:
    """Composite trapezoid approximation of (int_0^T |g(t)|^p dt)^(1/p).

    ``p = inf`` returns the largest sampled Euclidean norm.
    """
    if not p >= 1:
        raise DomainError(f"L^p norm needs p >= 1, got {p}")
    mags = np.linalg.norm(g.values, axis=1)
    if math.isinf(p):
        return float(np.max(mags))
    return trapezoid_lp(g.grid.nodes, mags, p)


def trapezoid_lp(nodes: np.ndarray, mags: np.ndarray, p: float) -> float:
    """Trapezoid L^p norm of nonnegative node magnitudes; scaled to avoid overflow."""
    scale = float(np.max(mags)) if mags.size else 0.0
    if scale == 0.0:
        return 0.0
    pw = (mags / scale) ** p
    integral = float(np.sum(0.5 * (pw[1:] + pw[:-1]) * np.diff(nodes)))
    return scale * integral ** (1.0 / p)


def _fmt(x: float) -> str:
    # repr is the shortest string that round-trips a double
    return repr(float(x))


def to_csv(g: GridFunction, path: str | Path | None = None) -> str:
    """Serialize as ``t,phi_1,...,phi_n`` with round-trip float formatting."""
    buf = io.StringIO(newline="")
    header = ["t"] + [f"phi_{j + 1}" for j in range(g.dim)]
    buf.write(",".join(header) + "\n")
    for tk, row in zip(g.grid.nodes, g.values):
        buf.write(",".join([_fmt(tk)] + [_fmt(v) for v in row]) + "\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="")
    return text


def from_csv(source: str | Path) -> GridFunction:
    """Inverse of :func:`to_csv`; accepts a path or the CSV text itself."""
    text = source.read_text(encoding="utf-8") if isinstance(source, Path) else str(source)
    if "\n" not in text and Path(text).exists():
        text = Path(text).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    if header[0] != "t" or any(h != f"phi_{j + 1}" for j, h in enumerate(header[1:])):
        raise ShapeError(f"unexpected CSV header {lines[0]!r}")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]], dtype=float)
    nodes = data[:, 0]
    uniform = np.array_equal(nodes, np.arange(nodes.size) * nodes[-1] / (nodes.size - 1))
    grid = Grid(nodes, kind="uniform" if uniform else "graded")
    return GridFunction(grid, data[:, 1:])
