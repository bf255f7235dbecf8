"""Right-hand sides f(x, t) with sampled witnesses for the growth and Lipschitz bounds.

A right-hand side carries its own certificates: the growth bound
``|f(x,t)| <= C |x| + gamma(t)`` and, optionally, the Lipschitz bound
``|f(x,t) - f(y,t)| <= l(t) |x - y|``. Both weights must lie in L^p. The
checks below can only falsify these claims, never prove them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, EvaluationError, ShapeError
from .fracgrid import Grid, GridFunction

PointFn = Callable[[np.ndarray, float], np.ndarray]
BatchFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
WeightFn = Callable[[np.ndarray], np.ndarray]


def _const_weight(value: float) -> WeightFn:
    def weight(t):
        return np.full(np.shape(t), float(value))

    weight.constant = float(value)  # type: ignore[attr-defined]
    return weight


@dataclass(frozen=True)
class CaratheodoryRHS:
    """f: R^n x [0, T] -> R^n with growth witnesses (C, gamma) and Lipschitz weight l.

    ``func(x, t)`` evaluates one point; ``batch(X, t)`` with X of shape (m, n)
    and t of shape (m,) is an optional vectorised form. Weights map an array
    of times to an array of nonnegative values. ``p`` is the exponent for
    which the weights are claimed to be p-integrable (``inf`` for bounded).
    """

    dim: int
    func: PointFn
    growth_constant: float
    growth_weight: WeightFn
    lipschitz_weight: Optional[WeightFn] = None
    p: float = math.inf
    batch: Optional[BatchFn] = None
    name: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x, t: float) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float), float(t)), dtype=float).reshape(self.dim)

    def eval_many(self, X: np.ndarray, t: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, self.dim)
        t = np.asarray(t, dtype=float).reshape(-1)
        if self.batch is not None:
            return np.asarray(self.batch(X, t), dtype=float).reshape(X.shape)
        return np.stack([self(x, tk) for x, tk in zip(X, t)])


def nemytskii_eval(rhs: CaratheodoryRHS, phi: GridFunction) -> GridFunction:
    """The superposition t -> f(phi(t), t) sampled on phi's grid."""
    if phi.dim != rhs.dim:
        raise ShapeError(f"path has dimension {phi.dim}, rhs expects {rhs.dim}")
    vals = rhs.eval_many(phi.values, phi.grid.nodes)
    bad = ~np.all(np.isfinite(vals), axis=1)
    if np.any(bad):
        node = int(np.argmax(bad))
        raise EvaluationError(
            f"rhs {rhs.name!r} returned a non-finite value at node {node} (t = {phi.grid.nodes[node]})",
            node=node,
        )
    return GridFunction(phi.grid, vals)


def weight_lp_norm(weight: WeightFn, p: float, grid: Grid) -> float:
    """||weight||_{L^p(0,T)} by the composite midpoint rule on ``grid``.

    Midpoints keep integrable endpoint singularities (e.g. t^(-1/4)) finite.
    """
    t = grid.nodes
    mid = 0.5 * (t[1:] + t[:-1])
    vals = np.abs(np.asarray(weight(mid), dtype=float))
    if math.isinf(p):
        return float(np.max(vals))
    scale = float(np.max(vals))
    if scale == 0.0:
        return 0.0
    return scale * float(np.sum((vals / scale) ** p * np.diff(t))) ** (1.0 / p)


@dataclass
class WitnessReport:
    """Outcome of a sampled witness check; ``witness`` holds the worst sample."""

    condition: str
    passed: bool
    max_violation: float
    tolerance: float
    samples: int
    witness: dict

    def __str__(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"{self.condition}: {verdict} (max violation {self.max_violation:.3e}, "
            f"tolerance {self.tolerance:.1e}, {self.samples} samples, worst at {self.witness})"
        )


def _ball_samples(rng: np.random.Generator, m: int, dim: int, radius: float) -> np.ndarray:
    direction = rng.standard_normal((m, dim))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return direction / norms * radius * rng.random((m, 1)) ** (1.0 / dim)


def _log_scaled(rng: np.random.Generator, m: int, dim: int, radius: float) -> np.ndarray:
    # points with |x| log-uniform in [radius * 1e-12, radius]: probes behaviour near 0
    direction = rng.standard_normal((m, dim))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return direction / norms * radius * 10.0 ** (-12.0 * rng.random((m, 1)))


def check_growth(
    rhs: CaratheodoryRHS, ball_radius: float, samples: int, seed: int = 0, T: float = 1.0
) -> WitnessReport:
    """Falsification test of |f(x,t)| <= C|x| + gamma(t) on random (x, t), |x| <= R."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    m1 = samples - samples // 3
    X = np.vstack([
        _ball_samples(rng, m1, rhs.dim, ball_radius),
        _log_scaled(rng, samples - m1, rhs.dim, ball_radius),
    ])
    t = rng.random(samples) * T
    F = rhs.eval_many(X, t)
    lhs = np.linalg.norm(F, axis=1)
    with np.errstate(invalid="ignore"):
        bound = rhs.growth_constant * np.linalg.norm(X, axis=1) + np.asarray(rhs.growth_weight(t), dtype=float)
        violation = np.where(np.isnan(lhs - bound), np.inf, lhs - bound)
    k = int(np.argmax(violation))
    tol = 1e-12 * (1.0 + rhs.growth_constant * ball_radius)
    return WitnessReport(
        "growth",
        bool(violation[k] <= tol),
        float(violation[k]),
        tol,
        samples,
        {"x": X[k].tolist(), "t": float(t[k]), "f": F[k].tolist()},
    )


def check_lipschitz(
    rhs: CaratheodoryRHS,
    ball_radius: float,
    samples: int,
    seed: int = 0,
    T: float = 1.0,
    weight: Optional[WeightFn] = None,
) -> WitnessReport:
    """Falsification test of |f(x,t) - f(y,t)| <= l(t)|x - y| on random pairs.

    ``weight`` overrides the rhs's declared weight. With neither available the
    check fails outright and reports the largest observed difference quotient.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    ell = weight if weight is not None else rhs.lipschitz_weight
    rng = np.random.default_rng(seed)
    third = max(1, samples // 3)
    m_uniform = samples - 2 * third
    # independent pairs, close pairs, and pairs at small scales near 0
    X = np.vstack([
        _ball_samples(rng, m_uniform, rhs.dim, ball_radius),
        _ball_samples(rng, third, rhs.dim, ball_radius),
        _log_scaled(rng, third, rhs.dim, ball_radius),
    ])
    Y = np.vstack([
        _ball_samples(rng, m_uniform, rhs.dim, ball_radius),
        X[m_uniform:m_uniform + third]
        + _log_scaled(rng, third, rhs.dim, ball_radius * 1e-2),
        _log_scaled(rng, third, rhs.dim, ball_radius),
    ])
    X, Y = X[:samples], Y[:samples]
    t = rng.random(X.shape[0]) * T
    diff = np.linalg.norm(rhs.eval_many(X, t) - rhs.eval_many(Y, t), axis=1)
    dist = np.linalg.norm(X - Y, axis=1)
    if ell is None:
        with np.errstate(divide="ignore", invalid="ignore"):
            quotient = np.where(dist > 0, diff / dist, 0.0)
        k = int(np.argmax(quotient))
        return WitnessReport(
            "lipschitz",
            False,
            math.inf,
            0.0,
            X.shape[0],
            {"x": X[k].tolist(), "y": Y[k].tolist(), "t": float(t[k]),
             "quotient": float(quotient[k]), "reason": "no Lipschitz weight declared"},
        )
    lw = np.asarray(ell(t), dtype=float)
    with np.errstate(invalid="ignore"):
        violation = diff - lw * dist
        violation = np.where(np.isnan(violation), np.inf, violation)
    k = int(np.argmax(violation))
    scale = float(np.max(lw[np.isfinite(lw)], initial=0.0))
    tol = 1e-12 * (1.0 + scale * ball_radius)
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = diff[k] / dist[k] if dist[k] > 0 else 0.0
    return WitnessReport(
        "lipschitz",
        bool(violation[k] <= tol),
        float(violation[k]),
        tol,
        X.shape[0],
        {"x": X[k].tolist(), "y": Y[k].tolist(), "t": float(t[k]), "quotient": float(quotient)},
    )


# ---------------------------------------------------------------------------
# catalog

def _zero(dim: int = 1) -> CaratheodoryRHS:
    dim = int(dim)
    z = _const_weight(0.0)
    return CaratheodoryRHS(
        dim=dim,
        func=lambda x, t: np.zeros(dim),
        growth_constant=0.0,
        growth_weight=z,
        lipschitz_weight=z,
        batch=lambda X, t: np.zeros_like(X),
        name="zero",
        params={"dim": dim},
    )


def _linear_scalar(lam: float) -> CaratheodoryRHS:
    lam = float(lam)
    return CaratheodoryRHS(
        dim=1,
        func=lambda x, t: lam * x,
        growth_constant=abs(lam),
        growth_weight=_const_weight(0.0),
        lipschitz_weight=_const_weight(abs(lam)),
        batch=lambda X, t: lam * X,
        name="linear_scalar",
        params={"lam": lam},
    )


def _linear_system(A: Sequence[Sequence[float]], forcing: Optional[Sequence[float]] = None) -> CaratheodoryRHS:
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError(f"linear_system needs a square matrix, got shape {A.shape}", field="A")
    n = A.shape[0]
    b = np.zeros(n) if forcing is None else np.array(forcing, dtype=float).reshape(-1)
    if b.size != n:
        raise ConfigError(f"forcing has length {b.size}, matrix is {n}x{n}", field="forcing")
    opnorm = float(np.linalg.norm(A, 2))
    A.setflags(write=False)
    b.setflags(write=False)
    return CaratheodoryRHS(
        dim=n,
        func=lambda x, t: A @ x + b,
        growth_constant=opnorm,
        growth_weight=_const_weight(float(np.linalg.norm(b))),
        lipschitz_weight=_const_weight(opnorm),
        batch=lambda X, t: X @ A.T + b,
        name="linear_system",
        params={"A": A.tolist(), "forcing": b.tolist()},
    )


def _intro_nonuniqueness() -> CaratheodoryRHS:
    def batch(X, t):
        root = np.sqrt(np.maximum(X, 0.0))
        return np.where(np.asarray(t).reshape(-1, 1) <= 0.5, 2.0 * root, root)

    # 2 sqrt(x) <= 1 + x, so C = 1 and gamma = 1; no Lipschitz weight exists
    return CaratheodoryRHS(
        dim=1,
        func=lambda x, t: batch(np.asarray(x).reshape(1, 1), np.array([t]))[0],
        growth_constant=1.0,
        growth_weight=_const_weight(1.0),
        lipschitz_weight=None,
        batch=batch,
        name="intro_nonuniqueness",
        params={},
    )


def _hl_forced(sigma: Optional[Callable] = None, p: float = 2.0, lam: float = 1.0,
               t0: float = 0.5, shift: float = 1.0) -> CaratheodoryRHS:
    from .boundary import HLSpec, hl_sigma

    if sigma is None:
        sigma = hl_sigma(HLSpec(p=p, lam=lam, t0=t0, shift=shift))
    sig = sigma

    def batch(X, t):
        return X + np.asarray(sig(np.asarray(t, dtype=float)), dtype=float).reshape(-1, 1)

    return CaratheodoryRHS(
        dim=1,
        func=lambda x, t: x + float(sig(np.array([t]))[0]),
        growth_constant=1.0,
        growth_weight=lambda t: np.abs(np.asarray(sig(np.asarray(t, dtype=float)), dtype=float)),
        lipschitz_weight=_const_weight(1.0),
        p=float(p),
        batch=batch,
        name="hl_forced",
        params={"p": p, "lam": lam, "t0": t0, "shift": shift},
    )


CATALOG = {
    "zero": _zero,
    "linear_scalar": _linear_scalar,
    "linear_system": _linear_system,
    "intro_nonuniqueness": _intro_nonuniqueness,
    "hl_forced": _hl_forced,
}


def catalog(name: str, **params) -> CaratheodoryRHS:
    """Builtin right-hand sides with their witnesses.

    ``zero(dim)``, ``linear_scalar(lam)``, ``linear_system(A, forcing)``,
    ``intro_nonuniqueness()``, ``hl_forced(sigma | p, lam, t0, shift)``.
    """
    try:
        factory = CATALOG[name]
    except KeyError:
        raise ConfigError(f"unknown rhs {name!r}; choose from {sorted(CATALOG)}", field="rhs") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for rhs {name!r}: {exc}", field="rhs") from None
