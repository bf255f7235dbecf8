"""A-priori contraction constants for the iterated operator g J^rho g J^rho ... g.

For order rho, exponent q > 1/rho and weight norm G = ||g||_{L^q(0,T)} the
n-fold iterate is bounded by

    C_n = (G / Gamma(rho))^n (Gamma(beta)^n / (n beta Gamma(n beta)))^(1/q*) T^(n (rho - 1/q))

with beta = (rho q - 1)/(q - 1) and q* = q/(q - 1). Everything is computed in
log space through log_gamma; for n above 2^24 the cancellation between the
n log n terms is resolved at extended precision.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import numpy as np
from scipy import special

from .errors import DomainError, HypothesisError
from .specfun import log_gamma

BOUNDARY_TOL = 1e-12
_LOG_SATURATE = 700.0
# above this n, log C_n cancels too much in double precision; use mpmath
_MP_THRESHOLD = 2**24
_MP_DPS = 60
# n itself must stay exactly representable as a double
N0_SEARCH_LIMIT = 2**53


def derive_beta(rho: float, q: float) -> tuple[float, float]:
    """(beta, q*) = ((rho q - 1)/(q - 1), q/(q - 1)); (rho, 1) at q = inf."""
    if not 0 < rho <= 1:
        raise DomainError(f"rho must lie in (0, 1], got {rho}")
    if math.isinf(q) and q > 0:
        return float(rho), 1.0
    if not q > 1.0 / rho:
        raise HypothesisError(f"need q > 1/rho = {1.0 / rho}, got q = {q}")
    return (rho * q - 1.0) / (q - 1.0), q / (q - 1.0)


@dataclass(frozen=True)
class ContractionParams:
    rho: float
    q: float
    g_norm: float
    T: float
    beta: float = field(init=False)
    q_star: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.g_norm >= 0 or not math.isfinite(self.g_norm):
            raise DomainError(f"g_norm must be finite and >= 0, got {self.g_norm}")
        if not self.T > 0:
            raise DomainError(f"T must be > 0, got {self.T}")
        beta, q_star = derive_beta(self.rho, self.q)
        if not beta > 0:
            raise HypothesisError(f"beta = {beta} is not positive (q too close to 1/rho)")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "q_star", q_star)

    @property
    def inv_q(self) -> float:
        return 0.0 if math.isinf(self.q) else 1.0 / self.q


def log_c_n(params: ContractionParams, n) -> np.ndarray | float:
    """Natural log of C_n (scalar or array n >= 1); -inf when g_norm = 0."""
    n_arr = np.asarray(n, dtype=float)
    if np.any(n_arr < 1):
        raise DomainError("n must be >= 1")
    if params.g_norm == 0.0:
        out = np.full(n_arr.shape, -math.inf)
    else:
        b = params.beta
        per_step = (
            math.log(params.g_norm)
            - log_gamma(params.rho)
            + (params.rho - params.inv_q) * math.log(params.T)
            + log_gamma(b) / params.q_star
        )
        out = n_arr * per_step - (np.log(n_arr * b) + log_gamma(n_arr * b)) / params.q_star
        big = n_arr > _MP_THRESHOLD
        if np.any(big):
            out = np.array(out, dtype=float)
            out[big] = [_log_c_n_mp(params, k) for k in n_arr[big]]
    return float(out) if out.ndim == 0 else out


def _log_c_n_mp(params: ContractionParams, n: float) -> float:
    # same formula as log_c_n; terms of size n log n cancel, so 60 digits
    with mpmath.workdps(_MP_DPS):
        n = mpmath.mpf(n)
        b = mpmath.mpf(params.beta)
        per_step = (
            mpmath.log(params.g_norm)
            - mpmath.loggamma(params.rho)
            + (mpmath.mpf(params.rho) - params.inv_q) * mpmath.log(params.T)
            + mpmath.loggamma(b) / params.q_star
        )
        return float(n * per_step - mpmath.loggamma(n * b + 1) / params.q_star)


def _saturating_exp(logv: float) -> tuple[float, bool]:
    if logv > _LOG_SATURATE:
        return math.exp(_LOG_SATURATE), True
    return math.exp(logv), False


def c_n(params: ContractionParams, n: int) -> float:
    """C_n; values beyond exp(700) saturate there (see :func:`log_c_n`)."""
    return _saturating_exp(log_c_n(params, n))[0]


def log_ratio(params: ContractionParams, n) -> np.ndarray | float:
    """log(C_{n+1}/C_n) from the closed-form ratio, not from differencing."""
    n_arr = np.asarray(n, dtype=float)
    if params.g_norm == 0.0:
        out = np.full(n_arr.shape, -math.inf)
    else:
        b = params.beta
        gamma_part = (
            log_gamma(b)
            + np.log(n_arr)
            + log_gamma(n_arr * b)
            - np.log(n_arr + 1.0)
            - log_gamma((n_arr + 1.0) * b)
        )
        out = (
            math.log(params.g_norm)
            + (params.rho - params.inv_q) * math.log(params.T)
            - log_gamma(params.rho)
            + gamma_part / params.q_star
        )
    return float(out) if np.ndim(out) == 0 else out


def ratio(params: ContractionParams, n: int) -> float:
    """C_{n+1} / C_n = (G T^(rho-1/q) / Gamma(rho)) (Gamma(beta) n Gamma(n beta) / ((n+1) Gamma((n+1) beta)))^(1/q*)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return _saturating_exp(log_ratio(params, n))[0]


def wendel_terms(beta: float, n) -> tuple[np.ndarray, np.ndarray]:
    """B_n = n Gamma(n beta) / ((n+1) Gamma((n+1) beta)) and its bound 1/((n+1) beta)^beta."""
    n_arr = np.asarray(n, dtype=float)
    # Gamma(n beta) / Gamma(n beta + beta) as a Pochhammer symbol keeps B_n = bound exact at beta = 1
    B = n_arr / (n_arr + 1.0) / special.poch(n_arr * beta, beta)
    bound = ((n_arr + 1.0) * beta) ** (-beta)
    return B, bound


@dataclass
class ContractionReport:
    params: ContractionParams
    n0: Optional[int]
    C: np.ndarray
    ratio_trace: np.ndarray
    B: np.ndarray
    B_bound: np.ndarray
    saturated: bool = False
    exhausted: bool = False
    truncated: bool = False

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(1, self.C.size + 1)

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        buf.write("n,C_n,ratio,B_n,bound\n")
        for n, c, r, b, bb in zip(self.n_values, self.C, self.ratio_trace, self.B, self.B_bound):
            buf.write(f"{n},{float(c)!r},{float(r)!r},{float(b)!r},{float(bb)!r}\n")
        return buf.getvalue()

    def summary(self) -> str:
        p = self.params
        lines = [
            f"rho = {p.rho!r}",
            f"q = {p.q!r}",
            f"g_norm = {p.g_norm!r}",
            f"T = {p.T!r}",
            f"beta = {p.beta!r}",
            f"q_star = {p.q_star!r}",
            f"n0 = {self.n0 if self.n0 is not None else 'none'}",
        ]
        if self.n0 is not None and not self.truncated:
            lines.append(f"C_n0 = {float(self.C[self.n0 - 1])!r}")
        if self.saturated:
            lines.append("warning: C_n saturated at exp(700) for some n")
        if self.exhausted:
            lines.append("warning: C_n >= 1 up to n = 2^53; n0 not located")
        elif self.truncated:
            lines.append(f"note: traces cut at n = {self.C.size} < n0")
        return "\n".join(lines) + "\n"


def _first_below_one(params: ContractionParams) -> Optional[int]:
    # log C_n = n a - lgamma(n beta + 1)/q* is concave in n, so {n : C_n >= 1}
    # is an initial segment and the first n with C_n < 1 can be bisected
    if log_c_n(params, 1) < 0:
        return 1
    lo, hi = 1, 2
    while log_c_n(params, hi) >= 0:
        if hi >= N0_SEARCH_LIMIT:
            return None
        lo, hi = hi, min(2 * hi, N0_SEARCH_LIMIT)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if log_c_n(params, mid) < 0:
            hi = mid
        else:
            lo = mid
    return hi


def find_n0(params: ContractionParams, n_max: int = 10**6) -> ContractionReport:
    """Smallest n with C_n < 1, with C, ratio and Wendel traces for n = 1..min(n0, n_max).

    n0 itself is located by bisection (log C_n is concave in n), so it is
    exact even beyond ``n_max``; only the traces are cut there, and the
    report is then flagged ``truncated``. Large n are evaluated at extended
    precision, so the integer n0 is exact; past ``N0_SEARCH_LIMIT`` the report
    is flagged ``exhausted``.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    n0 = _first_below_one(params)
    length = n_max if n0 is None else min(n0, n_max)
    ns = np.arange(1, length + 1, dtype=float)
    log_c = np.asarray(log_c_n(params, ns), dtype=float)
    saturated = bool(np.any(log_c > _LOG_SATURATE))
    C = np.exp(np.minimum(log_c, _LOG_SATURATE))
    R = np.exp(np.minimum(np.asarray(log_ratio(params, ns), dtype=float), _LOG_SATURATE))
    B, bound = wendel_terms(params.beta, ns)
    return ContractionReport(
        params=params,
        n0=n0,
        C=C,
        ratio_trace=R,
        B=B,
        B_bound=bound,
        saturated=saturated,
        exhausted=n0 is None,
        truncated=n0 is None or n0 > n_max,
    )


def multiorder_M(alphas: Sequence[float], T: float) -> float:
    """M = sum_j T^(alpha_j - alpha_0) Gamma(alpha_0) / Gamma(alpha_j), alpha_0 = min alpha_j."""
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise DomainError("order vector is empty")
    if any(not 0 < a <= 1 for a in alphas):
        raise DomainError(f"orders must lie in (0, 1], got {alphas}")
    a0 = min(alphas)
    lg0 = log_gamma(a0)
    return float(sum(math.exp((a - a0) * math.log(T) + lg0 - log_gamma(a)) for a in alphas))


class GateStatus(str, enum.Enum):
    OK = "OK"
    BOUNDARY = "BOUNDARY"
    INSUFFICIENT = "INSUFFICIENT"


@dataclass(frozen=True)
class GateResult:
    status: GateStatus
    index: Optional[int] = None
    order: Optional[float] = None
    p: Optional[float] = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status is GateStatus.OK

    def __str__(self) -> str:
        return f"{self.status.value}: {self.message}"


def validity_gate(alphas: Sequence[float], p: float) -> GateResult:
    """Check p > max_j 1/alpha_j (or the classical case p = 1, all alpha_j = 1).

    A rejection names the first offending order. BOUNDARY means
    alpha_j * p = 1 within 1e-12: existence may fail there. INSUFFICIENT means
    p is too small outright.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise DomainError("order vector is empty")
    if any(not 0 < a <= 1 for a in alphas):
        raise DomainError(f"orders must lie in (0, 1], got {alphas}")
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if p == 1 and all(a == 1.0 for a in alphas):
        return GateResult(GateStatus.OK, p=p, message="classical case: all orders 1, p = 1 admissible")
    for j, a in enumerate(alphas):
        if math.isinf(p):
            continue
        if abs(a * p - 1.0) <= BOUNDARY_TOL:
            return GateResult(
                GateStatus.BOUNDARY, j, a, p,
                f"order alpha_{j + 1} = {a} equals 1/p = {1.0 / p}: at the boundary order a "
                "solution may not exist (J^(1/p) of an L^p function can be unbounded)",
            )
    for j, a in enumerate(alphas):
        if not math.isinf(p) and a * p < 1.0:
            return GateResult(
                GateStatus.INSUFFICIENT, j, a, p,
                f"order alpha_{j + 1} = {a} needs p > {1.0 / a}, got p = {p}",
            )
    return GateResult(GateStatus.OK, p=p, message=f"p = {p} > max 1/alpha_j = {1.0 / min(alphas)}")
