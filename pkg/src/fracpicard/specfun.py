"""Special functions: log-gamma, gamma, Mittag-Leffler series, Wendel bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import mpmath
import numpy as np
from scipy import special

from .errors import DomainError, RangeError

# Mittag-Leffler arguments beyond this are rejected: the power series
# cancels catastrophically and no asymptotic branch is implemented.
Z_MAX = 50.0

_ML_RTOL = 1e-15
_ML_MAX_TERMS = 100_000
# Largest admissible series term, as a natural log (double overflow threshold).
_ML_LOG_PEAK_MAX = 709.0


def log_gamma(x):
    """ln Gamma(x) for x > 0 (scalar or array).

    Raises
    ------
    DomainError
        If any argument is not strictly positive.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"log_gamma needs x > 0, got {x!r}")
    out = special.gammaln(arr)
    if out.ndim == 0:
        return float(out)
    return out


def gamma(x: float) -> float:
    """Gamma(x) for 0 < x <= 170; larger arguments overflow and must go through log_gamma."""
    if not x > 0:
        raise DomainError(f"gamma needs x > 0, got {x!r}")
    if x > 170.0:
        raise RangeError(f"gamma({x}) overflows double precision; use log_gamma")
    return math.gamma(x)


@dataclass(frozen=True)
class MLParams:
    """Arguments of the two-parameter Mittag-Leffler function E_{alpha,beta}(z)."""

    alpha: float
    beta: float
    z: float

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"Mittag-Leffler alpha must be > 0, got {self.alpha}")
        if not self.beta > 0:
            raise DomainError(f"Mittag-Leffler beta must be > 0, got {self.beta}")
        if not math.isfinite(self.z):
            raise RangeError(f"Mittag-Leffler argument must be finite, got {self.z}")
        if abs(self.z) > Z_MAX:
            raise RangeError(f"|z| = {abs(self.z)} exceeds Z_MAX = {Z_MAX}")


def _log_term(k: int, alpha: float, beta: float, logz: float) -> float:
    return k * logz - math.lgamma(alpha * k + beta)


def _peak_index(alpha: float, beta: float, absz: float) -> tuple[int, float]:
    """Index and natural log of the largest series term |z|^k / Gamma(alpha k + beta)."""
    if absz == 0.0:
        return 0, -math.lgamma(beta)
    logz = math.log(absz)
    # Terms are log-concave in k once alpha k + beta > ~1.5; scan until they turn down.
    best_k, best = 0, _log_term(0, alpha, beta, logz)
    k = 1
    while True:
        val = _log_term(k, alpha, beta, logz)
        if val > best:
            best_k, best = k, val
            if best > _ML_LOG_PEAK_MAX:
                break
        elif alpha * k + beta > 2.0 and k > best_k + 2:
            break
        k += 1
    return best_k, best


@lru_cache(maxsize=64)
def _ml_coefficients(alpha: float, beta: float, dps: int, count: int) -> tuple:
    with mpmath.workdps(dps):
        a = mpmath.mpf(alpha)
        b = mpmath.mpf(beta)
        return tuple(mpmath.rgamma(a * k + b) for k in range(count))


def _terms_needed(alpha: float, beta: float, absz: float, k_peak: int, log_peak: float) -> int:
    """Index past the peak where terms fall ~40 digits below the peak and below 1e-20."""
    if absz == 0.0:
        return 2
    logz = math.log(absz)
    floor = min(log_peak - 40 * math.log(10.0), -20 * math.log(10.0))
    k = k_peak + 1
    while _log_term(k, alpha, beta, logz) > floor:
        k += 1
    return k + 2


def _ml_series(alpha: float, beta: float, z: float) -> float:
    absz = abs(z)
    k_peak, log_peak = _peak_index(alpha, beta, absz)
    if log_peak > _ML_LOG_PEAK_MAX:
        raise RangeError(
            f"E_{{{alpha},{beta}}}({z}): series terms overflow double precision; "
            "argument too large for the power series"
        )
    # Enough digits to absorb cancellation between terms of size exp(log_peak).
    dps = 25 + max(0, int(math.ceil(log_peak / math.log(10.0))))
    needed = _terms_needed(alpha, beta, absz, k_peak, log_peak)
    if needed > _ML_MAX_TERMS:
        raise RangeError(f"Mittag-Leffler series needs {needed} terms at z={z}")
    count = 64
    while count < needed + 1:
        count *= 2
    coeffs = _ml_coefficients(alpha, beta, dps, count)
    with mpmath.workdps(dps):
        zz = mpmath.mpf(z)
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        for k in range(count - 1):
            total += power * coeffs[k]
            power *= zz
            if k >= k_peak and abs(power * coeffs[k + 1]) < _ML_RTOL * (1 + abs(total)):
                break
        return float(total)


def mittag_leffler(params: MLParams) -> float:
    """E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta) by direct summation.

    The series is accumulated with enough working precision to absorb the
    cancellation between its largest terms, and truncated once the next term
    drops below 1e-15 * (1 + |partial sum|).

    >>> round(mittag_leffler(MLParams(1.0, 1.0, 1.0)), 12)
    2.718281828459
    """
    return _ml_series(params.alpha, params.beta, params.z)


def mittag_leffler_many(alpha: float, beta: float, z) -> np.ndarray:
    """Vectorised :func:`mittag_leffler` over an array of real arguments."""
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty_like(zs)
    for i, zi in enumerate(zs.flat):
        out.flat[i] = mittag_leffler(MLParams(alpha, beta, float(zi)))
    return out.reshape(np.shape(z))


class WendelBounds(NamedTuple):
    lower: float
    ratio: float
    upper: float


def wendel_check(x: float, a: float) -> WendelBounds:
    """Both sides of (x/(x+a))^(1-a) <= Gamma(x+a) / (x^a Gamma(x)) <= 1.

    The middle term uses the Pochhammer symbol, which stays accurate for
    large x where differencing log-gammas would lose digits.
    """
    if not x > 0:
        raise DomainError(f"wendel_check needs x > 0, got {x}")
    if not 0 < a <= 1:
        raise DomainError(f"wendel_check needs 0 < a <= 1, got {a}")
    lower = math.exp((1.0 - a) * (math.log(x) - math.log(x + a)))
    ratio = float(special.poch(x, a)) / x**a
    return WendelBounds(lower, ratio, 1.0)
