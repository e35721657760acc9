"""Limit constants as Euler products over primes.

``C(r, k) = prod_p F_{r,k}(1/p)`` with the univariate rational factor

    F_{r,k}(x) = ((1-x)/(1-x^(r+1)))^k * sum_{j=1..k} C(k,j) (-1)^(j-1)
                 * (1 - x^(j(r+1))) / (1 - x^((j-1)(r+1)+1)).

Truncated products carry a heuristic tail estimate: every log-factor used
here is O(p^-2), so ``c = max |log F(1/p)| p^2`` over the last decade of
primes times ``sum_{p>P} p^-2 <= 1/(P (log P - 1))`` bounds the remainder if
the decay has already set in.  This is labelled ``heuristic`` in ``detail``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .arith import zeta_int
from .errors import DomainError, PrecisionError
from .primes import MAX_SIEVE_LIMIT, primes_up_to

START_PRIME_LIMIT = 10**4
BLOCK = 1 << 16


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    error_estimate: float
    method: str  # "euler-product" | "closed-form" | "monte-carlo"
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.error_estimate) and self.error_estimate >= 0):
            raise ValueError(f"error estimate must be finite and >= 0, got {self.error_estimate}")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "method": self.method,
            "detail": dict(self.detail),
        }


@dataclass(frozen=True)
class ConstantQuery:
    r: int
    k: int
    tol: float = 1e-8
    prime_limit: int | None = None

    def __post_init__(self):
        if self.r < 1 or self.k < 1:
            raise DomainError(f"r and k must be >= 1, got r={self.r}, k={self.k}")
        if not self.tol > 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")


def _check_rk(r, k):
    if r < 1 or k < 1:
        raise DomainError(f"r and k must be >= 1, got r={r}, k={k}")


def f_rk(r: int, k: int, x: float) -> float:
    """Local factor F_{r,k}(x), evaluated literally from the rational form."""
    _check_rk(r, k)
    if not 0 <= x < 1:
        raise DomainError(f"x must lie in [0, 1), got {x}")
    s = r + 1
    acc = math.fsum(
        math.comb(k, j) * (-1) ** (j - 1) * (1 - x ** (j * s)) / (1 - x ** ((j - 1) * s + 1))
        for j in range(1, k + 1)
    )
    return ((1 - x) / (1 - x**s)) ** k * acc


def log_f_rk(r: int, k: int, x: np.ndarray) -> np.ndarray:
    """``log F_{r,k}(x)`` for an array of x, rearranged to avoid cancellation.

    Each ratio ``(1-x^a)/(1-x^b)`` is written as ``1 + (x^b - x^a)/(1 - x^b)``
    so the alternating sum is accumulated as a small correction to 1.
    """
    _check_rk(r, k)
    x = np.asarray(x, dtype=float)
    s = r + 1
    excess = np.zeros_like(x)
    for j in range(1, k + 1):
        a = j * s
        b = (j - 1) * s + 1
        xb = x**b
        excess += math.comb(k, j) * (-1) ** (j - 1) * (xb - x**a) / (1 - xb)
    return k * (np.log1p(-x) - np.log1p(-(x**s))) + np.log1p(excess)


def _log_c3_factor(r: int, x: np.ndarray) -> np.ndarray:
    return 2 * np.log1p(-x) + np.log1p(2 * x + 2 * x ** (r + 2) + x ** (r + 3))


def _ordered_sum(values: np.ndarray) -> float:
    """Blockwise exactly-rounded sums combined in block order."""
    partial = [math.fsum(values[i : i + BLOCK].tolist()) for i in range(0, values.size, BLOCK)]
    return math.fsum(partial)


def _tail_estimate(primes: np.ndarray, logs: np.ndarray, limit: int) -> tuple[float, float]:
    decade = primes > limit / 10
    c = float(np.max(np.abs(logs[decade]) * primes[decade].astype(float) ** 2)) if decade.any() else 0.0
    return c, c / (limit * (math.log(limit) - 1))


def euler_product(
    log_factor: Callable[[np.ndarray], np.ndarray],
    tol: float,
    prime_limit: int | None = None,
    max_prime_limit: int = MAX_SIEVE_LIMIT,
    start: int = START_PRIME_LIMIT,
) -> EstimateWithError:
    """``prod_{p <= P} exp(log_factor(1/p))`` with P fixed or doubled until the
    tail estimate drops below ``tol / 2``.

    Returns the product and the tail estimate (scaled by the product, since
    the tail is a relative correction).  Raises PrecisionError carrying the
    best estimate when the cap is reached first.
    """
    limit = prime_limit if prime_limit is not None else start
    while True:
        primes = primes_up_to(limit)
        logs = log_factor(1.0 / primes.astype(float))
        total = _ordered_sum(logs)
        value = math.exp(total)
        c, tail = _tail_estimate(primes, logs, limit)
        err = value * math.expm1(tail)
        detail = {
            "prime_limit": int(limit),
            "primes_used": int(primes.size),
            "tail_model": "heuristic: c * sum_{p>P} p^-2 <= c / (P (log P - 1))",
            "tail_constant": c,
            "log_sum": total,
        }
        est = EstimateWithError(value, err, "euler-product", detail)
        if prime_limit is not None or err < tol / 2:
            return est
        if limit >= max_prime_limit:
            raise PrecisionError(
                f"tail estimate {err:.3g} still above tol/2 = {tol / 2:.3g} at prime limit {limit}",
                best=est,
            )
        limit = min(2 * limit, max_prime_limit)


@lru_cache(maxsize=64)
def c_rk(query: ConstantQuery) -> EstimateWithError:
    """``C(r, k) = E R_k^r`` as an Euler product of F_{r,k}(1/p)."""
    r, k = query.r, query.k
    if k == 1:
        return EstimateWithError(1.0, 0.0, "euler-product", {"prime_limit": 0, "note": "every factor is 1"})
    est = euler_product(lambda x: log_f_rk(r, k, x), query.tol, query.prime_limit)
    return EstimateWithError(est.value, est.error_estimate, est.method, {"r": r, "k": k, **est.detail})


def c_r2_closed(r: int) -> float:
    """``zeta(r+2) / zeta(2)``."""
    _check_rk(r, 2)
    return zeta_int(r + 2) / zeta_int(2)


def c_r3_closed(r: int, tol: float = 1e-8, prime_limit: int | None = None) -> EstimateWithError:
    """``zeta(r+2) zeta(2r+3) prod_p (1-1/p)^2 (1 + 2/p + 2/p^(r+2) + 1/p^(r+3))``."""
    _check_rk(r, 3)
    est = euler_product(lambda x: _log_c3_factor(r, x), tol, prime_limit)
    zetas = zeta_int(r + 2) * zeta_int(2 * r + 3)
    return EstimateWithError(
        zetas * est.value,
        zetas * est.error_estimate,
        "closed-form",
        {"r": r, "k": 3, "zeta_factor": zetas, **est.detail},
    )


def coprime_density(k: int) -> float:
    """Limiting probability that k uniform integers have gcd 1."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    return 1.0 / zeta_int(k)


def limit_moment(r: int, k: int, tol: float = 1e-8, prime_limit: int | None = None) -> EstimateWithError:
    """``lim E (L_n(k)/n^k)^r = (r+1)^-k C(r, k)``."""
    c = c_rk(ConstantQuery(r, k, tol, prime_limit))
    scale = float(r + 1) ** -k
    return EstimateWithError(c.value * scale, c.error_estimate * scale, c.method, {**c.detail, "scale": scale})
