"""Exact generating-function counts for trimmed geometric sums and max-type
Diophantine equations, with brute-force oracles alongside.

Conventions: ``k`` is the number of summands, ``p`` a prime, ``ell`` the
target value.  A Diophantine equation ``sum_j x_j a_j - b * max_j a_j = ell``
over nonnegative integers is a :class:`DioEquation`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, DivergentCountError, DomainError
from .polynomial import IntPolynomial, one_minus_zpow


# --- bounded compositions --------------------------------------------------

def geometric_block(m: int, step: int = 1) -> IntPolynomial:
    """``(1 - z**((m+1)*step)) / (1 - z**step)`` by exact division.

    Equals ``1 + z**step + ... + z**(m*step)``; zero when m = -1.
    """
    if m < -1:
        raise ValueError("m must be >= -1")
    return one_minus_zpow((m + 1) * step).exact_div(one_minus_zpow(step))


def bounded_compositions(ell: int, k: int, m: int) -> int:
    """Number of ``(a_1..a_k)`` in N0^k with sum ``ell`` and every part ``<= m``."""
    if ell < 0 or k < 1 or m < -1:
        raise DomainError(f"need ell >= 0, k >= 1, m >= -1; got {ell}, {k}, {m}")
    return geometric_block(m).pow_trunc(k, ell)[ell]


def bounded_compositions_exact_max(ell: int, k: int, m: int) -> int:
    """Same count restricted to tuples whose largest part is exactly ``m``."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    return bounded_compositions(ell, k, m) - bounded_compositions(ell, k, m - 1)


# --- trimmed sum of geometric laws ----------------------------------------

@dataclass(frozen=True)
class PgfValue:
    k: int
    p: int
    t: float
    value: float


def _check_kp(k, p):
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if p < 2:
        raise DomainError(f"p must be a prime >= 2, got {p}")


def zk_pgf(k: int, p: int, t: float) -> PgfValue:
    """``E t**Z`` where Z is the sum of k iid Geometric(1/p) laws minus their max.

    The rational closed form has a removable singularity at ``t = p`` where
    ``1 - t/p`` vanishes; within a quarter of it the defining series
    ``(1-1/p)^k sum_m t^-m (S_m(t/p)^k - S_{m-1}(t/p)^k)`` is summed instead.
    """
    _check_kp(k, p)
    t = float(t)
    if abs(t) > p:
        raise DomainError(f"|t| must be <= p = {p}, got t = {t}")
    if k == 1:
        return PgfValue(k, p, t, 1.0)
    u = t / p
    if abs(1.0 - u) < 0.25:
        value = _zk_pgf_series(k, p, t)
    else:
        acc = []
        for j in range(1, k + 1):
            den = 1.0 - t ** (j - 1) / p**j
            assert abs(den) >= 0.5, "denominator must stay away from 0 for |t| <= p"
            acc.append(math.comb(k, j) * (-1) ** (j - 1) * (1.0 - u**j) / den)
        value = (1.0 - 1.0 / p) ** k * (1.0 - u) ** (-k) * math.fsum(acc)
    return PgfValue(k, p, t, value)


def _zk_pgf_series(k, p, t):
    u = t / p
    terms = []
    prev = 0.0  # S_{-1}
    s_m = 0.0
    um = 1.0
    tm = 1.0
    for m in range(0, 10_000):
        s_m += um
        cur = s_m**k
        term = (cur - prev) / tm
        terms.append(term)
        if m > 8 and abs(term) < 1e-18 * abs(terms[0]):
            break
        prev = cur
        um *= u
        tm *= t
    return (1.0 - 1.0 / p) ** k * math.fsum(terms)


def _series_inv_one_minus(c: Fraction, step: int, n: int) -> list:
    """Coefficients of ``1 / (1 - c t**step)`` up to ``t**n``."""
    out = [Fraction(0)] * (n + 1)
    power = Fraction(1)
    for i in range(0, n + 1, step):
        out[i] = power
        power *= c
    return out


def _series_mul(a: list, b: list, n: int) -> list:
    out = [Fraction(0)] * (n + 1)
    for i, ai in enumerate(a[: n + 1]):
        if ai:
            for j in range(0, n + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
    return out


def zk_pgf_series(k: int, p: int, ell_max: int) -> list[Fraction]:
    """Exact Taylor coefficients at t = 0 of the closed-form PGF of Z.

    Coefficient ``ell`` is P{Z = ell}.  Built from the rational closed form
    term by term, independently of :func:`zk_distribution`.
    """
    _check_kp(k, p)
    n = ell_max
    inv_p = Fraction(1, p)
    # (1 - t/p)^-k
    lead = [Fraction(math.comb(i + k - 1, k - 1)) * inv_p**i for i in range(n + 1)]
    inner = [Fraction(0)] * (n + 1)
    for j in range(1, k + 1):
        sign = math.comb(k, j) * (-1) ** (j - 1)
        num = [Fraction(0)] * (n + 1)
        num[0] = Fraction(1)
        if j <= n:
            num[j] -= inv_p**j
        if j == 1:
            den = [Fraction(1) / (1 - inv_p)] + [Fraction(0)] * n
        else:
            den = _series_inv_one_minus(inv_p**j, j - 1, n)
        for i, c in enumerate(_series_mul(num, den, n)):
            inner[i] += sign * c
    scale = (1 - inv_p) ** k
    return [scale * c for c in _series_mul(lead, inner, n)]


def zk_distribution(k: int, p: int, ell_max: int, exp_cap: int, exact: bool = False):
    """P{Z = ell} for ell = 0..ell_max by dynamic programming over (sum - max, max).

    Each geometric is truncated at ``exp_cap``, so masses are lower bounds and
    the total deficit is at most ``k * p**-(exp_cap + 1)``.  With ``exact`` the
    masses are Fractions, otherwise a float array.
    """
    _check_kp(k, p)
    if exp_cap < ell_max + 1:
        raise DomainError("exp_cap must be >= ell_max + 1")
    one = Fraction(1) if exact else 1.0
    q = one / p
    weights = [(one - q) * q**g for g in range(exp_cap + 1)]
    # state: (trimmed sum so far, running max) -> probability
    states = {(0, g): w for g, w in enumerate(weights)}
    for _ in range(k - 1):
        nxt = {}
        for (ell, m), w in states.items():
            for g, wg in enumerate(weights):
                ell2 = ell + min(m, g)
                if ell2 > ell_max:
                    # min(m, g) grows with g until g reaches m
                    if g >= m:
                        break
                    continue
                key = (ell2, max(m, g))
                nxt[key] = nxt.get(key, 0) + w * wg
        states = nxt
    masses = [0 * one] * (ell_max + 1)
    for (ell, _), w in sorted(states.items()):
        masses[ell] += w
    return masses if exact else np.array(masses, dtype=float)


# --- max-type Diophantine equation -----------------------------------------

@dataclass(frozen=True)
class DioEquation:
    """``sum_j x[j] * a_j - b * max_j a_j = ell`` over ``a`` in N0^k."""

    x: tuple
    b: int

    def __post_init__(self):
        x = tuple(int(v) for v in self.x)
        object.__setattr__(self, "x", x)
        if not x or min(x) < 1 or self.b < 1:
            raise DomainError(f"need k >= 1, every x_j >= 1 and b >= 1; got x={x}, b={self.b}")

    @property
    def k(self) -> int:
        return len(self.x)

    @property
    def is_finite(self) -> bool:
        return min(self.x) > self.b

    def require_finite(self):
        if not self.is_finite:
            raise DivergentCountError(
                f"finiteness predicate min(x) > b fails for x={self.x}, b={self.b}: "
                "some ell has infinitely many solutions"
            )

    def value(self, a: Sequence[int]) -> int:
        return sum(xj * aj for xj, aj in zip(self.x, a)) - self.b * max(a)


def dio_counts_bruteforce(eq: DioEquation, ell_max: int) -> list[int]:
    """Enumerate every tuple with ``max a_j <= ell_max / (min x - b)`` and tally."""
    eq.require_finite()
    bound = ell_max // (min(eq.x) - eq.b)
    axis = np.arange(bound + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * eq.k), indexing="ij", sparse=True)
    total = sum(xj * g for xj, g in zip(eq.x, grids))
    top = grids[0]
    for g in grids[1:]:
        top = np.maximum(top, g)
    values = np.broadcast_to(total - eq.b * top, (bound + 1,) * eq.k).ravel()
    values = values[values <= ell_max]
    if values.size and values.min() < 0:
        raise ConsistencyError("negative value under the finiteness predicate")
    return [int(c) for c in np.bincount(values, minlength=ell_max + 1)]


def dio_count_bruteforce(eq: DioEquation, ell: int) -> int:
    if ell < 0:
        raise DomainError("ell must be >= 0")
    eq.require_finite()
    bound = ell // (min(eq.x) - eq.b)
    return sum(
        1 for a in itertools.product(range(bound + 1), repeat=eq.k) if eq.value(a) == ell
    )


def dio_gf_coeffs(eq: DioEquation, ell_max: int) -> list[int]:
    """Counts q_0..q_ell_max from the generating function

        sum_m t^(-b m) * (prod_j G_m(t^x_j) - prod_j G_{m-1}(t^x_j)),
        G_m(z) = (1 - z^(m+1)) / (1 - z),

    expanded exactly.  The block for max = m starts at degree
    ``m * (min x - b)``, so blocks past ``ceil(ell_max / (min x - b))`` are skipped.
    """
    eq.require_finite()
    if ell_max < 0:
        raise DomainError("ell_max must be >= 0")
    gap = min(eq.x) - eq.b
    m_top = -(-ell_max // gap)
    q = [0] * (ell_max + 1)
    for m in range(m_top + 1):
        cap = ell_max + eq.b * m
        upto_m = _block_product(eq.x, m, cap)
        below_m = _block_product(eq.x, m - 1, cap)
        block, principal = (upto_m - below_m).laurent_shift(-eq.b * m)
        if principal:
            raise ConsistencyError(
                f"negative-degree terms {principal.coeffs} did not cancel at m={m}"
            )
        for ell in range(ell_max + 1):
            q[ell] += block[ell]
    return q


def _block_product(x, m, cap):
    out = IntPolynomial.one()
    for xj in x:
        out = out.mul_trunc(geometric_block(m, xj), cap)
    return out


def alpha_counts(r: int, k: int, ell_max: int) -> list[int]:
    """Solutions of ``(r+1)(l_1+...+l_k) - r max(l) = ell`` for ell = 0..ell_max."""
    if r < 1:
        raise DivergentCountError(f"r must be >= 1 for finitely many solutions, got {r}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return dio_gf_coeffs(DioEquation((r + 1,) * k, r), ell_max)
