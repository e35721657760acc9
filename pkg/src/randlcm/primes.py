"""Smallest-prime-factor sieve and factorization of sieved integers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError

MAX_SIEVE_LIMIT = 10**8

# A factorization is a tuple of (prime, exponent) pairs with strictly
# increasing primes; () is the integer 1.
Factorization = tuple


@dataclass(frozen=True, eq=False)
class SpfTable:
    """``spf[m]`` is the smallest prime factor of ``m`` for ``2 <= m <= limit``.

    Entries 0 and 1 are 0.  The array is marked read-only so one table can be
    shared between workers.
    """

    limit: int
    spf: np.ndarray

    def __len__(self):
        return self.limit + 1

    def is_prime(self, m: int) -> bool:
        return 2 <= m <= self.limit and int(self.spf[m]) == m


def build_spf(limit: int, max_limit: int = MAX_SIEVE_LIMIT) -> SpfTable:
    if not isinstance(limit, (int, np.integer)) or limit < 2 or limit > max_limit:
        raise CapacityError(f"sieve limit must lie in [2, {max_limit}], got {limit!r}")
    limit = int(limit)
    dtype = np.int32 if limit < 2**31 else np.int64
    spf = np.zeros(limit + 1, dtype=dtype)
    spf[2::2] = 2
    for p in range(3, math.isqrt(limit) + 1, 2):
        if spf[p]:
            continue
        # only multiples p*q with q odd and >= p are still unmarked candidates
        block = spf[p * p :: 2 * p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest[rest >= 2]] = rest[rest >= 2]
    spf.flags.writeable = False
    return SpfTable(limit, spf)


@lru_cache(maxsize=4)
def shared_spf(limit: int) -> SpfTable:
    """Cached table for callers that repeatedly need the same limit."""
    return build_spf(limit)


def factorize(m: int, table: SpfTable) -> Factorization:
    if m < 1:
        raise ValueError(f"can only factor positive integers, got {m}")
    if m > table.limit:
        raise CapacityError(f"{m} exceeds the sieve limit {table.limit}")
    spf = table.spf
    out = []
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        out.append((p, e))
    return tuple(out)


def from_factorization(fz: Factorization) -> int:
    n = 1
    for p, e in fz:
        n *= p**e
    return n


def primes_up_to(limit: int, table: SpfTable | None = None) -> np.ndarray:
    """Primes ``<= limit`` in ascending order, as an int64 array."""
    if limit < 2:
        raise CapacityError(f"limit must be >= 2, got {limit}")
    if table is not None and table.limit >= limit:
        idx = np.arange(table.limit + 1)
        mask = table.spf == idx
        mask[:2] = False
        return np.flatnonzero(mask[: limit + 1]).astype(np.int64)
    if limit > MAX_SIEVE_LIMIT:
        raise CapacityError(f"limit {limit} exceeds {MAX_SIEVE_LIMIT}")
    # plain odd-only Eratosthenes; cheaper than a full spf table
    is_p = np.ones(limit // 2 + 1, dtype=bool)  # index i <-> 2*i+1
    is_p[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if is_p[i]:
            p = 2 * i + 1
            is_p[p * p // 2 :: p] = False
    odd = 2 * np.flatnonzero(is_p) + 1
    odd = odd[odd <= limit]
    return np.concatenate(([2], odd)).astype(np.int64)
