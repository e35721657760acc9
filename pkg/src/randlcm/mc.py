"""Seeded Monte Carlo for L_n(k), f(L_n(k)), and the limit variables.

Random numbers come from numpy's PCG64.  Work is cut into fixed-size blocks;
block ``i`` of a run with seed ``s`` draws from ``SeedSequence(s,
spawn_key=(i,))``, so the output depends only on (seed, block size), never on
how many workers process the blocks.

Limit variables are products over primes ``p <= P`` of independent
Geometric(1/p) families.  The batch samplers draw only the nonzero
geometrics: the gaps between successes of the Bernoulli(1/p) events
``G >= 1`` are geometric, and by memorylessness each success carries
``1 + G'`` with ``G'`` a fresh copy.  Every geometric is drawn by inversion.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numba
import numpy as np

from . import arith
from .arith import MultiplicativeFnSpec
from .errors import CapacityError, DomainError
from .primes import MAX_SIEVE_LIMIT, SpfTable, factorize, primes_up_to, shared_spf

RNG_ALGORITHM = "numpy PCG64; block i of stream s seeded by SeedSequence(seed, spawn_key=(i,) if s == 0 else (s, i))"
BLOCK_SIZE = 1 << 16
DEFAULT_PRIME_LIMIT = 10**5
KS_THRESHOLD = 1.95
# largest number of distinct prime factors of an integer below 10**8
_MAX_OMEGA = 8


def block_rng(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    key = (block,) if stream == 0 else (stream, block)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class SamplerConfig:
    k: int
    samples: int
    seed: int = 42
    n: int | None = None
    prime_limit: int = DEFAULT_PRIME_LIMIT
    f_name: str | None = None
    r: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if self.samples < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples}")
        if self.n is not None and self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.prime_limit < 2:
            raise DomainError(f"prime_limit must be >= 2, got {self.prime_limit}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    def spec(self) -> MultiplicativeFnSpec:
        return arith.resolve(self.f_name or "identity")

    def growth(self) -> float:
        return self.spec().growth_r if self.r is None else float(self.r)


@dataclass
class MomentReport:
    mean: float
    std_error: float
    samples: int
    target: float | None = None
    z_score: float | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def within(self, sigmas: float, allowance: float = 0.0) -> bool:
        if self.target is None:
            raise ValueError("no target attached")
        return abs(self.mean - self.target) <= sigmas * self.std_error + allowance


# --- single draws ----------------------------------------------------------

def sample_geometric(p: float, rng: np.random.Generator) -> int:
    """One draw of P{G = j} = (1 - 1/p) p^-j by inversion."""
    if p < 2:
        raise DomainError(f"p must be >= 2, got {p}")
    u = 1.0 - rng.random()  # (0, 1]
    return int(math.floor(math.log(u) / -math.log(p)))


def _geometrics(p: np.ndarray, size, rng: np.random.Generator) -> np.ndarray:
    u = 1.0 - rng.random(size)
    return np.floor(np.log(u) / -np.log(p)).astype(np.int64)


def _check_n(n: int, table: SpfTable | None) -> SpfTable | None:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > MAX_SIEVE_LIMIT or (table is not None and n > table.limit):
        raise CapacityError(f"n = {n} exceeds the sieve capacity")
    if n == 1:
        return table
    return table if table is not None else shared_spf(n)


def sample_f_ratio(
    spec: MultiplicativeFnSpec, r: float, n: int, k: int, rng: np.random.Generator,
    table: SpfTable | None = None,
) -> float:
    """``f(lcm(X_1..X_k)) / n^(r k)`` for X_j uniform on 1..n, via factorizations."""
    table = _check_n(n, table)
    xs = rng.integers(1, n + 1, size=k)
    fz = arith.lcm_of([factorize(int(m), table) for m in xs]) if n > 1 else ()
    sign = 1.0
    logs = []
    for p, e in fz:
        v = float(spec.at(p, e))
        if v == 0.0:
            return 0.0
        sign = -sign if v < 0 else sign
        logs.append(float(spec.log_abs_at(p, e)))
    logs.append(-r * k * math.log(n))
    return sign * math.exp(math.fsum(logs))


def sample_Ln_ratio(n: int, k: int, rng: np.random.Generator, table: SpfTable | None = None) -> float:
    """``lcm(X_1..X_k) / n^k``, in (0, 1]."""
    return sample_f_ratio(arith.resolve("identity"), 1.0, n, k, rng, table)


def sample_limit_f(
    spec: MultiplicativeFnSpec, r: float, k: int, prime_limit: int, rng: np.random.Generator
) -> float:
    """``prod_{p<=P} f(p^max_j G_j(p)) / p^(r sum_j G_j(p))``, drawing all k geometrics per prime."""
    primes = primes_up_to(prime_limit)
    g = _geometrics(primes[:, None].astype(float), (primes.size, k), rng)
    return float(_combine_prime_terms(spec, r, primes, g.max(axis=1), g.sum(axis=1)))


def sample_Rk(k: int, prime_limit: int, rng: np.random.Generator) -> float:
    """``prod_{p<=P} p^(max_j G_j(p) - sum_j G_j(p))``."""
    return sample_limit_f(arith.resolve("identity"), 1.0, k, prime_limit, rng)


def sample_Yinf(k: int, prime_limit: int, rng: np.random.Generator) -> float:
    rk = sample_Rk(k, prime_limit, rng)
    u = 1.0 - rng.random(k)
    return rk * float(np.prod(u))


def _combine_prime_terms(spec, r, primes, top, total) -> float:
    hit = total > 0
    p, top, total = primes[hit], top[hit], total[hit]
    vals = np.asarray(spec.at(p, top), dtype=float)
    if np.any(vals == 0):
        return 0.0
    sign = -1.0 if np.count_nonzero(vals < 0) % 2 else 1.0
    terms = _prime_terms(spec, r, p, top, total)
    return sign * math.exp(math.fsum(terms.tolist()))


def _prime_terms(spec, r, p, top, total) -> np.ndarray:
    # shared by the scalar and batch paths so identity/r=1 reduces to R_k exactly
    logp = np.log(p.astype(float)) if isinstance(p, np.ndarray) else math.log(p)
    return np.asarray(spec.log_abs_at(p, top), dtype=float) - r * total * logp


# --- batch draws -----------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _lcm_rows(xs, spf, width):
    rows, k = xs.shape
    ps = np.zeros((rows, width), np.int64)
    es = np.zeros((rows, width), np.int64)
    for i in range(rows):
        used = 0
        for j in range(k):
            m = xs[i, j]
            while m > 1:
                p = spf[m]
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                slot = -1
                for t in range(used):
                    if ps[i, t] == p:
                        slot = t
                        break
                if slot < 0:
                    ps[i, used] = p
                    es[i, used] = e
                    used += 1
                elif e > es[i, slot]:
                    es[i, slot] = e
    return ps, es


def lcm_factor_rows(xs: np.ndarray, table: SpfTable) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise lcm factorization of an (N, k) integer array.

    Returns padded (primes, exponents) arrays of width ``8 k``; unused slots
    hold prime 0 and exponent 0.  Each exponent is the maximum over the row.
    """
    xs = np.ascontiguousarray(xs, dtype=np.int64)
    if xs.size and xs.max() > table.limit:
        raise CapacityError(f"{xs.max()} exceeds the sieve limit {table.limit}")
    return _lcm_rows(xs, table.spf, _MAX_OMEGA * xs.shape[1])


def f_ratio_batch(
    spec: MultiplicativeFnSpec, r: float, n: int, k: int, count: int, rng: np.random.Generator,
    table: SpfTable | None = None,
) -> np.ndarray:
    table = _check_n(n, table)
    xs = rng.integers(1, n + 1, size=(count, k))
    if n == 1:
        return np.ones(count)
    ps, es = lcm_factor_rows(xs, table)
    used = es > 0
    safe_p = np.where(used, ps, 2)
    safe_e = np.where(used, es, 1)
    vals = np.where(used, np.asarray(spec.at(safe_p, safe_e), dtype=float), 1.0)
    with np.errstate(divide="ignore"):
        logs = np.where(used, np.asarray(spec.log_abs_at(safe_p, safe_e), dtype=float), 0.0)
    zero = np.any(vals == 0, axis=1)
    sign = np.where(np.count_nonzero(vals < 0, axis=1) % 2 == 1, -1.0, 1.0)
    logs = np.where(zero[:, None], 0.0, logs)
    out = sign * np.exp(logs.sum(axis=1) - r * k * math.log(n))
    out[zero] = 0.0
    return out


def ln_ratio_batch(n: int, k: int, count: int, rng: np.random.Generator, table: SpfTable | None = None) -> np.ndarray:
    return f_ratio_batch(arith.resolve("identity"), 1.0, n, k, count, rng, table)


def _sparse_hits(p: int, cells: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Cells (in 0..cells-1, ascending) whose Geometric(1/p) draw is >= 1, and their values."""
    log_q = math.log1p(-1.0 / p)
    expect = cells / p
    chunk = int(expect + 6 * math.sqrt(expect) + 16)
    pos_parts = []
    start = -1
    while True:
        u = 1.0 - rng.random(chunk)
        gaps = np.floor(np.log(u) / log_q).astype(np.int64)
        pos = start + np.cumsum(gaps + 1)
        if pos[-1] >= cells:
            pos_parts.append(pos[pos < cells])
            break
        pos_parts.append(pos)
        start = int(pos[-1])
    pos = np.concatenate(pos_parts)
    vals = 1 + _geometrics(float(p), pos.size, rng)
    return pos, vals


def limit_f_batch(
    spec: MultiplicativeFnSpec, r: float, k: int, prime_limit: int, count: int, rng: np.random.Generator,
    primes: np.ndarray | None = None,
) -> np.ndarray:
    """``count`` independent copies of the truncated limit product."""
    if primes is None:
        primes = primes_up_to(prime_limit)
    logs = np.zeros(count)
    sign = np.ones(count)
    zero = np.zeros(count, dtype=bool)
    for p in primes.tolist():
        cells, g = _sparse_hits(p, count * k, rng)
        if cells.size == 0:
            continue
        rows = cells // k
        starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
        who = rows[starts]
        total = np.add.reduceat(g, starts)
        top = np.maximum.reduceat(g, starts)
        vals = np.asarray(spec.at(p, top), dtype=float)
        if np.any(vals <= 0):
            zero[who[vals == 0]] = True
            sign[who[vals < 0]] *= -1
        with np.errstate(divide="ignore"):
            logs[who] += _prime_terms(spec, r, p, top, total)
    out = sign * np.exp(np.where(zero, 0.0, logs))
    out[zero] = 0.0
    return out


def rk_batch(k: int, prime_limit: int, count: int, rng: np.random.Generator, primes=None) -> np.ndarray:
    return limit_f_batch(arith.resolve("identity"), 1.0, k, prime_limit, count, rng, primes)


def yinf_batch(k: int, prime_limit: int, count: int, rng: np.random.Generator, primes=None) -> np.ndarray:
    rk = rk_batch(k, prime_limit, count, rng, primes)
    u = 1.0 - rng.random((count, k))
    return rk * np.prod(u, axis=1)


SAMPLERS = ("ln_ratio", "f_ratio", "rk", "yinf", "limit_f")


def draw(
    sampler: str, config: SamplerConfig, workers: int = 1, block_size: int = BLOCK_SIZE, stream: int = 0,
) -> np.ndarray:
    """All ``config.samples`` draws of a named sampler, block-seeded from ``config.seed``."""
    if sampler not in SAMPLERS:
        raise DomainError(f"unknown sampler {sampler!r}; choose from {SAMPLERS}")
    k = config.k
    if sampler in ("ln_ratio", "f_ratio"):
        if config.n is None:
            raise DomainError(f"{sampler} needs n")
        table = _check_n(config.n, None)
        spec = config.spec() if sampler == "f_ratio" else arith.resolve("identity")
        r = config.growth() if sampler == "f_ratio" else 1.0

        def job(rng, count):
            return f_ratio_batch(spec, r, config.n, k, count, rng, table)
    else:
        primes = primes_up_to(config.prime_limit)
        if sampler == "rk":
            def job(rng, count):
                return rk_batch(k, config.prime_limit, count, rng, primes)
        elif sampler == "yinf":
            def job(rng, count):
                return yinf_batch(k, config.prime_limit, count, rng, primes)
        else:
            spec, r = config.spec(), config.growth()

            def job(rng, count):
                return limit_f_batch(spec, r, k, config.prime_limit, count, rng, primes)
    return run_blocks(job, config.samples, config.seed, workers, block_size, stream)


def run_blocks(
    job: Callable[[np.random.Generator, int], np.ndarray],
    samples: int, seed: int, workers: int = 1, block_size: int = BLOCK_SIZE, stream: int = 0,
) -> np.ndarray:
    sizes = [min(block_size, samples - start) for start in range(0, samples, block_size)]

    def one(i):
        return job(block_rng(seed, i, stream), sizes[i])

    if workers <= 1 or len(sizes) == 1:
        parts = [one(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    return np.concatenate(parts) if parts else np.empty(0)


# --- statistics --------------------------------------------------------------

def summarize(values: np.ndarray, target: float | None = None, detail: dict | None = None) -> MomentReport:
    """Mean and standard error with exactly rounded (order-independent) sums."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        raise DomainError("no samples")
    as_list = values.tolist()
    mean = math.fsum(as_list) / n
    if n > 1:
        var = math.fsum(((values - mean) ** 2).tolist()) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    z = None
    if target is not None and se > 0:
        z = (mean - target) / se
    elif target is not None and mean == target:
        z = 0.0
    return MomentReport(mean, se, n, target, z, dict(detail or {}))


def omitted_prime_bound(k: int, prime_limit: int) -> float:
    """Upper bound ``k^2 sum_{p > P} p^-2`` on the chance that some omitted
    prime changes a truncated limit product."""
    return k * k / (prime_limit * max(math.log(prime_limit) - 1.0, 1.0))


def moment_target(sampler: str, q: int, config: SamplerConfig) -> tuple[float | None, dict]:
    """Theoretical limit of ``E sample^q`` where known, with the exact mean
    of the P-truncated limit variable and the gap between the two."""
    from .euler import ConstantQuery, c_rk

    k = config.k
    power = None
    if sampler in ("ln_ratio", "rk", "yinf"):
        power = q
    elif sampler in ("f_ratio", "limit_f"):
        spec = config.spec()
        g = config.growth()
        if spec.name == "identity" and g == 1.0:
            power = q
        elif spec.name.startswith("power:") and g == spec.growth_r and float(g * q).is_integer():
            power = int(g * q)
    if power is None or power < 1:
        return None, {"target": "none known for this function"}
    uniform = 1.0 if sampler in ("rk", "limit_f") else float(power + 1) ** -k
    full = c_rk(ConstantQuery(power, k, tol=1e-8))
    detail = {
        "target_constant": f"C({power},{k})",
        "target_error": full.error_estimate * uniform,
    }
    if sampler in ("ln_ratio", "f_ratio"):
        return full.value * uniform, detail
    trunc = c_rk(ConstantQuery(power, k, tol=1.0, prime_limit=config.prime_limit))
    detail.update({
        "target_truncated": trunc.value * uniform,
        "truncation_allowance": abs(trunc.value - full.value) * uniform + detail["target_error"],
        "omitted_prime_event_bound": omitted_prime_bound(k, config.prime_limit),
    })
    return full.value * uniform, detail


def estimate_moment(
    sampler: str, q: int, config: SamplerConfig, workers: int = 1, target: float | None = None,
) -> MomentReport:
    """Sample mean and standard error of ``sample**q``; the theoretical target
    is looked up when not supplied."""
    if q < 1:
        raise DomainError(f"q must be a positive integer, got {q}")
    values = draw(sampler, config, workers) ** q
    detail = {"sampler": sampler, "q": q, "rng": RNG_ALGORITHM}
    if target is None:
        target, extra = moment_target(sampler, q, config)
        detail.update(extra)
    return summarize(values, target, detail)


def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov distance and its sqrt(nm/(n+m)) scaling."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise DomainError("KS needs two non-empty samples")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    return d, d * math.sqrt(a.size * b.size / (a.size + b.size))


def coprime_probability_mc(n: int, k: int, samples: int, seed: int = 42, workers: int = 1) -> MomentReport:
    """Frequency of gcd = 1 among k-tuples uniform on 1..n, against 1/zeta(k)."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")

    def job(rng, count):
        xs = rng.integers(1, n + 1, size=(count, k))
        return (np.gcd.reduce(xs, axis=1) == 1).astype(float)

    hits = run_blocks(job, samples, seed, workers)
    target = 1.0 / arith.zeta_int(k)
    return summarize(hits, target, {"rng": RNG_ALGORITHM, "target_constant": f"1/zeta({k})"})


# --- three-series diagnostics ---------------------------------------------

@dataclass
class SeriesDiagnostics:
    A: float
    checkpoints: list
    partial_sums: dict  # "a".."d" -> cumulative values at each checkpoint
    terms_counted: list
    zero_primes: list

    def to_dict(self) -> dict:
        return asdict(self)


def default_checkpoints(prime_limit: int) -> list[int]:
    pts = []
    c = 10
    while c < prime_limit:
        pts.append(c)
        c *= 10
    pts.append(prime_limit)
    return pts


def three_series_diagnostics(
    spec: MultiplicativeFnSpec, r: float, A: float, prime_limit: int, checkpoints=None,
) -> SeriesDiagnostics:
    """Partial sums over primes of the three-series quantities for
    ``B_p = log(|f(p)| / p^r)``:

    (a) 1{|B| >= A}/p, (b) B 1{|B| <= A}/p, (c) B^2 1{|B| <= A}/p, (d) B/p.

    Primes with f(p) = 0 are listed in ``zero_primes`` and left out.
    """
    if not A > 0:
        raise DomainError(f"A must be > 0, got {A}")
    checkpoints = list(checkpoints) if checkpoints is not None else default_checkpoints(prime_limit)
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])) or not checkpoints:
        raise DomainError("checkpoints must be non-empty and strictly increasing")
    primes = primes_up_to(max(prime_limit, checkpoints[-1]))
    with np.errstate(divide="ignore"):
        log_fp = np.asarray(spec.log_abs_at(primes, np.ones_like(primes)), dtype=float)
    zero = log_fp == -np.inf
    b = np.where(zero, 0.0, log_fp - r * np.log(primes.astype(float)))
    inv = np.where(zero, 0.0, 1.0 / primes)
    small = np.abs(b) <= A
    series = {
        "a": np.cumsum(np.where(np.abs(b) >= A, inv, 0.0)),
        "b": np.cumsum(np.where(small, b * inv, 0.0)),
        "c": np.cumsum(np.where(small, b * b * inv, 0.0)),
        "d": np.cumsum(b * inv),
    }
    idx = np.searchsorted(primes, checkpoints, side="right")
    partial = {}
    for name, cum in series.items():
        partial[name] = [float(cum[i - 1]) if i > 0 else 0.0 for i in idx]
    counted = [int(np.count_nonzero(~zero[:i])) for i in idx]
    return SeriesDiagnostics(float(A), [int(c) for c in checkpoints], partial, counted, primes[zero].tolist())
