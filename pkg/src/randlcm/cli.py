"""Command-line front end.

Every run prints one record: the echoed request, the result, the wall time,
the library version and the RNG description.  Exit codes: 0 on success,
2 on usage errors (argparse), 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

from . import __version__, arith, euler, gf, mc
from .errors import RandLcmError
from .serialize import csv_table, dumps, sample_dump

FLOAT_EPS = 2.0**-52


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _common(p: argparse.ArgumentParser, default_format="json"):
    p.add_argument("--format", choices=("json", "csv"), default=default_format)
    p.add_argument("--out", help="write output here instead of stdout")


def _sim(p: argparse.ArgumentParser):
    p.add_argument("--samples", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=_seed, default=42)
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randlcm",
        description="Limit constants, generating functions and Monte Carlo checks "
        "for the lcm of k random integers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("constant", help="C(r,k) as an Euler product, and the limit moment")
    p.add_argument("--r", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--prime-limit", type=int)
    _common(p)

    p = sub.add_parser("closed-form", help="closed forms of C(r,2) and C(r,3)")
    p.add_argument("--r", type=_positive_int, required=True)
    p.add_argument("--k", type=int, choices=(2, 3), required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--prime-limit", type=int)
    _common(p)

    p = sub.add_parser("pgf", help="E t^Z for the trimmed geometric sum Z")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--lmax", type=int, help="also list P{Z = ell} for ell <= lmax")
    _common(p)

    p = sub.add_parser("dio", help="solution counts of sum x_j a_j - b max a_j = ell")
    p.add_argument("--x", type=_int_list)
    p.add_argument("--b", type=int)
    p.add_argument("--r", type=int, help="count the lcm-moment equation: x_j = r+1, b = r")
    p.add_argument("--k", type=_positive_int)
    p.add_argument("--lmax", type=int, required=True)
    _common(p, default_format="csv")

    p = sub.add_parser("compositions", help="compositions of ell into k parts bounded by m")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lmax", type=int, required=True)
    _common(p, default_format="csv")

    p = sub.add_parser("simulate-moments", help="E (f(L_n(k)) / n^(rk))^q by Monte Carlo")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--q", type=_positive_int, default=1)
    p.add_argument("--f", default="identity")
    p.add_argument("--r", type=float)
    _sim(p)
    _common(p)

    p = sub.add_parser("simulate-limit", help="moments of the limit variables R_k, Y_k, X_f")
    p.add_argument("--variable", choices=("rk", "yinf", "limit_f"), default="rk")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--q", type=_positive_int, default=1)
    p.add_argument("--f", default="identity")
    p.add_argument("--r", type=float)
    p.add_argument("--prime-limit", type=int, default=mc.DEFAULT_PRIME_LIMIT)
    _sim(p)
    _common(p)

    p = sub.add_parser("simulate-ks", help="KS distance between L_n(k)/n^k and Y_k draws")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--prime-limit", type=int, default=mc.DEFAULT_PRIME_LIMIT)
    _sim(p)
    _common(p)

    p = sub.add_parser("coprime", help="frequency of gcd = 1 among k uniform integers")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--k", type=int, required=True)
    _sim(p)
    _common(p)

    p = sub.add_parser("diagnose", help="partial sums of the three-series conditions")
    p.add_argument("--f", default="identity")
    p.add_argument("--r", type=float)
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--prime-limit", type=int, default=10**6)
    _common(p)
    return parser


# --- handlers: each returns (result payload, csv text or None) ----------------

def _constant(a):
    est = euler.c_rk(euler.ConstantQuery(a.r, a.k, a.tol, a.prime_limit))
    scale = float(a.r + 1) ** -a.k
    moment = {"value": est.value * scale, "error_estimate": est.error_estimate * scale, "scale": scale}
    return {"constant": est.to_dict(), "limit_moment": moment}, None


def _closed_form(a):
    if a.k == 2:
        value = euler.c_r2_closed(a.r)
        # each zeta value is accurate to 1e-13
        err = 1e-13 * (1 + value) / arith.zeta_int(2) + 4 * FLOAT_EPS * value
        return {"closed_form": {"value": value, "error_estimate": err, "method": "closed-form",
                                "detail": {"formula": f"zeta({a.r + 2})/zeta(2)"}}}, None
    est = euler.c_r3_closed(a.r, a.tol, a.prime_limit)
    return {"closed_form": est.to_dict()}, None


def _pgf(a):
    res = gf.zk_pgf(a.k, a.p, a.t)
    terms = sum(math.comb(a.k, j) for j in range(1, a.k + 1))
    payload = {"k": a.k, "p": a.p, "t": a.t, "value": res.value,
               "error_estimate": 16 * terms * FLOAT_EPS * max(1.0, abs(res.value))}
    if a.lmax is not None:
        payload["masses"] = [float(c) for c in gf.zk_pgf_series(a.k, a.p, a.lmax)]
    return payload, None


def _dio(a):
    if a.x is not None:
        if a.b is None:
            raise argparse.ArgumentTypeError("--x needs --b")
        eq = gf.DioEquation(tuple(a.x), a.b)
        counts = gf.dio_gf_coeffs(eq, a.lmax)
        head = {"x": list(eq.x), "b": eq.b}
    elif a.r is not None and a.k is not None:
        counts = gf.alpha_counts(a.r, a.k, a.lmax)
        head = {"x": [a.r + 1] * a.k, "b": a.r}
    else:
        raise argparse.ArgumentTypeError("give --x and --b, or --r and --k")
    payload = {**head, "counts": counts, "error_estimate": 0, "exact": True}
    return payload, csv_table(["ell", "count"], enumerate(counts))


def _compositions(a):
    rows = []
    for ell in range(a.lmax + 1):
        rows.append((ell, gf.bounded_compositions(ell, a.k, a.m), gf.bounded_compositions_exact_max(ell, a.k, a.m)))
    payload = {"k": a.k, "m": a.m, "at_most_m": [r[1] for r in rows],
               "exactly_m": [r[2] for r in rows], "error_estimate": 0, "exact": True}
    return payload, csv_table(["ell", "at_most_m", "exactly_m"], rows)


def _sim_result(sampler, a, config):
    values = mc.draw(sampler, config, a.threads)
    q = a.q
    target, extra = mc.moment_target(sampler, q, config)
    rep = mc.summarize(values**q, target, {"sampler": sampler, "q": q, **extra})
    return rep.to_dict(), values


def _simulate_moments(a):
    config = mc.SamplerConfig(k=a.k, samples=a.samples, seed=a.seed, n=a.n, f_name=a.f, r=a.r)
    sampler = "ln_ratio" if a.f == "identity" and a.r in (None, 1.0) else "f_ratio"
    return _sim_result(sampler, a, config)


def _simulate_limit(a):
    config = mc.SamplerConfig(k=a.k, samples=a.samples, seed=a.seed, prime_limit=a.prime_limit, f_name=a.f, r=a.r)
    return _sim_result(a.variable, a, config)


def _simulate_ks(a):
    finite = mc.draw("ln_ratio", mc.SamplerConfig(k=a.k, samples=a.samples, seed=a.seed, n=a.n), a.threads)
    limit = mc.draw(
        "yinf", mc.SamplerConfig(k=a.k, samples=a.samples, seed=a.seed, prime_limit=a.prime_limit),
        a.threads, stream=1,
    )
    d, scaled = mc.ks_two_sample(finite, limit)
    payload = {
        "D": d,
        "scaled": scaled,
        # exact for the drawn samples; sampling noise is what the threshold absorbs
        "error_estimate": 0.0,
        "threshold": mc.KS_THRESHOLD,
        "passed": scaled < mc.KS_THRESHOLD,
        "samples": a.samples,
        "omitted_prime_event_bound": mc.omitted_prime_bound(a.k, a.prime_limit),
    }
    return payload, list(finite) + list(limit)


def _coprime(a):
    rep = mc.coprime_probability_mc(a.n, a.k, a.samples, a.seed, a.threads)
    return rep.to_dict(), None


def _diagnose(a):
    spec = arith.resolve(a.f)
    r = spec.growth_r if a.r is None else a.r
    diag = mc.three_series_diagnostics(spec, r, a.A, a.prime_limit)
    payload = diag.to_dict()
    payload.update({"f": spec.name, "r": r, "verdict": None,
                    "error_estimate": 0, "note": "partial sums only; convergence is not decided"})
    return payload, None


HANDLERS = {
    "constant": _constant,
    "closed-form": _closed_form,
    "pgf": _pgf,
    "dio": _dio,
    "compositions": _compositions,
    "simulate-moments": _simulate_moments,
    "simulate-limit": _simulate_limit,
    "simulate-ks": _simulate_ks,
    "coprime": _coprime,
    "diagnose": _diagnose,
}


def request_echo(args: argparse.Namespace) -> dict:
    flags = {k: v for k, v in vars(args).items() if k not in ("subcommand", "format", "out", "threads")}
    return {"subcommand": args.subcommand, "flags": flags, "output_format": args.format,
            "output_path": args.out}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    request = request_echo(args)
    started = time.perf_counter()
    try:
        payload, extra = HANDLERS[args.subcommand](args)
    except argparse.ArgumentTypeError as exc:
        print(f"{parser.prog} {args.subcommand}: error: {exc}", file=stderr)
        return 2
    except (RandLcmError, ValueError) as exc:
        print(f"{parser.prog} {args.subcommand}: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    wall_ms = (time.perf_counter() - started) * 1000.0

    if args.format == "json":
        record = {
            "request": request,
            "result": payload,
            "wall_time_ms": wall_ms,
            "version": __version__,
            "rng_algorithm": mc.RNG_ALGORITHM,
        }
        text = dumps(record) + "\n"
    elif isinstance(extra, str):
        text = extra
    elif extra is not None:
        text = sample_dump(request, extra)
    else:
        text = csv_table(["field", "value"], _flatten(payload))

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), "" if obj is None else obj


def main() -> None:
    sys.exit(run())
