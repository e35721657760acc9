"""Least common multiples of random integers: limit constants, generating
functions and Monte Carlo checks."""

__version__ = "0.1.0"

from .arith import b_pr, eval_f, eval_log_f, lcm_of, resolve, zeta_int
from .euler import (
    ConstantQuery,
    EstimateWithError,
    c_r2_closed,
    c_r3_closed,
    c_rk,
    coprime_density,
    f_rk,
    limit_moment,
)
from .gf import (
    DioEquation,
    alpha_counts,
    bounded_compositions,
    bounded_compositions_exact_max,
    dio_count_bruteforce,
    dio_gf_coeffs,
    zk_distribution,
    zk_pgf,
)
from .primes import build_spf, factorize, primes_up_to
