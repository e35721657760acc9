import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randlcm.errors import DivergentCountError, DomainError
from randlcm.gf import (
    DioEquation,
    alpha_counts,
    bounded_compositions,
    bounded_compositions_exact_max,
    dio_count_bruteforce,
    dio_counts_bruteforce,
    dio_gf_coeffs,
    zk_distribution,
    zk_pgf,
    zk_pgf_series,
)


def enumerate_compositions(ell, k, m, exact=False):
    return sum(
        1
        for a in itertools.product(range(m + 1), repeat=k)
        if sum(a) == ell and (not exact or max(a) == m)
    )


class TestCompositions:
    def test_examples(self):
        assert all(bounded_compositions(0, k, m) == 1 for k in range(1, 5) for m in range(0, 4))
        assert bounded_compositions(2, 2, 1) == 1
        assert bounded_compositions(3, 3, 2) == 7
        assert bounded_compositions_exact_max(1, 2, 1) == 2
        assert bounded_compositions_exact_max(0, 3, 0) == 1
        assert bounded_compositions_exact_max(2, 2, 2) == 2

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_against_enumeration(self, k):
        for m in range(0, 5):
            for ell in range(0, 13):
                assert bounded_compositions(ell, k, m) == enumerate_compositions(ell, k, m)
                assert bounded_compositions_exact_max(ell, k, m) == enumerate_compositions(ell, k, m, exact=True)

    def test_domain(self):
        with pytest.raises(DomainError):
            bounded_compositions(-1, 2, 2)
        with pytest.raises(DomainError):
            bounded_compositions(1, 0, 2)


class TestPgf:
    @pytest.mark.parametrize("p", [2, 3, 7, 97])
    @pytest.mark.parametrize("t", [-1.5, 0.0, 0.3, 1.0, 1.9])
    def test_k1_is_one(self, p, t):
        assert zk_pgf(1, p, t).value == 1.0

    def test_k2_at_zero(self):
        assert zk_pgf(2, 2, 0.0).value == pytest.approx(0.75, abs=1e-15)

    @pytest.mark.parametrize("k", range(1, 9))
    @pytest.mark.parametrize("p", [2, 3, 5, 13, 97])
    def test_normalization(self, k, p):
        assert abs(zk_pgf(k, p, 1.0).value - 1) <= 1e-12

    @pytest.mark.parametrize("p", [2, 3, 5, 11])
    @pytest.mark.parametrize("t", [-2.0, -0.5, 0.0, 0.5, 1.0, 1.7])
    def test_small_k_closed_forms(self, p, t):
        # explicit k = 2, 3 expressions stated alongside the general formula
        k2 = (1 - 1 / p**2) / (1 - t / p**2)
        k3 = (1 - 1 / p) ** 2 / ((1 - t / p**2) * (1 - t**2 / p**3)) * (1 + 2 / p + 2 * t / p**2 + t / p**3)
        assert zk_pgf(2, p, t).value == pytest.approx(k2, rel=1e-13)
        assert zk_pgf(3, p, t).value == pytest.approx(k3, rel=1e-13)

    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_at_t_equals_p(self, k, p):
        # E p^Z = (1-1/p)^k sum_m p^-m ((m+1)^k - m^k), summed in exact rationals
        exact = sum(Fraction((m + 1) ** k - m**k, p**m) for m in range(400)) * Fraction(p - 1, p) ** k
        assert zk_pgf(k, p, float(p)).value == pytest.approx(float(exact), rel=1e-12)

    @pytest.mark.parametrize("k", [2, 4, 6])
    @pytest.mark.parametrize("p", [2, 5])
    def test_series_branch_matches_closed_form(self, k, p):
        # both branches evaluated around the switch point |1 - t/p| = 1/4
        from randlcm.gf import _zk_pgf_series

        for u in (0.6, 0.74, 0.76, 0.9):
            t = u * p
            closed = zk_pgf(k, p, t).value if u < 0.75 else None
            series = _zk_pgf_series(k, p, t)
            if closed is not None:
                assert series == pytest.approx(closed, rel=1e-11)
        assert _zk_pgf_series(k, p, 0.76 * p) == pytest.approx(zk_pgf(k, p, 0.76 * p).value, rel=0)

    def test_domain(self):
        with pytest.raises(DomainError):
            zk_pgf(2, 3, 3.5)
        with pytest.raises(DomainError):
            zk_pgf(0, 3, 1.0)

    @pytest.mark.parametrize("k", [2, 3, 4])
    @pytest.mark.parametrize("p", [2, 3])
    def test_pgf_is_expectation_over_distribution(self, k, p):
        masses = zk_distribution(k, p, 60, 80)
        for t in (0.0, 0.5, 1.0, -1.0, 1.5):
            direct = math.fsum(m * t**ell for ell, m in enumerate(masses))
            assert zk_pgf(k, p, t).value == pytest.approx(direct, abs=1e-9)


class TestDistribution:
    def test_k1(self):
        d = zk_distribution(1, 3, 5, 10)
        assert d[0] == pytest.approx(1 - 3.0**-11, abs=1e-15)
        assert np.all(d[1:] == 0)

    @pytest.mark.parametrize("ell", range(0, 8))
    def test_k2_geometric_min(self, ell):
        d = zk_distribution(2, 2, 10, 40)
        assert d[ell] == pytest.approx(0.75 * 0.25**ell, rel=1e-10)

    @pytest.mark.parametrize("k, p", [(1, 2), (2, 2), (3, 3), (4, 5)])
    def test_mass_deficit_bound(self, k, p):
        cap, ell_max = 12, 11
        total = sum(zk_distribution(k, p, ell_max, cap, exact=True))
        below = sum(zk_pgf_series(k, p, ell_max))  # exact P{Z <= ell_max}
        assert below - k * Fraction(1, p) ** (cap + 1) <= total <= below
        if k == 1:
            assert total >= 1 - Fraction(1, p) ** (cap + 1)

    def test_exp_cap_precondition(self):
        with pytest.raises(DomainError):
            zk_distribution(2, 2, 10, 10)

    @pytest.mark.parametrize("k, p", [(2, 2), (3, 2), (3, 5), (5, 3)])
    def test_against_brute_force_enumeration(self, k, p):
        cap = 6
        brute = [Fraction(0)] * 4
        w = [Fraction(p - 1, p) / p**g for g in range(cap + 1)]
        for gs in itertools.product(range(cap + 1), repeat=k):
            z = sum(gs) - max(gs)
            if z < 4:
                brute[z] += math.prod(w[g] for g in gs)
        assert zk_distribution(k, p, 3, cap, exact=True) == brute

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_series_agrees_with_dp(self, k, p):
        cap = 30
        series = zk_pgf_series(k, p, 8)
        dp = zk_distribution(k, p, 8, cap, exact=True)
        bound = 2 * k * Fraction(1, p) ** (cap + 1)
        assert all(0 <= s - d <= bound for s, d in zip(series, dp))


class TestDiophantine:
    EQ = DioEquation((2, 2), 1)

    @pytest.mark.parametrize("ell, expected", [(0, 1), (2, 2), (3, 3)])
    def test_bruteforce_examples(self, ell, expected):
        assert dio_count_bruteforce(self.EQ, ell) == expected

    def test_gf_examples(self):
        assert dio_gf_coeffs(self.EQ, 3) == [1, 2, 2, 3]
        assert dio_gf_coeffs(DioEquation((2,), 1), 12) == [1] * 13

    def test_alpha_examples(self):
        assert alpha_counts(1, 2, 2) == [1, 2, 2]
        with pytest.raises(DivergentCountError):
            alpha_counts(0, 2, 2)

    def test_divergent_inputs_refused(self):
        eq = DioEquation((1, 1), 1)
        for fn in (dio_gf_coeffs, dio_count_bruteforce, dio_counts_bruteforce):
            with pytest.raises(DivergentCountError, match="min\\(x\\) > b"):
                fn(eq, 3)

    def test_invalid_equation(self):
        with pytest.raises(DomainError):
            DioEquation((), 1)
        with pytest.raises(DomainError):
            DioEquation((2, 0), 1)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(1, 4), min_size=1, max_size=4), st.integers(1, 3), st.integers(0, 30))
    def test_gf_equals_bruteforce(self, x, b, ell_max):
        if min(x) <= b:
            return
        eq = DioEquation(tuple(x), b)
        q = dio_gf_coeffs(eq, ell_max)
        assert q == dio_counts_bruteforce(eq, ell_max)
        assert q[0] >= 1
        assert all((c == 0) == (dio_count_bruteforce(eq, ell) == 0) for ell, c in enumerate(q[:8]))

    def test_vector_and_scalar_bruteforce_agree(self):
        eq = DioEquation((3, 2, 4), 1)
        assert dio_counts_bruteforce(eq, 12) == [dio_count_bruteforce(eq, ell) for ell in range(13)]

    @pytest.mark.parametrize("r", [1, 2, 3])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_alpha_matches_direct_equation(self, r, k):
        lmax = 14
        direct = [0] * (lmax + 1)
        for ls in itertools.product(range(lmax + 1), repeat=k):
            v = (r + 1) * sum(ls) - r * max(ls)
            if v <= lmax:
                direct[v] += 1
        assert alpha_counts(r, k, lmax) == direct

    def test_alpha_gf_is_euler_factor(self):
        # sum_ell alpha_{r,k,ell} x^ell times (1-x)^k is the local factor at x = 1/p
        from randlcm.euler import f_rk

        r, k, p = 1, 3, 5
        alpha = alpha_counts(r, k, 60)
        series = math.fsum(a * p**-ell for ell, a in enumerate(alpha))
        assert (1 - 1 / p) ** k * series == pytest.approx(f_rk(r, k, 1 / p), rel=1e-12)
