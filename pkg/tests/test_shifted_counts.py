import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gpf_trial, reference_flags
from spl.core_primes import prime_count
from spl.errors import ArgumentError, BudgetError
from spl.shifted_counts import (
    Theta,
    count_tuples,
    fast_qualifying_products,
    large_factor_count,
    large_factor_count_fixed,
    oracle_qualifying_products,
    smooth_shift_count,
    threshold_test,
    tuple_count_fast,
    tuple_count_oracle,
)


def theta_from_fraction(fr: Fraction) -> Theta:
    return Theta(fr.numerator, fr.denominator)


class TestTheta:
    def test_reduction(self):
        t = Theta(2, 8)
        assert (t.num, t.den) == (1, 4)
        assert t.as_real == 0.25

    def test_parse(self):
        assert Theta.parse("17/64") == Theta(17, 64)
        assert str(Theta.parse(" 3 / 12 ")) == "1/4"

    @pytest.mark.parametrize("bad", ["0.5", "1", "-1/2", "a/b", "", "1/2/3"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ArgumentError):
            Theta.parse(bad)

    @pytest.mark.parametrize("num,den", [(0, 5), (5, 5), (7, 5), (1, 0)])
    def test_range_rejected(self, num, den):
        with pytest.raises(ArgumentError):
            Theta(num, den)


class TestThresholdTest:
    def test_examples(self):
        assert threshold_test(2, 9, Theta(1, 4))
        assert not threshold_test(2, 21, Theta(1, 4))
        assert threshold_test(5, 25, Theta(1, 2))  # boundary is inclusive

    @given(st.integers(1, 10**6), st.integers(1, 10**6), st.integers(1, 30), st.integers(2, 31))
    @settings(deadline=None, max_examples=150)
    def test_monotone(self, r, n, num, den):
        if num >= den:
            num, den = den - 1, den
        th = Theta(num, den)
        if threshold_test(r, n, th):
            assert threshold_test(r + 1, n, th)
        else:
            assert not threshold_test(r, n + 1, th)

    @given(st.integers(1, 5000), st.integers(1, 5000), st.integers(1, 9), st.integers(2, 10))
    @settings(deadline=None, max_examples=150)
    def test_matches_fraction_comparison(self, r, n, num, den):
        if num >= den:
            return
        th = Theta(num, den)
        assert threshold_test(r, n, th) == (Fraction(r) ** th.den >= Fraction(n) ** th.num)


class TestSingleCounters:
    def test_examples(self, cache):
        half = Theta(1, 2)
        assert large_factor_count(cache, 10, half) == 2
        assert large_factor_count(cache, 2, half) == 0
        assert large_factor_count_fixed(cache, 10, half) == 0
        assert smooth_shift_count(cache, 10, half) == 2
        assert smooth_shift_count(cache, 2, Theta(9, 10)) == 1

    def test_t_prime_at_100(self, cache):
        # brute force over the 25 primes below 100
        expected = sum(
            1 for p in range(2, 101) if all(p % d for d in range(2, p)) and gpf_trial(p - 1) >= 10
        )
        assert large_factor_count_fixed(cache, 100, Theta(1, 2)) == expected == 8

    def test_exact_boundary_inclusive(self, cache):
        # P+(6) = 3 and 3^2 = 9: the fixed threshold at x = 9 is met with
        # equality, which the inclusive comparison must count
        assert large_factor_count_fixed(cache, 9, Theta(1, 2)) == 1

    @pytest.mark.parametrize(
        "theta", [Theta(1, 4), Theta(1, 2), Theta(2, 3), Theta(17, 64), Theta(499, 997)]
    )
    def test_brute_force_cross_check(self, cache, theta):
        x = 2000
        flags = reference_flags(x)
        t = tp = ts = 0
        for p in range(2, x + 1):
            if not flags[p]:
                continue
            r = gpf_trial(p - 1)
            if r**theta.den >= p**theta.num:
                t += 1
            if r**theta.den >= x**theta.num:
                tp += 1
            if r**theta.den <= p**theta.num:
                ts += 1
        assert large_factor_count(cache, x, theta) == t
        assert large_factor_count_fixed(cache, x, theta) == tp
        assert smooth_shift_count(cache, x, theta) == ts

    def test_prime_threshold_dominated(self, cache):
        for x in (50, 500, 5000):
            for theta in (Theta(1, 4), Theta(1, 2), Theta(3, 4)):
                assert large_factor_count_fixed(cache, x, theta) <= large_factor_count(cache, x, theta)

    def test_trichotomy_with_boundary(self, cache):
        for x, theta in ((100, Theta(1, 2)), (1000, Theta(1, 2)), (500, Theta(1, 3))):
            ties = 0
            flags = reference_flags(x)
            for p in range(2, x + 1):
                if flags[p] and gpf_trial(p - 1) ** theta.den == p**theta.num:
                    ties += 1
            total = large_factor_count(cache, x, theta) + smooth_shift_count(cache, x, theta)
            assert total == prime_count(cache, x) + ties

    def test_monotone_in_x_and_theta(self, cache):
        thetas = [Theta(1, 5), Theta(1, 4), Theta(1, 3), Theta(1, 2), Theta(3, 4)]
        xs = [10, 50, 100, 500, 1000, 5000]
        for theta in thetas:
            vals = [large_factor_count(cache, x, theta) for x in xs]
            assert all(a <= b for a, b in zip(vals, vals[1:]))
        for x in xs:
            vals = [large_factor_count(cache, x, th) for th in thetas]
            assert all(a >= b for a, b in zip(vals, vals[1:]))


class TestTupleCounters:
    def test_oracle_examples(self, cache):
        q = Theta(1, 4)
        assert tuple_count_oracle(cache, 35, 2, q) == 3
        assert tuple_count_oracle(cache, 8, 2, q) == 0
        assert tuple_count_oracle(cache, 9, 2, q) == 1
        assert sorted(oracle_qualifying_products(cache, 35, 2, q)) == [9, 15, 15]

    def test_fast_examples(self, cache):
        assert tuple_count_fast(cache, 35, 2, Theta(1, 4)) == 3

    def test_count_tuples_record(self, cache):
        rec = count_tuples(cache, 35, 2, Theta(1, 4), method="oracle")
        assert rec.ordered_count == 3 and rec.method == "oracle"
        assert count_tuples(cache, 35, 2, Theta(1, 4)).ordered_count == 3
        with pytest.raises(ArgumentError):
            count_tuples(cache, 35, 2, Theta(1, 4), method="magic")

    def test_k_below_two_rejected(self, cache):
        with pytest.raises(ArgumentError):
            tuple_count_oracle(cache, 100, 1, Theta(1, 4))

    def test_node_budget(self, cache):
        with pytest.raises(BudgetError):
            tuple_count_oracle(cache, 10**5, 2, Theta(1, 4), node_budget=10)

    def test_two_never_qualifies(self, cache):
        # a tuple containing p = 2 forces gcd 1; all qualifying products are odd
        for k in (2, 3):
            prods = oracle_qualifying_products(cache, 500, k, Theta(1, 8))
            assert prods and all(p % 2 == 1 for p in prods)

    def test_oracle_fast_agree_small_sweep(self, cache):
        for k in (2, 3):
            lo = Fraction(1, 2 * k)
            for fr in (lo, lo + Fraction(1, 100), Fraction(17, 32 * k) - Fraction(1, 100)):
                th = theta_from_fraction(fr)
                for x in (10, 100, 300):
                    assert tuple_count_oracle(cache, x, k, th) == tuple_count_fast(cache, x, k, th)

    def test_fast_worker_determinism(self, cache):
        th = Theta(1, 4)
        a = tuple_count_fast(cache, 20000, 2, th, workers=1)
        b = tuple_count_fast(cache, 20000, 2, th, workers=3)
        assert a == b

    def test_product_multisets_agree(self, cache):
        th = Theta(1, 4)
        o = sorted(oracle_qualifying_products(cache, 2000, 2, th))
        f = sorted(fast_qualifying_products(cache, 2000, 2, th))
        assert o == f

    def test_unordered_counts(self, cache):
        th = Theta(1, 4)
        x = 1000
        uo = tuple_count_oracle(cache, x, 2, th, ordered=False)
        uf = tuple_count_fast(cache, x, 2, th, ordered=False)
        assert uo == uf
        assert uo <= tuple_count_oracle(cache, x, 2, th)

    def test_permutation_orbit(self, cache):
        """Ordered count equals the multiset enumeration weighted by orbit size."""
        x, k, th = 400, 3, Theta(1, 8)
        flags = reference_flags(x)
        ps = [p for p in range(2, x // 4 + 1) if flags[p]]
        total = 0

        def visit(start, prod, chosen):
            nonlocal total
            if len(chosen) == k:
                g = chosen[0] - 1
                for c in chosen[1:]:
                    g = math.gcd(g, c - 1)
                if threshold_test(gpf_trial(g), prod, th):
                    # orbit size: k! / prod(multiplicities!)
                    orbit = math.factorial(k)
                    for v in set(chosen):
                        orbit //= math.factorial(chosen.count(v))
                    total += orbit
                return
            for i in range(start, len(ps)):
                q = ps[i]
                if prod * q * 2 ** (k - len(chosen) - 1) > x:
                    break
                visit(i, prod * q, chosen + [q])

        visit(0, 1, [])
        assert total == tuple_count_oracle(cache, x, k, th)

    def test_monotonicity(self, cache):
        th = Theta(1, 4)
        vals = [tuple_count_oracle(cache, x, 2, th) for x in (10, 50, 200, 1000)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        thetas = [Theta(1, 8), Theta(1, 6), Theta(1, 4), Theta(1, 3)]
        counts = [tuple_count_oracle(cache, 1000, 2, t) for t in thetas]
        assert all(a >= b for a, b in zip(counts, counts[1:]))
