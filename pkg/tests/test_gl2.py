from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobsf import (
    FROBDISC,
    KOBLITZ,
    BudgetError,
    bipoly,
    count_bc_pairs,
    count_cf,
    count_cf_twisted,
    enumerate_oracle,
    gl2_order,
    kronecker,
    local_density,
    trace_det_fiber,
)

from conftest import brute_fiber, signed_enum

ZERO = bipoly([])


def brute_bc_pairs(k, q):
    return sum(1 for b in range(q) for c in range(q) if (b * c - k) % q == 0)


class TestGl2Order:
    def test_formula_values(self):
        assert gl2_order(1) == 1
        assert gl2_order(2) == 6
        assert gl2_order(3) == 48
        assert gl2_order(4) == 96
        assert gl2_order(5) == 480
        assert gl2_order(6) == 288

    def test_matches_enumeration(self):
        # f = 0 everywhere, so the oracle counts all invertible matrices
        for m in range(2, 7):
            assert gl2_order(m) == enumerate_oracle(ZERO, m)

    def test_multiplicative(self):
        assert gl2_order(36) == gl2_order(4) * gl2_order(9)
        assert gl2_order(60) == gl2_order(4) * gl2_order(3) * gl2_order(5)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gl2_order(0)


class TestCountBcPairs:
    @pytest.mark.parametrize("k,q,want", [(1, 9, 6), (3, 9, 12), (0, 9, 21)])
    def test_examples(self, k, q, want):
        assert count_bc_pairs(k, q) == want

    @pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 25, 27])
    def test_matches_enumeration(self, q):
        for k in range(q):
            assert count_bc_pairs(k, q) == brute_bc_pairs(k, q), (k, q)

    def test_reduces_k(self):
        assert count_bc_pairs(10, 9) == count_bc_pairs(1, 9)
        assert count_bc_pairs(-1, 9) == count_bc_pairs(8, 9)

    def test_rejects_non_prime_power(self):
        with pytest.raises(ValueError):
            count_bc_pairs(1, 6)

    @pytest.mark.parametrize("q", [3, 4, 9, 25])
    def test_rows_total_to_all_pairs(self, q):
        assert sum(count_bc_pairs(k, q) for k in range(q)) == q * q


class TestTraceDetFiber:
    def test_closed_form_at_odd_prime(self):
        # M(T, D) = p^2 + p * chi_p(T^2 - 4D) for unit D
        for p in (3, 5, 7, 11):
            fiber = trace_det_fiber(p)
            for t in range(p):
                for d in range(1, p):
                    want = p * p + p * kronecker(t * t - 4 * d, p)
                    assert fiber.count(t, d) == want, (p, t, d)

    def test_spot_values(self):
        assert trace_det_fiber(3).count(0, 1) == 6
        assert trace_det_fiber(3).count(0, 2) == 12
        assert trace_det_fiber(2).count(0, 1) == 4
        assert trace_det_fiber(2).count(1, 1) == 2
        assert trace_det_fiber(5).count(1, 1) == 20

    @pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 25])
    def test_matches_enumeration(self, q):
        assert np.array_equal(trace_det_fiber(q).table, brute_fiber(q))

    def test_total_is_group_order(self):
        for q in (2, 3, 4, 8, 9, 27, 121, 2401):
            assert trace_det_fiber(q).total() == gl2_order(q)

    def test_non_unit_det_columns_zero(self):
        fiber = trace_det_fiber(9)
        assert not fiber.table[:, ::3].any()

    def test_count_reduces_arguments(self):
        fiber = trace_det_fiber(7)
        assert fiber.count(-1, 8) == fiber.count(6, 1)

    def test_budget(self):
        with pytest.raises(BudgetError):
            trace_det_fiber(2503)

    def test_rejects_non_prime_power(self):
        with pytest.raises(ValueError):
            trace_det_fiber(12)


class TestCountCf:
    @pytest.mark.parametrize("f", [KOBLITZ, FROBDISC], ids=["koblitz", "frobdisc"])
    @pytest.mark.parametrize("m", [2, 3, 4, 5, 6, 7, 8, 9, 12, 16])
    def test_matches_oracle(self, f, m):
        assert count_cf(f, m) == enumerate_oracle(f, m)

    def test_trivial_modulus(self):
        assert count_cf(KOBLITZ, 1) == 1

    def test_crt_multiplicative(self):
        for f in (KOBLITZ, FROBDISC):
            assert count_cf(f, 36) == count_cf(f, 4) * count_cf(f, 9)
            assert count_cf(f, 100) == count_cf(f, 4) * count_cf(f, 25)

    def test_closed_form_paths_agree_with_fft_path(self):
        # the odd p and p^2 sweeps must equal the materialized fiber tables
        from frobsf.gl2 import _fiber_sweep

        for f in (KOBLITZ, FROBDISC):
            for q in (3, 5, 7, 9, 25, 49):
                assert count_cf(f, q) == _fiber_sweep(f, q, "trivial", 1), (f, q)

    def test_custom_poly_against_oracle(self):
        f = bipoly([(1, 1, 1), (0, 0, -1)])  # x*y - 1
        for m in (2, 3, 4, 5, 8, 9):
            assert count_cf(f, m) == enumerate_oracle(f, m)

    def test_budget_at_large_odd_prime(self):
        with pytest.raises(BudgetError):
            count_cf(KOBLITZ, 263 * 263)

    @given(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=3),
                st.integers(min_value=0, max_value=3),
                st.integers(min_value=-6, max_value=6),
            ),
            min_size=1,
            max_size=4,
        ).map(bipoly),
        st.sampled_from([2, 3, 4, 5, 7, 8, 9]),
    )
    @settings(max_examples=40, deadline=None)
    def test_random_polys_match_oracle(self, f, m):
        assert count_cf(f, m) == enumerate_oracle(f, m)


class TestCountCfTwisted:
    @pytest.mark.parametrize("f", [KOBLITZ, FROBDISC], ids=["koblitz", "frobdisc"])
    @pytest.mark.parametrize("q", [3, 5, 9])
    def test_legendre_matches_signed_enumeration(self, f, q):
        p = 3 if q % 3 == 0 else 5
        want = signed_enum(f, q, lambda d: kronecker(d, p))
        assert count_cf_twisted(f, q, ("legendre", p)) == want

    @pytest.mark.parametrize("f", [KOBLITZ, FROBDISC], ids=["koblitz", "frobdisc"])
    @pytest.mark.parametrize(
        "q,chi",
        [(4, "chi_m4"), (8, "chi_m4"), (8, "chi_8"), (8, "chi_m8"), (16, "chi_8")],
    )
    def test_two_power_characters_match_signed_enumeration(self, f, q, chi):
        table = {
            "chi_m4": lambda d: kronecker(-4, d),
            "chi_8": lambda d: kronecker(8, d),
            "chi_m8": lambda d: kronecker(-8, d),
        }[chi]
        assert count_cf_twisted(f, q, chi) == signed_enum(f, q, table)

    def test_trivial_character_is_plain_count(self):
        for q in (4, 9, 25):
            assert count_cf_twisted(KOBLITZ, q, "trivial") == count_cf(KOBLITZ, q)

    def test_koblitz_twisted_closed_form(self):
        # the Legendre-twisted sum at p^2 collapses to -p^3
        for p in (3, 5, 7, 11, 13):
            assert count_cf_twisted(KOBLITZ, p * p, ("legendre", p)) == -(p**3)

    def test_frobdisc_twist_is_transparent(self):
        # every solution of T^2 = 4D has chi_p(D) = chi_p((T/2)^2) = 1
        for p in (3, 5, 7, 11):
            for q in (p, p * p):
                assert count_cf_twisted(FROBDISC, q, ("legendre", p)) == count_cf(
                    FROBDISC, q
                )

    def test_character_validation(self):
        with pytest.raises(ValueError):
            count_cf_twisted(KOBLITZ, 9, ("legendre", 2))
        with pytest.raises(ValueError):
            count_cf_twisted(KOBLITZ, 9, ("legendre", 5))
        with pytest.raises(ValueError):
            count_cf_twisted(KOBLITZ, 4, "chi_8")
        with pytest.raises(ValueError):
            count_cf_twisted(KOBLITZ, 9, "hartley")
        with pytest.raises(ValueError):
            count_cf_twisted(KOBLITZ, 12, "trivial")


class TestLocalDensity:
    def test_is_exact_ratio(self):
        for f in (KOBLITZ, FROBDISC):
            for ell in (2, 3, 5, 7):
                rho = local_density(f, ell)
                assert rho == Fraction(count_cf(f, ell * ell), gl2_order(ell * ell))
                assert 0 < rho < 1

    def test_matches_oracle_ratio_at_two(self):
        for f in (KOBLITZ, FROBDISC):
            assert local_density(f, 2) == Fraction(
                enumerate_oracle(f, 4), gl2_order(4)
            )


class TestEnumerateOracle:
    def test_budget(self):
        with pytest.raises(BudgetError):
            enumerate_oracle(KOBLITZ, 17)

    def test_predicate_restricts(self):
        full = enumerate_oracle(ZERO, 3)
        upper = enumerate_oracle(ZERO, 3, predicate=lambda a, b, c, d: c == 0)
        assert 0 < upper < full
        # upper triangular invertible matrices mod 3: units^2 * 3 choices of b
        assert upper == 2 * 2 * 3
