"""Exact scalar arithmetic: ring axioms, the subtraction projection, and
serialization round-trips."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from feynhopf.errors import PoleOverflowError, TruncationMismatchError
from feynhopf.scalars import (LaurentSeries, TPoly, evaluate_t, exp_eps_poly,
                              laurent_add, laurent_mul, lift_to_tpoly,
                              ms_project, rational_from_string,
                              rational_to_string)

F = Fraction


def ls(terms, trunc=8, pole=4):
    return LaurentSeries(terms, trunc, pole)


def random_series(rng, trunc=8, pole=4, depth=2, top=2, tpoly=False):
    """Random series with pole depth <= depth and support up to eps^top,
    kept narrow enough that products of a few factors never truncate."""
    terms = {}
    for k in range(-depth, top + 1):
        if rng.random() < 0.6:
            if tpoly:
                terms[k] = TPoly([F(rng.randint(-4, 4), rng.randint(1, 3))
                                  for _ in range(rng.randint(1, 3))])
            else:
                terms[k] = F(rng.randint(-9, 9), rng.randint(1, 5))
    return LaurentSeries(terms, trunc, pole)


class TestRational:
    def test_string_round_trip(self):
        for text in ["3/4", "-2", "0", "7", "-5/9"]:
            r = rational_from_string(text)
            assert rational_from_string(rational_to_string(r)) == r

    def test_lowest_terms_positive_denominator(self):
        r = F(6, -8)
        assert (r.numerator, r.denominator) == (-3, 4)
        assert rational_to_string(r) == "-3/4"


class TestTPoly:
    def test_arithmetic(self):
        t = TPoly.variable()
        p = (t + 1) * (t - 1)
        assert p == t * t - 1
        assert p.evaluate(F(3)) == 8
        assert (t ** 3).coefficient(3) == 1

    def test_zero_normalization(self):
        assert TPoly([0, 0]).is_zero()
        assert TPoly([1, 2, 0]).degree == 1

    def test_scalar_mixing(self):
        t = TPoly.variable()
        assert 2 * t + F(1, 2) == TPoly([F(1, 2), 2])
        assert TPoly.constant(3) == 3

    def test_ring_axioms_randomized(self):
        rng = random.Random(5)
        for _ in range(50):
            a, b, c = (TPoly([F(rng.randint(-5, 5)) for _ in range(3)])
                       for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a * b == b * a

    def test_json_round_trip(self):
        p = TPoly([F(1, 2), 0, F(-3)])
        assert TPoly.from_json(p.to_json()) == p


class TestLaurentArithmetic:
    def test_add_inverse(self):
        a = ls({-1: 1})
        b = ls({-1: -1})
        assert laurent_add(a, b).is_zero()

    def test_add_disjoint_supports(self):
        assert laurent_add(ls({-1: 1, 0: 2}), ls({1: 3})) == \
            ls({-1: 1, 0: 2, 1: 3})
        assert laurent_add(ls({-2: 1}), ls({0: 5, 1: 1})) == \
            ls({-2: 1, 0: 5, 1: 1})

    def test_add_truncation_mismatch(self):
        with pytest.raises(TruncationMismatchError):
            laurent_add(LaurentSeries({0: 1}, 8, 4),
                        LaurentSeries({0: 1}, 9, 4))

    def test_add_pole_bound_is_max(self):
        a = LaurentSeries({-1: 1}, 8, 2)
        b = LaurentSeries({0: 1}, 8, 5)
        assert (a + b).pole_bound == 5

    def test_mul_inverse_monomials(self):
        assert laurent_mul(ls({-1: 1}), ls({1: 1})) == ls({0: 1})

    def test_mul_hand_expansion(self):
        # (1/e + 1)(1/e - 1) = 1/e^2 - 1
        got = laurent_mul(ls({-1: 1, 0: 1}), ls({-1: 1, 0: -1}))
        assert got == ls({-2: 1, 0: -1})

    def test_mul_pole_overflow(self):
        a = LaurentSeries({-1: 1}, 8, 1)
        with pytest.raises(PoleOverflowError):
            laurent_mul(a, a)

    def test_mul_cancellation_leaves_no_zero_terms(self):
        # (1/e - 1)(1/e + 1): the eps^-1 coefficient cancels exactly
        a = LaurentSeries({-1: 1, 0: -1}, 8, 2)
        b = LaurentSeries({-1: 1, 0: 1}, 8, 2)
        got = laurent_mul(a, b)
        assert got == LaurentSeries({-2: 1, 0: -1}, 8, 2)
        assert got.coefficient(-1) == 0 and (-1, F(0)) not in got.terms()

    def test_mul_truncates_high_orders(self):
        a = LaurentSeries({4: 1}, 4, 2)
        b = LaurentSeries({1: 1, 0: 1}, 4, 2)
        assert laurent_mul(a, b) == LaurentSeries({4: 1}, 4, 2)

    def test_ring_axioms_randomized(self):
        # supports narrow enough that no product exceeds the truncation,
        # so the axioms hold exactly, not just up to order K
        rng = random.Random(17)
        for _ in range(60):
            a = random_series(rng, trunc=12, pole=8)
            b = random_series(rng, trunc=12, pole=8)
            c = random_series(rng, trunc=12, pole=8)
            assert a + b == b + a
            assert (a + b) + c == a + (b + c)
            assert laurent_mul(a, b) == laurent_mul(b, a)
            assert laurent_mul(laurent_mul(a, b), c) == \
                laurent_mul(a, laurent_mul(b, c))
            assert laurent_mul(a, b + c) == \
                laurent_mul(a, b) + laurent_mul(a, c)

    def test_regular_series_associativity_survives_truncation(self):
        # with no poles, truncation is monotone: dropped orders never come
        # back, so associativity holds on the truncated representation
        rng = random.Random(29)
        for _ in range(40):
            a = random_series(rng, trunc=4, pole=0, depth=0, top=4)
            b = random_series(rng, trunc=4, pole=0, depth=0, top=4)
            c = random_series(rng, trunc=4, pole=0, depth=0, top=4)
            assert laurent_mul(laurent_mul(a, b), c) == \
                laurent_mul(a, laurent_mul(b, c))

    def test_tpoly_coefficients(self):
        t = TPoly.variable()
        a = ls({-1: t, 0: 1})
        b = ls({1: t})
        assert laurent_mul(a, b) == ls({0: t * t, 1: t})


class TestSubtraction:
    def test_pole_part_examples(self):
        assert ms_project(ls({-1: 1, 0: 5, 1: 1})) == ls({-1: 1})
        assert ms_project(ls({0: 3, 1: 2})).is_zero()
        assert ms_project(ls({-2: 2, -1: -7, 0: 4})) == ls({-2: 2, -1: -7})

    def test_idempotent(self):
        rng = random.Random(3)
        for _ in range(40):
            a = random_series(rng)
            assert ms_project(ms_project(a)) == ms_project(a)

    def test_splitting(self):
        rng = random.Random(4)
        for _ in range(40):
            a = random_series(rng)
            pole = ms_project(a)
            rest = a - pole
            assert pole + rest == a
            assert all(k >= 0 for k, _ in rest.terms())

    def test_rota_baxter(self):
        # T(a)T(b) + T(ab) = T(T(a)b) + T(aT(b)): what makes counterterms
        # multiplicative downstream
        rng = random.Random(99)
        for _ in range(200):
            a = random_series(rng, trunc=8, pole=4, depth=2)
            b = random_series(rng, trunc=8, pole=4, depth=2)
            ta, tb = ms_project(a), ms_project(b)
            lhs = laurent_mul(ta, tb) + ms_project(laurent_mul(a, b))
            rhs = ms_project(laurent_mul(ta, b)) + \
                ms_project(laurent_mul(a, tb))
            assert lhs == rhs


class TestExponential:
    def test_zero_exponent(self):
        assert exp_eps_poly(0, 4, 2) == LaurentSeries({0: 1}, 4, 2)

    def test_t_exponent(self):
        t = TPoly.variable()
        got = exp_eps_poly(t, 2, 0)
        assert got == LaurentSeries({0: TPoly([1]), 1: t,
                                     2: TPoly([0, 0, F(1, 2)])}, 2, 0)

    def test_2t_first_order(self):
        t = TPoly.variable()
        got = exp_eps_poly(2 * t, 1, 0)
        assert got == LaurentSeries({0: TPoly([1]), 1: 2 * t}, 1, 0)

    def test_group_property(self):
        t = TPoly.variable()
        prod = laurent_mul(exp_eps_poly(t, 6, 0), exp_eps_poly(2 * t, 6, 0))
        assert prod == exp_eps_poly(3 * t, 6, 0)

    def test_evaluate_t_recovers_rational_exponential(self):
        t = TPoly.variable()
        got = evaluate_t(exp_eps_poly(t, 5, 0), F(2))
        assert got == exp_eps_poly(2, 5, 0)


class TestSerialization:
    def test_round_trip_rational(self):
        a = ls({-2: F(5, 3), 0: F(-1), 3: F(7, 2)})
        j = a.to_json()
        assert j == {"truncation": 8, "pole_bound": 4,
                     "terms": [[-2, "5/3"], [0, "-1"], [3, "7/2"]]}
        assert LaurentSeries.from_json(j) == a

    def test_round_trip_tpoly(self):
        t = TPoly.variable()
        a = ls({-1: 2 * t, 1: TPoly([F(1, 2), 0, 1])})
        assert LaurentSeries.from_json(a.to_json()) == a

    def test_round_trip_randomized(self):
        rng = random.Random(12)
        for _ in range(30):
            a = random_series(rng, tpoly=rng.random() < 0.5)
            assert LaurentSeries.from_json(a.to_json()) == a

    def test_lift_then_evaluate(self):
        a = ls({-1: F(3), 2: F(1, 4)})
        lifted = lift_to_tpoly(a)
        assert evaluate_t(lifted, F(7)) == a
