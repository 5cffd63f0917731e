"""Tests for exact Q(v) arithmetic."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qskein.scalar import (
    ONE,
    ZERO,
    PoleError,
    ParseError,
    Scalar,
    bracket,
    from_fraction,
    from_int,
    parse_scalar,
    q_power,
    specialize,
    v_power,
)


@st.composite
def rand_scalar(draw):
    """Small random Scalar: ratio of sparse integer polynomials in v."""
    poly = st.dictionaries(st.integers(0, 5), st.integers(-4, 4), max_size=3)
    num = draw(poly)
    den = draw(poly.filter(lambda p: any(p.values())))
    return Scalar(num, den)


scalars = rand_scalar()


class TestCanonicalForm:
    def test_zero_collapses(self):
        assert Scalar({}, {3: 7}) == ZERO
        assert Scalar({2: 0}, {0: 5}) == ZERO

    def test_common_factor_cancels(self):
        # (v^2 - 1)/(v - 1) == v + 1
        s = Scalar({2: 1, 0: -1}, {1: 1, 0: -1})
        assert s == Scalar({1: 1, 0: 1}, {0: 1})

    def test_content_cancels(self):
        assert Scalar({1: 2}, {0: 4}) == Scalar({1: 1}, {0: 2})

    def test_denominator_leading_coefficient_positive(self):
        s = Scalar({0: 1}, {1: -1, 0: 1})  # 1/(1 - v)
        assert max(s.den) in s.den and s.den[max(s.den)] > 0
        assert s == Scalar({0: -1}, {1: 1, 0: -1})

    def test_zero_denominator_rejected(self):
        with pytest.raises(ZeroDivisionError):
            Scalar({0: 1}, {})

    def test_equal_scalars_hash_equal(self):
        a = Scalar({2: 1, 0: -1}, {1: 1, 0: -1})
        b = Scalar({1: 1, 0: 1}, {0: 1})
        assert hash(a) == hash(b)


class TestArithmetic:
    @given(scalars, scalars)
    @settings(max_examples=60, deadline=None)
    def test_add_commutes(self, a, b):
        assert a + b == b + a

    @given(scalars, scalars, scalars)
    @settings(max_examples=60, deadline=None)
    def test_mul_distributes(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @given(scalars, scalars, scalars)
    @settings(max_examples=40, deadline=None)
    def test_mul_associates(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @given(scalars)
    @settings(max_examples=60, deadline=None)
    def test_sub_is_add_neg(self, a):
        assert a - a == ZERO
        assert a + (-a) == ZERO

    @given(scalars)
    @settings(max_examples=60, deadline=None)
    def test_inverse(self, a):
        if a != ZERO:
            assert a * a.inverse() == ONE
            assert a / a == ONE

    def test_pow(self):
        v = v_power(1)
        assert v**3 == v_power(3)
        assert v**-2 == v_power(-2)
        assert v**0 == ONE
        assert (v + ONE) ** 2 == v * v + from_int(2) * v + ONE

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            ONE / ZERO
        with pytest.raises(ZeroDivisionError):
            ZERO.inverse()


class TestPowersAndBracket:
    def test_q_is_v_squared(self):
        assert q_power(1) == v_power(2)
        assert q_power(-3) == v_power(-6)

    def test_q_half_integer(self):
        assert q_power(Fraction(1, 2)) == v_power(1)
        assert q_power(Fraction(-5, 2)) == v_power(-5)
        with pytest.raises(ValueError):
            q_power(Fraction(1, 3))

    def test_bracket_values(self):
        # <2> = q^2 - 1 = v^4 - 1
        assert bracket(2) == parse_scalar("v^4 - 1")
        # <-2> = q^-2 - 1 = (1 - v^4)/v^4
        assert bracket(-2) == parse_scalar("(1 - v^4)/v^4")
        assert bracket(0) == ZERO

    def test_bracket_product_identity(self):
        # <n><-n> = -(<n> + <-n>)  since (q^n-1)(q^-n-1) = 2 - q^n - q^-n
        for n in range(-8, 9):
            lhs = bracket(n) * bracket(-n)
            rhs = -(bracket(n) + bracket(-n))
            assert lhs == rhs, n

    def test_bracket_addition_rule(self):
        # <m+n> = <m> + q^m <n>
        for m in range(-4, 5):
            for n in range(-4, 5):
                assert bracket(m + n) == bracket(m) + q_power(m) * bracket(n)


class TestSpecialize:
    def test_polynomial_value(self):
        # bracket(3) = q^3 - 1 = v^6 - 1 evaluates to 63 at v = 2
        assert specialize(bracket(3), 2) == 63

    def test_rational_value(self):
        s = parse_scalar("(v^2 + 1)/v")
        assert specialize(s, Fraction(1, 2)) == Fraction(5, 2)

    def test_pole_detected(self):
        s = parse_scalar("1/(v - 1)")
        with pytest.raises(PoleError):
            specialize(s, 1)

    def test_removable_singularity_is_not_a_pole(self):
        # (v^2-1)/(v-1) reduces to v+1, so v=1 is fine
        s = Scalar({2: 1, 0: -1}, {1: 1, 0: -1})
        assert specialize(s, 1) == 2

    @given(scalars, scalars)
    @settings(max_examples=40, deadline=None)
    def test_specialize_is_a_homomorphism(self, a, b):
        x = Fraction(3, 2)
        try:
            va, vb, vab = specialize(a, x), specialize(b, x), specialize(a * b, x)
        except PoleError:
            return
        assert va * vb == vab


class TestParser:
    def test_round_trip(self):
        for text in ["0", "1", "-1", "v", "q", "v^4 - 1", "(1 - v^4)/v^4",
                     "(v^2 + 2*v + 1)/(v^2 - 1)", "q^-2"]:
            s = parse_scalar(text)
            assert parse_scalar(str(s)) == s

    def test_q_alias(self):
        assert parse_scalar("q^2 - 1") == bracket(2)
        assert parse_scalar("q**2 - 1") == bracket(2)

    def test_precedence(self):
        assert parse_scalar("2*v^2") == from_int(2) * v_power(2)
        assert parse_scalar("-v^2") == -v_power(2)
        assert parse_scalar("1 - 2/2") == ZERO

    def test_errors(self):
        for bad in ["", "v +", "(v", "v^x", "w"]:
            with pytest.raises(ParseError):
                parse_scalar(bad)

    def test_str_is_canonical(self):
        s = parse_scalar("(v^4 - 1)/(v^2 - 1)")
        assert str(s) == "v^2 + 1"
