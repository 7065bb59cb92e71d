from __future__ import annotations

from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flagcert.field import ONE, SQRT2, ZERO, QSqrt2, format_number, parse_number, sign

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60)
elements = st.builds(QSqrt2, rationals, rationals)


def test_difference_of_squares():
    assert QSqrt2(1, 1) * QSqrt2(-1, 1) == ONE


def test_inverse_of_sqrt2():
    assert SQRT2.inverse() == QSqrt2(0, Fraction(1, 2))
    assert ONE / SQRT2 == QSqrt2(0, Fraction(1, 2))


def test_mixed_sum():
    assert QSqrt2(Fraction(3, 4)) + QSqrt2(0, Fraction(1, 4)) == QSqrt2(Fraction(3, 4), Fraction(1, 4))


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


@pytest.mark.parametrize("x, expected", [(QSqrt2(3, -2), 1), (QSqrt2(1, -1), -1), (ZERO, 0),
                                         (QSqrt2(-3, 2), -1), (QSqrt2(0, -1), -1), (QSqrt2(5), 1)])
def test_sign_cases(x, expected):
    assert sign(x) == expected


@given(elements, elements, elements)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    if b:
        assert (a / b) * b == a


@given(elements)
def test_square_is_nonnegative(a):
    assert (a * a).sign() >= 0


@given(elements)
def test_sign_matches_high_precision(a):
    getcontext().prec = 60
    v = Decimal(a.p.numerator) / Decimal(a.p.denominator) + Decimal(a.q.numerator) / Decimal(
        a.q.denominator
    ) * Decimal(2).sqrt()
    expected = 0 if v == 0 else (1 if v > 0 else -1)
    assert a.sign() == expected


@given(elements, elements)
def test_order_is_total_and_consistent(a, b):
    assert (a < b) + (b < a) + (a == b) == 1
    assert (a < b) == ((b - a).sign() > 0)


@given(elements)
def test_number_literal_round_trip(a):
    assert parse_number(format_number(a)) == a


@pytest.mark.parametrize("text, value", [
    ("3", QSqrt2(3)),
    ("-3/4", QSqrt2(Fraction(-3, 4))),
    ("1/2+3/4*r2", QSqrt2(Fraction(1, 2), Fraction(3, 4))),
    ("1/2-3/4*r2", QSqrt2(Fraction(1, 2), Fraction(-3, 4))),
    ("-1/4*r2", QSqrt2(0, Fraction(-1, 4))),
    ("123456789012345678901234567890/7", QSqrt2(Fraction(123456789012345678901234567890, 7))),
])
def test_parse_literals(text, value):
    assert parse_number(text) == value


@pytest.mark.parametrize("text", ["", "1/0", "1 /2", "r2r2", "1/2+", "abc", "1/2*r3"])
def test_parse_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_number(text)


def test_format_examples():
    assert format_number(QSqrt2(Fraction(-3, 4), Fraction(1, 2))) == "-3/4+1/2*r2"
    assert format_number(QSqrt2(3)) == "3"


def test_values_are_immutable_and_hashable():
    a = QSqrt2(1, 2)
    with pytest.raises(AttributeError):
        a.p = 3
    assert hash(a) == hash(QSqrt2(1, 2))
    assert hash(QSqrt2(2)) == hash(2)
