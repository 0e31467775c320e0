from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from palincf.interval import (
    RationalInterval, exp_interval, format_decimal, format_dyadic, interval_from_state,
    interval_to_state, ln_enclosure, ln_interval, rational_power_enclosure, sqrt_enclosure,
)


@pytest.fixture(autouse=True)
def _precision():
    mpmath.mp.prec = 400
    yield


fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)
positive = st.fractions(min_value=Fraction(1, 10**9), max_value=10**12, max_denominator=10**9)


def mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def encloses(iv: RationalInterval, value) -> bool:
    # slack covers the oracle's own rounding at 400 bits
    slack = abs(value) * mpmath.mpf(2) ** -380
    return mp(iv.lo) - slack <= value <= mp(iv.hi) + slack


def intervals():
    return st.tuples(fractions, fractions).map(lambda t: RationalInterval(min(t), max(t)))


@given(intervals(), intervals(), fractions, fractions)
def test_arithmetic_contains_pointwise_results(a, b, s, t):
    x = a.lo + (a.hi - a.lo) * ((s % 1) if s >= 0 else 0)
    y = b.lo + (b.hi - b.lo) * ((t % 1) if t >= 0 else 0)
    assert (a + b).contains(x + y)
    assert (a - b).contains(x - y)
    assert (a * b).contains(x * y)
    assert abs(a).contains(abs(x))
    assert a.square().contains(x * x)
    assert a.max(b).contains(max(x, y))
    assert a.min(b).contains(min(x, y))
    if b.is_positive():
        assert (a / b).contains(x / y)


@given(intervals(), intervals())
def test_status_agrees_with_endpoints(a, b):
    st_ = a.status("<", b)
    if st_ == "holds":
        assert a.hi < b.lo
    elif st_ == "violated":
        assert a.lo >= b.hi
    else:
        assert a.hi >= b.lo and a.lo < b.hi
    assert a.status(">", b) == b.status("<", a)


def test_status_on_points():
    one, two = RationalInterval(1), RationalInterval(2)
    assert one.status("<", two) == "holds"
    assert one.status("<=", one) == "holds"
    assert one.status("<", one) == "violated"
    assert one.status("=", RationalInterval(Fraction(2, 2))) == "holds"
    assert RationalInterval(0, 3).status("<", two) == "inconclusive"
    with pytest.raises(ValueError):
        one.status("!=", two)


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        RationalInterval(2, 1)


def test_reciprocal_of_zero_straddling_interval():
    with pytest.raises(ZeroDivisionError):
        RationalInterval(-1, 1).reciprocal()


@settings(max_examples=60)
@given(positive, st.sampled_from([64, 128, 200]))
def test_sqrt_enclosure_matches_mpmath(x, bits):
    iv = sqrt_enclosure(x, bits)
    assert encloses(iv, mpmath.sqrt(mp(x)))
    assert iv.width <= Fraction(x + 1) / 2 ** (bits - 4)


@settings(max_examples=60)
@given(positive, st.sampled_from([64, 128, 200]))
def test_ln_enclosure_matches_mpmath(x, bits):
    iv = ln_enclosure(x, bits)
    assert encloses(iv, mpmath.log(mp(x)))
    assert iv.width < Fraction(1, 2 ** (bits - 8))


@pytest.mark.parametrize("x", [1, 2, 3, Fraction(1, 2), 10**50, (10**30 + 7, 10**30)])
def test_ln_specific_values(x):
    val = Fraction(*x) if isinstance(x, tuple) else Fraction(x)
    assert encloses(ln_enclosure(x, 128), mpmath.log(mp(val)))


def test_ln_of_huge_integer():
    q = 3 ** 20000
    iv = ln_enclosure(q, 128)
    assert encloses(iv, 20000 * mpmath.log(3))


@settings(max_examples=60)
@given(st.fractions(min_value=0, max_value=50, max_denominator=10**6))
def test_exp_interval_matches_mpmath(x):
    iv = exp_interval(RationalInterval(x), 128)
    assert encloses(iv, mpmath.exp(mp(x)))
    assert iv.width <= iv.hi / 2 ** 120


def test_exp_rejects_negative():
    with pytest.raises(ValueError):
        exp_interval(RationalInterval(-1, 1))


def test_ln_interval_covers_both_ends():
    iv = ln_interval(RationalInterval(2, 3), 128)
    assert encloses(iv, mpmath.log(2)) and encloses(iv, mpmath.log(3))
    with pytest.raises(ValueError):
        ln_interval(RationalInterval(0, 1))


@pytest.mark.parametrize("x,num,den", [(2, 1, 3), (Fraction(7, 3), -3, 1), (10**6, -5, 2), (5, 2, 7)])
def test_rational_power_enclosure(x, num, den):
    iv = rational_power_enclosure(x, num, den, 128)
    assert encloses(iv, mpmath.power(mp(Fraction(x)), mpmath.mpf(num) / den))


@given(fractions.filter(lambda f: f != 0))
def test_format_dyadic_is_outward(x):
    lo = format_dyadic(x.numerator, x.denominator, "down")
    hi = format_dyadic(x.numerator, x.denominator, "up")
    assert float.fromhex(lo) <= x <= float.fromhex(hi)


def test_format_decimal_rounds_outward():
    assert format_decimal(1, 3, 4, "down") == "0.3333"
    assert format_decimal(1, 3, 4, "up") == "0.3334"
    assert format_decimal(-1, 3, 2, "down") == "-0.34"


@given(intervals())
def test_state_round_trip(iv):
    back = interval_from_state(interval_to_state(iv))
    assert back == iv
    assert back.lo_pair == iv.lo_pair and back.hi_pair == iv.hi_pair
