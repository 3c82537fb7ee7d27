from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from combbmm._rational import (as_fraction, format_fraction, integer_root, le_pow2_neg,
                               rational_root)


def test_as_fraction_inputs():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction(5) == Fraction(5)
    with pytest.raises(TypeError):
        as_fraction([1])


@pytest.mark.parametrize("n,k,root", [(0, 3, 0), (1, 5, 1), (26, 3, 2), (27, 3, 3),
                                      (10**40, 4, 10**10), (10**40 - 1, 4, 10**10 - 1)])
def test_integer_root_frozen(n, k, root):
    assert integer_root(n, k) == root


@given(st.integers(0, 10**30), st.integers(1, 7))
def test_integer_root_brackets(n, k):
    r = integer_root(n, k)
    assert r**k <= n < (r + 1) ** k


@pytest.mark.parametrize("value,exp,expected", [
    (Fraction(1, 8), 3, True),
    (Fraction(1, 7), 3, False),
    (Fraction(1, 2), Fraction(1, 2), True),
    (Fraction(7, 10), Fraction(1, 2), True),
    (Fraction(3, 4), Fraction(1, 2), False),
    (Fraction(0), 100, True),
    (Fraction(1), 0, True),
])
def test_le_pow2_neg_frozen(value, exp, expected):
    assert le_pow2_neg(value, exp) is expected


@given(st.fractions(min_value=0, max_value=1, max_denominator=1000),
       st.fractions(min_value=0, max_value=12, max_denominator=12))
def test_le_pow2_neg_matches_float_away_from_ties(value, exp):
    target = 2.0 ** (-float(exp))
    if abs(float(value) - target) > 1e-9:
        assert le_pow2_neg(value, exp) == (float(value) <= target)


def test_rational_root_and_format():
    assert rational_root(Fraction(1, 16), 4) == 0.5
    assert abs(rational_root(Fraction(2), 2) - 2**0.5) < 1e-11
    assert format_fraction(Fraction(6, 8)) == "3/4"
