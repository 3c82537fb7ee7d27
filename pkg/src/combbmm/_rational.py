"""Exact rational helpers shared by the threshold comparisons."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

ROOT_BITS = 40


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, ``"num/den"`` strings and floats to a Fraction.

    Floats go through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(repr(value))
    raise TypeError(f"cannot interpret {value!r} as a rational")


def integer_root(n: int, k: int) -> int:
    """Largest integer r with r**k <= n."""
    if n < 0:
        raise ValueError("integer_root of a negative number")
    if n < 2 or k == 1:
        return n
    r = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def rational_root(value: Fraction, k: int, bits: int = ROOT_BITS) -> float:
    """k-th root of a nonnegative rational, truncated to a multiple of 2**-bits.

    Used for display only; decisions compare in the power domain.
    """
    value = as_fraction(value)
    if value < 0:
        raise ValueError("root of a negative rational")
    scaled = (value.numerator << (bits * k)) // value.denominator
    return integer_root(scaled, k) / (1 << bits)


def le_pow2_neg(value: Fraction, exponent: Fraction) -> bool:
    """Exact test of ``value <= 2 ** (-exponent)`` for rational exponent >= 0."""
    value = as_fraction(value)
    exponent = as_fraction(exponent)
    if value <= 0:
        return True
    a, b = exponent.numerator, exponent.denominator
    # value**b <= 2**(-a)  <=>  num**b * 2**a <= den**b   (b > 0)
    if a >= 0:
        return value.numerator ** b << a <= value.denominator ** b
    return value.numerator ** b <= value.denominator ** b << (-a)


def format_fraction(value: Fraction) -> str:
    value = as_fraction(value)
    return f"{value.numerator}/{value.denominator}"
