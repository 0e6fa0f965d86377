"""Dense univariate polynomial helpers over Z and Q (coefficient lists, low first)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_eval(coeffs: Sequence, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(list(coeffs)):
        acc = acc * x + Fraction(c)
    return acc


def poly_degree(coeffs: Sequence) -> int:
    deg = -1
    for i, c in enumerate(coeffs):
        if c:
            deg = i
    return deg


def divide_linear(coeffs: Sequence, alpha: Fraction) -> list[Fraction]:
    """Quotient of an exact division by (t - alpha); remainder must vanish."""
    cs = [Fraction(c) for c in coeffs]
    deg = poly_degree(cs)
    if deg < 0:
        raise ValueError("zero polynomial")
    out = [Fraction(0)] * deg
    carry = cs[deg]
    for i in range(deg - 1, -1, -1):
        out[i] = carry
        carry = cs[i] + carry * alpha
    if carry != 0:
        raise ValueError("polynomial does not vanish at the given point")
    return out


def order_at(coeffs: Sequence, alpha: Fraction) -> tuple[int, Fraction]:
    """(vanishing order w at alpha, value of coeffs/(t-alpha)^w at alpha)."""
    cs = [Fraction(c) for c in coeffs]
    if poly_degree(cs) < 0:
        raise ValueError("zero polynomial")
    order = 0
    while poly_eval(cs, alpha) == 0:
        cs = divide_linear(cs, alpha)
        order += 1
    return order, poly_eval(cs, alpha)


def padic_valuation(x: Fraction, p: int) -> int:
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num = abs(x.numerator)
    while num % p == 0:
        num //= p
        v += 1
    den = x.denominator
    while den % p == 0:
        den //= p
        v -= 1
    return v


def floor_log(base: int, value: int) -> int:
    """Largest e >= 0 with base**e <= value; requires value >= 1."""
    if value < 1:
        raise ValueError("value must be >= 1")
    e = 0
    acc = base
    while acc <= value:
        acc *= base
        e += 1
    return e
