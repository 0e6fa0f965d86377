import math
from fractions import Fraction as F

import pytest

from arithvol.scaling import ScaleExp, cmp_frac_exp, log_of_int


def test_cmp_rational_cases():
    assert cmp_frac_exp(F(1), F(0)) == 0
    assert cmp_frac_exp(F(2), F(0)) == 1
    assert cmp_frac_exp(F(1, 2), F(0)) == -1
    assert cmp_frac_exp(F(-3), F(5)) == -1


def test_cmp_against_e():
    assert cmp_frac_exp(F(3), F(1)) == 1
    assert cmp_frac_exp(F(27, 10), F(1)) == -1
    # a tight one: e = 2.718281828...; 271828183/100000000 is just above
    assert cmp_frac_exp(F(271828183, 10**8), F(1)) == 1
    assert cmp_frac_exp(F(271828182, 10**8), F(1)) == -1


def test_floor_certified():
    import mpmath

    assert ScaleExp(F(0), F(5)).floor() == 5
    assert ScaleExp(F(0), F(9, 2)).floor() == 4
    assert ScaleExp(F(1)).floor() == 2
    assert ScaleExp(F(2)).floor() == 7
    with mpmath.workdps(40):
        reference = int(mpmath.floor(mpmath.exp(40)))
    big = ScaleExp(F(40)).floor()
    assert big == reference
    # self-consistent against the certified comparator
    assert ScaleExp(F(40)).cmp_fraction(F(big)) > 0
    assert ScaleExp(F(40)).cmp_fraction(F(big + 1)) < 0
    assert ScaleExp(F(-1)).floor() == 0


def test_strict_vs_nonstrict_bounds():
    assert ScaleExp(F(0), F(5)).int_bound(strict=True) == 4
    assert ScaleExp(F(0), F(5)).int_bound(strict=False) == 5
    assert ScaleExp(F(0), F(9, 2)).int_bound(strict=True) == 4
    # irrational thresholds: strict and non-strict agree
    assert ScaleExp(F(1)).int_bound(True) == ScaleExp(F(1)).int_bound(False) == 2


def test_algebra():
    s = ScaleExp(F(1, 2), F(3))
    assert s.shifted(F(1, 2)) == ScaleExp(F(1), F(3))
    assert s.scaled(F(2)) == ScaleExp(F(1, 2), F(6))
    assert (s * s) == ScaleExp(F(1), F(9))
    assert s.power(3) == ScaleExp(F(3, 2), F(27))
    with pytest.raises(ValueError):
        ScaleExp(F(0), F(0))


def test_cmp_fraction_direction():
    t = ScaleExp(F(0), F(7, 2))
    assert t.cmp_fraction(F(3)) > 0
    assert t.cmp_fraction(F(7, 2)) == 0
    assert t.cmp_fraction(F(4)) < 0


def test_log_of_int_handles_huge_values():
    n = 3**5000
    assert abs(log_of_int(n) - 5000 * math.log(3)) < 1e-6
    assert log_of_int(1) == 0.0
    with pytest.raises(ValueError):
        log_of_int(0)
