import random
from fractions import Fraction as F

import pytest

from arithvol.flags import (FlagSpec, valuation, valuation_cloud,
                            valuation_of_value, validate_good_flag)
from arithvol.models import PairSpec
from arithvol.polynomials import poly_mul


def test_good_flag_reports():
    assert validate_good_flag(FlagSpec(F(0), 2)).ok
    assert validate_good_flag(FlagSpec(F(3), 5)).ok
    bad = validate_good_flag(FlagSpec(F(1, 2), 2))
    assert not bad.ok and not bad.closed_point_rational
    # p-integral rational centers are fine
    assert validate_good_flag(FlagSpec(F(1, 3), 2)).ok


def test_prime_is_validated_at_construction():
    with pytest.raises(ValueError):
        FlagSpec(F(0), 4)
    with pytest.raises(ValueError):
        FlagSpec(F(0), 1)


def test_hand_valuations():
    assert valuation(FlagSpec(F(0), 2), [0, 0, 0, 1]).components == (3, 0)
    assert valuation(FlagSpec(F(0), 2), [4, 0, 1]).components == (0, 2)
    # 2(t-1)^2 = 2 - 4t + 2t^2 at center 1, p = 2
    assert valuation(FlagSpec(F(1), 2), [2, -4, 2]).components == (2, 1)


def test_valuation_rejects_zero():
    with pytest.raises(ValueError):
        valuation(FlagSpec(F(0), 2), [0, 0])
    with pytest.raises(ValueError):
        valuation_of_value(FlagSpec(F(0), 2, "restricted"), F(0))


def test_valuation_additivity():
    rng = random.Random(500)
    flag = FlagSpec(F(1, 3), 5)
    done = 0
    while done < 500:
        a = [rng.randint(-5, 5) for _ in range(rng.randint(1, 5))]
        b = [rng.randint(-5, 5) for _ in range(rng.randint(1, 5))]
        if not any(a) or not any(b):
            continue
        wa = valuation(flag, a)
        wb = valuation(flag, b)
        wab = valuation(flag, poly_mul(a, b))
        assert wab.components == (wa + wb).components
        done += 1


def test_second_component_nonnegative_for_integer_inputs():
    rng = random.Random(9)
    flag = FlagSpec(F(3, 7), 2)  # denominator 7 is 2-free
    for _ in range(200):
        coeffs = [rng.randint(-6, 6) for _ in range(rng.randint(1, 6))]
        if not any(coeffs):
            continue
        w = valuation(flag, coeffs)
        assert w.components[1] >= 0


def test_cloud_example():
    cloud, distinct = valuation_cloud(
        [(0, 1, 0), (0, 2, 0), (0, 0, 1)], FlagSpec(F(0), 2))
    assert distinct == 3
    keys = {v.components for v in cloud}
    assert keys == {(1, 0), (1, 1), (2, 0)}


def test_cloud_edge_cases():
    assert valuation_cloud([], FlagSpec(F(0), 2))[1] == 0
    assert valuation_cloud([(0, 0)], FlagSpec(F(0), 2))[1] == 0
    rng = random.Random(3)
    secs = [tuple(rng.randint(-3, 3) for _ in range(4)) for _ in range(30)]
    cloud, distinct = valuation_cloud(secs, FlagSpec(F(0), 3))
    assert distinct <= sum(1 for s in secs if any(s))


def test_restricted_values():
    flag = FlagSpec(F(0), 3, "restricted")
    assert valuation_of_value(flag, F(18)).components == (2,)
    assert valuation_of_value(flag, F(1, 3)).components == (-1,)
    cloud, distinct = valuation_cloud([F(1), F(3), F(9), F(-3), F(0)], flag)
    assert distinct == 3


def test_scaled_valuations_land_in_the_range_body():
    from arithvol.flags import FULL
    from arithvol.lab import YM_FULL, build_okounkov_body
    from arithvol.scaling import ScaleExp

    spec = PairSpec(degree=1, arch_scale=F(1))
    flag = FlagSpec(F(0), 2, FULL)
    body, _ = build_okounkov_body(spec, flag, YM_FULL, range(1, 9))
    m = 6
    bound = ScaleExp(F(m)).int_bound(strict=True)
    rng = random.Random(77)
    for _ in range(200):
        sec = tuple(rng.randint(-bound, bound) for _ in range(m + 1))
        if not any(sec):
            continue
        w = valuation(flag, sec)
        point = (F(w.components[0], m), F(w.components[1], m))
        assert point in body
