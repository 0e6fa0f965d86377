"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the ledger lines; the
assertions carry exactly the stated tolerances.
"""

import math
import random
import time
from fractions import Fraction as F

from arithvol import lab
from arithvol.flags import FULL, RESTRICTED, FlagSpec, valuation
from arithvol.geometry import minkowski_sum, polytope_volume
from arithvol.models import PairSpec, pair_sum
from arithvol.polynomials import poly_mul
from arithvol.spaces import run_lemma_suite

CAP = 10**7


def report(criterion: int, ok: bool, detail: str):
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_01_counting_lemma_suite():
    t0 = time.time()
    kinds = ("rescale", "combined", "filtration", "quot_exact")
    results = run_lemma_suite(kinds, 300, seed=7, budget=200_000, cap=CAP)
    elapsed = time.time() - t0
    violations = [r for r in results if not r[2].satisfied]
    ok = not violations and len(results) == 1200 and elapsed < 120
    report(1, ok, f"1200 exact checks (4 kinds x 300 instances), "
                  f"{len(violations)} violations, {elapsed:.1f}s")


def test_criterion_02_valuation_law():
    flag = FlagSpec(F(0), 2, FULL)
    assert valuation(flag, [0, 0, 0, 1]).components == (3, 0)
    assert valuation(flag, [4, 0, 1]).components == (0, 2)
    assert valuation(FlagSpec(F(1), 2, FULL), [2, -4, 2]).components == (2, 1)
    rng = random.Random(2024)
    flag2 = FlagSpec(F(1, 3), 5, FULL)
    done = 0
    while done < 500:
        a = [rng.randint(-6, 6) for _ in range(rng.randint(1, 6))]
        b = [rng.randint(-6, 6) for _ in range(rng.randint(1, 6))]
        if not any(a) or not any(b):
            continue
        wa, wb = valuation(flag2, a), valuation(flag2, b)
        if valuation(flag2, poly_mul(a, b)).components != \
                (wa + wb).components:
            report(2, False, f"additivity broke at {a} * {b}")
        done += 1
    report(2, True, "additivity exact on 500 pairs; hand examples reproduced")


def test_criterion_03_toric_arithmetic_volume():
    t0 = time.time()
    est = lab.truncated_avol(PairSpec(1, F(1)), F(0), range(8, 41), cap=CAP)
    elapsed = time.time() - t0
    ok = abs(est.extrapolated - 2.0) <= 0.05 * 2.0 and elapsed < 300
    report(3, ok, f"extrapolated {est.extrapolated:.4f} vs 2.0 "
                  f"(residual {est.fit_residual:.2e}), {elapsed:.1f}s")


def test_criterion_04_okounkov_body():
    spec = PairSpec(1, F(1))
    flag = FlagSpec(F(0), 2, FULL)
    body, _ = lab.build_okounkov_body(spec, flag, lab.YM_FULL, range(1, 41),
                                      cap=CAP)
    vol = float(polytope_volume(body))
    target = 1 / math.log(2)
    est = lab.truncated_avol(spec, F(0), range(1, 41), cap=CAP)
    scaled = 2 * vol * math.log(2)
    ok_vol = abs(vol - target) <= 0.1 * target
    ok_consistency = abs(scaled - est.extrapolated) <= 0.1 * est.extrapolated
    report(4, ok_vol and ok_consistency,
           f"body volume {vol:.4f} vs {target:.4f}; "
           f"2! vol log p = {scaled:.4f} vs extrapolation {est.extrapolated:.4f}")


def test_criterion_05_restricted_volume():
    spec = PairSpec(1, F(1))
    est = lab.truncated_restricted_vol(spec, "CL", range(8, 41), cap=CAP)
    ok_est = abs(est.extrapolated - 1.0) <= 0.05
    eps = F(1, 10)
    sandwich_ok = True
    for m in range(8, 41):
        quot = lab.restricted_section_set(spec, m, variant="quot", cap=CAP)
        img = lab.restricted_section_set(spec, m, variant="image", cap=CAP)
        inc = lab.check_inclusions(spec, eps, m, 1, cap=CAP)
        if not (img.subset_of(quot) and inc.ok):
            sandwich_ok = False
            break
    report(5, ok_est and sandwich_ok,
           f"restricted extrapolation {est.extrapolated:.4f} vs 1.0; "
           f"quotient sandwich exact at every m in 8..40: {sandwich_ok}")


def test_criterion_06_discrepancy_bound():
    specs = [
        (PairSpec(1, F(1)), 2),
        (PairSpec(2, F(1, 2)), 3),
        (PairSpec(1, F(3, 2), vanishing=((F(0), F(1, 4)),)), 5),
    ]
    violations = []
    for spec, p in specs:
        flag = FlagSpec(F(0), p, RESTRICTED)
        for m in range(2, 31):
            rep = lab.count_valuation_discrepancy(spec, flag, "CL", m,
                                                  cap=CAP)
            if not rep.satisfied:
                violations.append((spec.degree, p, m))
    report(6, not violations,
           f"3 specs x m in 2..30, certified-upper rate: "
           f"{len(violations)} violations")


def test_criterion_07_derivative_experiment():
    t0 = time.time()
    spec = PairSpec(1, F(1), vanishing=((F(0), F(1, 4)),))
    rep = lab.derivative_experiment(
        spec, [F(1, 16), F(-1, 16), F(1, 8), F(-1, 8)], range(8, 41), cap=CAP)
    elapsed = time.time() - t0
    sym = rep.symmetric_estimate
    mean_left = sum(rep.left_slopes) / len(rep.left_slopes)
    mean_right = sum(rep.right_slopes) / len(rep.right_slopes)
    ok_sym = abs(sym - (-2.0)) <= 0.1 * 2.0
    ok_gap = abs(mean_left - mean_right) <= 0.1 * abs(sym)
    ok_oracle = abs(abs(sym) - rep.oracle_value) <= 0.1 * rep.oracle_value
    ok = ok_sym and ok_gap and ok_oracle and elapsed < 900
    report(7, ok, f"symmetric slope {sym:.4f} vs -2.0; "
                  f"left/right gap {abs(mean_left - mean_right):.4f}; "
                  f"oracle comparison gap {rep.relative_gap:.4%}; "
                  f"{elapsed:.1f}s")


def test_criterion_08_homogeneity():
    rep = lab.check_homogeneity_bm(PairSpec(1, F(1)), 2, range(1, 21),
                                   cap=CAP)
    ok_ratio = abs(rep.restricted_ratio - 2.0) <= 0.05 * 2.0
    report(8, rep.identity_exact and ok_ratio,
           f"level identity exact at m in 1..20: {rep.identity_exact}; "
           f"scale-2 restricted ratio {rep.restricted_ratio:.4f} vs 2.0")


def test_criterion_09_brunn_minkowski():
    s1 = PairSpec(1, F(1))
    s2 = PairSpec(1, F(1, 2))
    window = range(8, 33)
    v1 = lab.truncated_restricted_vol(s1, "CL", window, cap=CAP).extrapolated
    v2 = lab.truncated_restricted_vol(s2, "CL", window, cap=CAP).extrapolated
    v12 = lab.truncated_restricted_vol(pair_sum(s1, s2), "CL", window,
                                       cap=CAP).extrapolated
    ok_est = v12 >= (v1 + v2) * (1 - 0.02)
    flag = FlagSpec(F(0), 2, RESTRICTED)
    b1, _ = lab.build_okounkov_body(s1, flag, lab.RESTRICTED_CL,
                                    list(window), cap=CAP)
    b2, _ = lab.build_okounkov_body(s2, flag, lab.RESTRICTED_CL,
                                    list(window), cap=CAP)
    bsum = minkowski_sum(b1, b2)
    exact_bm = polytope_volume(bsum) >= \
        polytope_volume(b1) + polytope_volume(b2)
    report(9, ok_est and exact_bm,
           f"estimates {v12:.4f} >= {v1:.4f} + {v2:.4f} (2% slack); "
           f"body sum exact: {exact_bm}")


def test_criterion_10_sandwich_and_estimates():
    spec = PairSpec(1, F(1))
    fe_fail = [(m, n) for m in range(2, 21) for n in (0, 1, 2)
               if not lab.check_fe_bounds(spec, n, m, cap=CAP).satisfied]
    reps = lab.check_estimates_II(spec, FlagSpec(F(0), 2, FULL), F(1, 4),
                                  1.0, range(8, 33), cap=CAP)
    trend = lab.estimates_slack_trend(reps)
    slacks_ok = (trend["lower_slack_slope"] <= 0.05
                 and trend["upper_slack_slope"] <= 0.05
                 and all(r.satisfied for r in reps))
    report(10, not fe_fail and slacks_ok,
           f"sandwich bounds: {len(fe_fail)} failures over m in 2..20, "
           f"n in 0..2; slack slopes "
           f"({trend['lower_slack_slope']:.3g}, {trend['upper_slack_slope']:.3g})")
