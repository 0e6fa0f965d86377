"""The four counting inequalities, verified exactly on fixed and random instances."""

import random
from fractions import Fraction as F

import pytest

from arithvol.scaling import ScaleExp
from arithvol.spaces import (COEFF_MAX, AdelicSpace, ArchNorm,
                             FiltrationInstance, RescaleInstance,
                             SequenceInstance, random_lemma_instance,
                             run_lemma_suite, verify_counting_inequality)


def line(scale=ScaleExp()):
    return AdelicSpace(1, ((1,),), ArchNorm(COEFF_MAX, scale))


def plane(scale=ScaleExp()):
    return AdelicSpace(2, ((1, 0), (0, 1)), ArchNorm(COEFF_MAX, scale))


def test_rescale_zero_shift_has_zero_slack():
    rep = verify_counting_inequality("rescale", RescaleInstance(line(), F(0)))
    assert rep.satisfied
    lower = next(e for e in rep.details if e.name == "rescale-lower")
    assert lower.slack == 0.0


def test_rescale_fixed_instances():
    for lam in (F(1, 2), F(1), F(2)):
        rep = verify_counting_inequality(
            "rescale", RescaleInstance(plane(ScaleExp(F(1, 2))), lam))
        assert rep.satisfied, (lam, rep)


def test_rescale_rejects_negative_shift():
    with pytest.raises(ValueError):
        verify_counting_inequality("rescale", RescaleInstance(line(), F(-1)))


def test_single_step_filtration_reduces_to_image_bound():
    sp = plane(ScaleExp(F(0), F(3)))
    rep = verify_counting_inequality("filtration", FiltrationInstance(sp, ()))
    assert rep.satisfied
    # l = 1: the bound reads #sections(unscaled) >= #distinct sections
    for e in rep.details:
        assert e.slack >= 0


def test_two_step_filtration_fixed():
    sp = plane(ScaleExp(F(0), F(3)))
    rep = verify_counting_inequality(
        "filtration", FiltrationInstance(sp, (((1, 0),),)))
    assert rep.satisfied


def test_exact_sequence_fixed():
    sp = plane(ScaleExp(F(0), F(2)))
    inst = SequenceInstance(sp, ((1, 0),))
    assert verify_counting_inequality("exact_seq", inst).satisfied
    assert verify_counting_inequality("combined", inst).satisfied


def test_quot_exact_fixed():
    sp = plane(ScaleExp(F(0), F(2)))
    inst = SequenceInstance(sp, ((1, 0),), ((F(1, 2), F(1)),))
    rep = verify_counting_inequality("quot_exact", inst)
    assert rep.satisfied
    assert {e.name for e in rep.details} == {"diagram-upper", "diagram-lower"}


def test_interval_mode_is_rejected():
    sp = AdelicSpace(1, ((1,),),
                     ArchNorm("circle-sup-interval", ScaleExp(F(1))))
    with pytest.raises(ValueError):
        verify_counting_inequality("rescale", RescaleInstance(sp, F(1)))


def test_unknown_kind():
    with pytest.raises(ValueError):
        verify_counting_inequality("nope", RescaleInstance(line(), F(0)))


@pytest.mark.parametrize("kind", ["rescale", "exact_seq", "combined",
                                  "filtration", "quot_exact"])
def test_random_instances_all_satisfied(kind):
    rng = random.Random(f"unit-{kind}")
    for _ in range(40):
        inst = random_lemma_instance(kind, rng, budget=30_000)
        rep = verify_counting_inequality(kind, inst)
        assert rep.satisfied, (kind, inst, rep)


def test_suite_runner_shape():
    res = run_lemma_suite(["rescale", "combined"], 5, seed=3, budget=20_000)
    assert len(res) == 10
    kinds = {k for k, _, _ in res}
    assert kinds == {"rescale", "combined"}
    assert all(rep.satisfied for _, _, rep in res)
    # determinism: same seed, same slacks
    res2 = run_lemma_suite(["rescale", "combined"], 5, seed=3, budget=20_000)
    assert [(k, i, r.slack) for k, i, r in res] == \
        [(k, i, r.slack) for k, i, r in res2]
