"""Inequality checkers, falsification, and the scalar side conditions."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paracone import (
    Box,
    ParaSpec,
    SampleTriple,
    check_approx_convex,
    check_fact2,
    check_inequality,
    check_local_vector_bounded,
    check_vector_lipschitz,
    curved_cone_map,
    dyadic_small_gap_triples,
    falsify,
    neg_abs_1d,
    neg_square_1d,
    orthant,
    random_simplicial_cone,
    sample_triples,
    scalarize_check,
    square_modulus,
    zero_modulus,
)
from paracone.geometry import contains, unit_dual_generators


# ---------------------------------------------------------------------------
# sampling


def test_sample_triples_deterministic_and_in_box():
    box = Box(lo=[-1.0, 0.0], hi=[1.0, 2.0])
    a = sample_triples(box, 200, seed=5)
    b = sample_triples(box, 200, seed=5)
    assert len(a) == 200
    for ta, tb in zip(a, b):
        assert np.array_equal(ta.x, tb.x) and np.array_equal(ta.y, tb.y) and ta.lam == tb.lam
        assert box.contains(ta.x) and box.contains(ta.y)
        assert 0.0 <= ta.lam <= 1.0
    c = sample_triples(box, 200, seed=6)
    assert any(not np.array_equal(ta.x, tc.x) for ta, tc in zip(a, c))


def test_dyadic_schedule_halves_gaps():
    box = Box(lo=[-1.0], hi=[1.0])
    triples = dyadic_small_gap_triples(box, n_gaps=6)
    gaps = [abs(t.x[0] - t.y[0]) for t in triples[:6]]
    for wide, narrow in zip(gaps, gaps[1:]):
        assert narrow == pytest.approx(0.5 * wide)
    assert all(box.contains(t.x) and box.contains(t.y) and t.lam == 0.5 for t in triples)


def test_sample_triple_validation():
    with pytest.raises(ValueError):
        SampleTriple(x=np.zeros(1), y=np.zeros(1), lam=1.5)
    t = SampleTriple(x=np.array([0.0]), y=np.array([1.0]), lam=0.25)
    assert t.mid[0] == pytest.approx(0.75)


# ---------------------------------------------------------------------------
# direct and scalarized inequality checks


def test_exact_constant_is_tight_in_lambda_form():
    f = neg_square_1d()
    rep = check_inequality(f, f.claimed, form="lambda", budget=3000, seed=1, tol=1e-12)
    assert rep.passed
    # the allowance exactly cancels the concavity defect, so the worst slack
    # is floating-point residue around zero
    assert abs(rep.worst_margin) < 1e-13


def test_min_form_dominates_lambda_form():
    f = neg_square_1d()
    rep = check_inequality(f, f.claimed, form="min", budget=3000, seed=1, tol=1e-12)
    assert rep.passed
    assert rep.worst_margin >= -1e-15


def test_undersized_constant_is_rejected():
    f = neg_square_1d()
    bad = dataclasses.replace(f.claimed, C1=0.99)
    rep = check_inequality(f, bad, form="lambda", budget=3000, seed=1, tol=1e-12)
    assert not rep.passed
    assert rep.worst_margin < -1e-6
    assert isinstance(rep.witness, SampleTriple)


def test_margin_symmetric_under_weight_flip():
    f = neg_square_1d()
    spec = f.claimed
    rng = np.random.default_rng(7)
    for _ in range(50):
        x, y = rng.uniform(-0.9, 0.9, size=2)
        lam = float(rng.uniform())
        t1 = SampleTriple(x=np.array([x]), y=np.array([y]), lam=lam)
        t2 = SampleTriple(x=np.array([y]), y=np.array([x]), lam=1.0 - lam)
        m1 = check_inequality(f, spec, form="min", triples=[t1]).worst_margin
        m2 = check_inequality(f, spec, form="min", triples=[t2]).worst_margin
        assert m1 == pytest.approx(m2, abs=1e-13)


def test_scalarized_route_agrees_bitwise_on_orthant(families):
    for f in families:
        spec = f.claimed
        triples = sample_triples(f.domain, 300, seed=9)
        direct = check_inequality(f, spec, form="min", triples=triples)
        rows = list(unit_dual_generators(spec.cone))
        scal = scalarize_check(f, spec, rows, form="min", triples=triples)
        assert direct.passed == scal.passed
        assert direct.worst_margin == scal.worst_margin  # same kernel, same floats


def test_scalarize_audits_functionals():
    f = neg_square_1d()
    with pytest.raises(ValueError):
        scalarize_check(f, f.claimed, [np.array([-1.0])], budget=10, seed=0)


def test_dimension_mismatch_is_rejected():
    f = neg_square_1d()
    spec3 = ParaSpec(modulus=square_modulus(), k=np.ones(3), cone=orthant(3), C=1.0)
    with pytest.raises(ValueError):
        check_inequality(f, spec3, budget=10, seed=0)


@settings(max_examples=10)
@given(st.integers(min_value=0, max_value=10_000))
def test_affine_margins_never_negative(seed):
    """Equality families pass both forms regardless of the sampling seed."""
    from paracone import affine_mapping

    rng = np.random.default_rng(seed)
    f = affine_mapping(
        rng.normal(size=(2, 2)),
        rng.normal(size=2),
        Box(lo=[-1.0, -1.0], hi=[1.0, 1.0]),
    )
    for form in ("min", "lambda"):
        rep = check_inequality(f, f.claimed, form=form, budget=64, seed=seed, tol=1e-9)
        assert rep.passed


# ---------------------------------------------------------------------------
# falsification


def test_falsify_finds_small_gap_violation():
    f = neg_abs_1d()
    spec = ParaSpec(modulus=square_modulus(), k=np.array([1.0]), cone=orthant(1), C=10.0)
    rep = falsify(f, spec, form="min", budget=1000, seed=3)
    assert not rep.passed
    gap = abs(rep.witness.x[0] - rep.witness.y[0])
    assert gap < 0.1
    assert "structured" in rep.notes


def test_falsify_witness_replays_identically():
    f = neg_abs_1d()
    spec = ParaSpec(modulus=square_modulus(), k=np.array([1.0]), cone=orthant(1), C=10.0)
    rep = falsify(f, spec, form="min", budget=500, seed=3)
    replay = check_inequality(f, spec, form="min", triples=[rep.witness])
    assert not replay.passed
    assert replay.worst_margin == rep.worst_margin


def test_falsify_passes_on_convex_family():
    from paracone import abs_1d

    f = abs_1d()
    rep = falsify(f, f.claimed, form="min", budget=400, seed=4)
    assert rep.passed
    assert "no violation" in rep.notes


def test_refinement_only_sharpens():
    f = neg_abs_1d()
    spec = ParaSpec(modulus=square_modulus(), k=np.array([1.0]), cone=orthant(1), C=10.0)
    raw = falsify(f, spec, budget=500, seed=3, refine=False)
    sharp = falsify(f, spec, budget=500, seed=3, refine=True)
    assert sharp.worst_margin <= raw.worst_margin


# ---------------------------------------------------------------------------
# midpoint convexity of the shifted scalarization


def test_fact2_shift_exactly_cancels():
    f = neg_square_1d()
    rep = check_fact2(f, f.claimed, np.array([1.0]), budget=800, seed=5)
    assert rep.passed
    assert abs(rep.worst_margin) < 1e-12  # g is identically zero here


def test_fact2_detects_undersized_constant():
    f = neg_square_1d()
    bad = dataclasses.replace(f.claimed, C=None, C1=0.99)
    rep = check_fact2(f, bad, np.array([1.0]), budget=800, seed=5)
    assert not rep.passed


def test_fact2_requires_square_modulus():
    from paracone import abs_1d

    f = abs_1d()  # claimed modulus is zero
    with pytest.raises(ValueError):
        check_fact2(f, f.claimed, np.array([1.0]), budget=10, seed=0)


def test_fact2_audits_functional():
    f = neg_square_1d()
    with pytest.raises(ValueError):
        check_fact2(f, f.claimed, np.array([-1.0]), budget=10, seed=0)


# ---------------------------------------------------------------------------
# approximate convexity


def test_approx_convex_gap_regimes():
    f = neg_square_1d()
    eps = 0.1
    # within a ball of radius eps/2 the gap stays at or below eps, so the
    # linear allowance beats the quadratic defect
    assert check_approx_convex(f, [0.0], epsilon=eps, delta=eps / 2.0, budget=600, seed=6).passed
    # at radius eps the axis probes reach gaps near 2*eps and the defect wins
    rep = check_approx_convex(f, [0.0], epsilon=eps, delta=eps, budget=600, seed=6)
    assert not rep.passed
    assert abs(rep.witness.x[0] - rep.witness.y[0]) > eps


def test_approx_convex_trivial_for_convex():
    from paracone import abs_1d

    rep = check_approx_convex(abs_1d(), [0.2], epsilon=0.01, delta=0.05, budget=300, seed=7)
    assert rep.passed


def test_approx_convex_preconditions():
    f = neg_square_1d()
    with pytest.raises(ValueError):
        check_approx_convex(f, [0.95], epsilon=0.1, delta=0.2, budget=10, seed=0)
    with pytest.raises(ValueError):
        check_approx_convex(f, [0.0], epsilon=-0.1, delta=0.1, budget=10, seed=0)
    from paracone import smooth_r2_r3

    with pytest.raises(ValueError):
        check_approx_convex(smooth_r2_r3(), [0.0, 0.0], epsilon=0.1, delta=0.1, budget=10, seed=0)


# ---------------------------------------------------------------------------
# local vector bounds and Lipschitz sandwich


def test_bounded_witness_oracle():
    f = neg_square_1d()
    rep = check_local_vector_bounded(f, orthant(1), [0.0], radius=0.5, budget=256, seed=8)
    assert rep.passed
    k_bar = rep.extras["k_bar"]
    assert k_bar[0] == pytest.approx(0.25, abs=1e-6)  # sup of |f| on the ball


def test_bounded_general_cone_witness_is_member():
    cone = random_simplicial_cone(3, seed=35)
    f = curved_cone_map(cone, seed=36)
    rep = check_local_vector_bounded(f, cone, [0.0, 0.0], radius=0.4, budget=256, seed=9)
    assert rep.passed
    assert contains(cone, rep.extras["k_bar"], tol=1e-9)


def test_bounded_rejects_escaping_ball():
    f = neg_square_1d()
    with pytest.raises(ValueError):
        check_local_vector_bounded(f, orthant(1), [0.9], radius=0.2, budget=16, seed=0)


def test_lipschitz_constant_oracle():
    f = neg_square_1d()
    region = Box(lo=[-0.5], hi=[0.5])
    rep = check_vector_lipschitz(f, f.claimed, region, budget=512, seed=10)
    assert rep.passed
    big_l = rep.extras["L"]
    # |u^2 - x^2| = |u + x| * |u - x| with |u + x| < 1 on this region
    assert 0.7 <= big_l <= 1.0 + 1e-12
    assert rep.extras["gamma"] == 1.0  # orthant normality


def test_lipschitz_region_must_stay_inside():
    f = neg_square_1d()
    with pytest.raises(ValueError):
        check_vector_lipschitz(f, f.claimed, Box(lo=[-2.0], hi=[0.5]), budget=16, seed=0)


# ---------------------------------------------------------------------------
# reports


def test_report_serialization_roundtrip():
    import json

    f = neg_square_1d()
    rep = check_inequality(f, f.claimed, budget=50, seed=11)
    payload = json.dumps(rep.to_dict())
    back = json.loads(payload)
    assert back["pass"] is True
    assert back["samples_used"] == 50
    assert "witness" in back
