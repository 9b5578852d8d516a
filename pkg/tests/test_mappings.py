"""Mapping families: evaluation oracles, analytic derivatives, audits."""

import numpy as np
import pytest

from paracone import (
    Box,
    Example1Config,
    OutsideDomainError,
    PiecewiseLinear,
    Quadratic1D,
    Sine1D,
    VectorMapping,
    abs_1d,
    affine_mapping,
    curved_cone_map,
    example1_default,
    known_directional,
    make_example1,
    make_semiconvex_scalar,
    neg_abs_1d,
    neg_square_1d,
    orthant,
    random_simplicial_cone,
    smooth_r2_r3,
)


def _fd(f, x0, h, t=1e-7):
    """One-sided difference quotient for cross checking analytic slopes."""
    x0 = np.asarray(x0, dtype=float)
    h = np.asarray(h, dtype=float)
    return (f.eval(x0 + t * h) - f.eval(x0)) / t


# ---------------------------------------------------------------------------
# scalar building blocks


def test_piecewise_linear_values_and_slopes():
    u = PiecewiseLinear(initial_slope=-1.0, kinks=((0.0, 0.5), (1.0, 2.0)))
    assert u.value(0.0) == 0.0
    assert u.value(-2.0) == 2.0
    assert u.value(0.5) == 0.25
    assert u.value(2.0) == pytest.approx(0.5 + 2.0)
    assert u.slope_left(0.0) == -1.0
    assert u.slope_right(0.0) == 0.5
    assert u.slope_left(0.5) == 0.5
    assert u.kink_positions == (0.0, 1.0)


def test_piecewise_linear_rejects_non_convex():
    with pytest.raises(ValueError):
        PiecewiseLinear(initial_slope=1.0, kinks=((0.0, 0.0),))
    with pytest.raises(ValueError):
        PiecewiseLinear(initial_slope=0.0, kinks=((0.5, 1.0), (0.5, 2.0)))


def test_smooth_parts_derivatives():
    q = Quadratic1D(a=-0.5, b=1.0, c=2.0)
    assert q.value(2.0) == pytest.approx(2.0)
    assert q.deriv(2.0) == pytest.approx(-1.0)
    assert q.second(0.0) == -1.0
    s = Sine1D(amplitude=2.0, frequency=3.0)
    assert s.deriv(0.0) == pytest.approx(6.0)
    assert s.second(np.pi / 6.0) == pytest.approx(-18.0 * np.sin(np.pi / 2.0))


# ---------------------------------------------------------------------------
# constructors


def test_semiconvex_scalar_matches_neg_square():
    f = make_semiconvex_scalar(
        PiecewiseLinear(initial_slope=0.0),
        Quadratic1D(a=-1.0),
        C=1.0,
        domain=Box(lo=[-1.0], hi=[1.0]),
    )
    assert f.eval([0.3])[0] == pytest.approx(-0.09)
    assert known_directional(f, [0.3], [1.0])[0] == pytest.approx(-0.6)
    assert known_directional(f, [0.3], [-1.0])[0] == pytest.approx(0.6)


def test_semiconvex_scalar_audits_curvature():
    with pytest.raises(ValueError):
        make_semiconvex_scalar(
            PiecewiseLinear(initial_slope=0.0),
            Quadratic1D(a=-2.0),  # curvature 4 exceeds the 2C budget
            C=1.0,
            domain=Box(lo=[-1.0], hi=[1.0]),
        )


def test_semiconvex_scalar_one_sided_slopes_at_kink():
    f = make_semiconvex_scalar(
        PiecewiseLinear(initial_slope=-1.0, kinks=((0.25, 0.75),)),
        Quadratic1D(a=-0.25),
        C=0.5,
        domain=Box(lo=[-1.0], hi=[1.0]),
    )
    fwd = known_directional(f, [0.25], [1.0])[0]
    bwd = known_directional(f, [0.25], [-1.0])[0]
    assert fwd == pytest.approx(0.75 - 0.125)
    assert bwd == pytest.approx(-(-1.0 - 0.125))


def test_example1_structure():
    f = example1_default()
    assert f.codomain_dim == 8
    assert len(f.kink_locus) == 40
    assert len(set(f.kink_locus)) == 40  # kinks distinct across components
    assert f.codomain_norm == "sup"
    spec = f.claimed
    assert spec.C == 0.5
    assert np.array_equal(spec.k, 2.0 ** -np.arange(8))


def test_example1_oracle_declines_exactly_at_kinks():
    f = example1_default()
    kink = f.kink_locus[3]
    assert known_directional(f, [kink], [1.0]) is None
    off = kink + 1e-6
    d = known_directional(f, [off], [1.0])
    assert d is not None
    assert np.allclose(d, _fd(f, [off], [1.0]), atol=1e-5)


def test_example1_weights_decay_requirement():
    cfg_kwargs = dict(
        n=2,
        convex_parts=(PiecewiseLinear(0.0), PiecewiseLinear(0.0)),
        smooth_parts=(Quadratic1D(a=-0.5), Quadratic1D(a=-0.5)),
        C=1.0,
        domain=Box(lo=[-1.0], hi=[1.0]),
    )
    ok = make_example1(Example1Config(k=np.array([1.0, 0.5]), **cfg_kwargs))
    assert ok.eval([0.4])[1] == pytest.approx(0.5 * -0.08)  # weighted component
    with pytest.raises(ValueError):
        Example1Config(k=np.array([0.5, 1.0]), **cfg_kwargs)
    with pytest.raises(ValueError):
        Example1Config(k=np.array([1.0, -0.5]), **cfg_kwargs)


def test_affine_oracles():
    a = np.array([[1.0, 2.0], [0.5, -1.0]])
    b = np.array([0.1, -0.2])
    f = affine_mapping(a, b, Box(lo=[-1.0, -1.0], hi=[1.0, 1.0]))
    x = np.array([0.2, -0.3])
    assert np.allclose(f.eval(x), a @ x + b)
    h = np.array([0.6, 0.8])
    assert np.allclose(known_directional(f, x, h), a @ h)
    assert f.claimed.C == 0.0 and f.claimed.modulus.kind == "zero"


def test_affine_validation():
    with pytest.raises(ValueError):
        affine_mapping(np.eye(2), [1.0], Box(lo=[-1.0, -1.0], hi=[1.0, 1.0]))
    with pytest.raises(ValueError):
        affine_mapping(np.eye(2), [1.0, 0.0], Box(lo=[-1.0], hi=[1.0]))


def test_one_dimensional_references():
    f = neg_square_1d()
    assert f.eval([0.4])[0] == pytest.approx(-0.16)
    assert known_directional(f, [0.4], [1.0])[0] == pytest.approx(-0.8)

    g = abs_1d()
    assert g.eval([-0.3])[0] == 0.3
    assert known_directional(g, [0.0], [1.0])[0] == 1.0
    assert known_directional(g, [0.0], [-1.0])[0] == 1.0
    assert known_directional(g, [-0.2], [1.0])[0] == -1.0

    h = neg_abs_1d()
    assert h.claimed is None
    assert known_directional(h, [0.0], [1.0])[0] == -1.0
    assert known_directional(h, [0.0], [-1.0])[0] == -1.0


def test_curved_cone_map_directional():
    cone = random_simplicial_cone(3, seed=33)
    f = curved_cone_map(cone, seed=34)
    x = np.array([0.2, -0.1])
    h = np.array([0.6, 0.8])
    assert np.allclose(known_directional(f, x, h), _fd(f, x, h), atol=1e-5)
    # the bend direction is claimed as the allowance direction
    from paracone import contains

    assert contains(cone, f.claimed.k, tol=1e-9)


def test_smooth_r2_r3_jacobian():
    f = smooth_r2_r3()
    x = np.array([0.3, -0.4])
    for h in (np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([0.6, 0.8])):
        assert np.allclose(known_directional(f, x, h), _fd(f, x, h), atol=1e-5)


# ---------------------------------------------------------------------------
# evaluation contract


def test_domain_enforcement():
    f = neg_square_1d()
    with pytest.raises(OutsideDomainError):
        f.eval([1.0])  # boundary is outside the open box
    with pytest.raises(OutsideDomainError):
        f.eval([1.5])
    with pytest.raises(OutsideDomainError):
        known_directional(f, [1.5], [1.0])


def test_mapping_shape_validation():
    with pytest.raises(ValueError):
        VectorMapping(
            domain=Box(lo=[-1.0], hi=[1.0]),
            codomain_dim=0,
            evaluator=lambda x: np.zeros(0),
            label="bad",
        )
    bad_shape = VectorMapping(
        domain=Box(lo=[-1.0], hi=[1.0]),
        codomain_dim=2,
        evaluator=lambda x: np.zeros(3),
        label="bad-shape",
    )
    with pytest.raises(ValueError):
        bad_shape.eval([0.0])
    non_finite = VectorMapping(
        domain=Box(lo=[-1.0], hi=[1.0]),
        codomain_dim=1,
        evaluator=lambda x: np.array([float("inf")]),
        label="bad-value",
    )
    with pytest.raises(ValueError):
        non_finite.eval([0.0])


def test_claimed_cone_must_match_codomain():
    from paracone import ParaSpec, square_modulus

    spec = ParaSpec(modulus=square_modulus(), k=np.ones(3), cone=orthant(3), C=1.0)
    with pytest.raises(ValueError):
        VectorMapping(
            domain=Box(lo=[-1.0], hi=[1.0]),
            codomain_dim=2,
            evaluator=lambda x: np.zeros(2),
            label="mismatch",
            claimed=spec,
        )


def test_testbed_families_all_claim_constants(families):
    assert len(families) == 6
    for f in families:
        assert f.claimed is not None
        assert f.claimed.cone.dim == f.codomain_dim
        mid = f.domain.center
        assert np.all(np.isfinite(f.eval(mid)))
