"""Evaluable vector mappings with open box domains and claimed allowance data.

The testbed families here are the concrete instances every checker is
exercised on.  Each family that claims relaxed-convexity constants carries a
ParaSpec, and where calculus gives the one-sided derivative in closed form
the mapping also carries an analytic oracle so estimator output can be
cross-checked independently of the difference-quotient machinery.

Scalar families are built from a convex piecewise-linear part plus a smooth
part whose curvature is bounded by twice the claimed constant; the vector
family stacks such scalars against a positive decaying weight vector, which
keeps the claimed constants provable by hand:
for a scalar g with second derivative bounded below by -2*C, the function
g + C*x^2 is convex, and the parallelogram identity for the euclidean norm
turns that into the lam*(1-lam) allowance form with constant C exactly.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from .geometry import Box  # noqa: F401  (re-exported for config convenience)
from .geometry import NORM_KINDS, PolyCone, as_point, ensure_generators, norm, orthant
from .modulus import ParaSpec, square_modulus, zero_modulus


class OutsideDomainError(ValueError):
    """Evaluation requested outside the open domain box."""


@dataclass(eq=False)
class VectorMapping:
    """A deterministic mapping from an open box into R^m.

    claimed, when present, is the allowance data the family asserts about
    itself; checkers take it as the hypothesis under test, never as truth.
    analytic_directional(x0, h) returns the one-sided derivative where the
    family knows it in closed form, or None.  kink_locus lists domain
    coordinates where the mapping is not differentiable (ground truth for
    scan confusion tables); only one-dimensional domains use it.
    """

    domain: "Box"
    codomain_dim: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str
    claimed: ParaSpec | None = None
    analytic_directional: Callable[[np.ndarray, np.ndarray], np.ndarray | None] | None = None
    kink_locus: tuple | None = None
    domain_norm: str = "two"
    codomain_norm: str = "two"

    def __post_init__(self):
        if self.codomain_dim < 1:
            raise ValueError("codomain dimension must be positive")
        if self.domain_norm not in NORM_KINDS or self.codomain_norm not in NORM_KINDS:
            raise ValueError(f"norm tags must be one of {NORM_KINDS}")
        if self.claimed is not None and self.claimed.cone.dim != self.codomain_dim:
            raise ValueError("claimed cone dimension does not match the codomain")

    @property
    def dim(self) -> int:
        return self.domain.dim

    def eval(self, x) -> np.ndarray:
        x = as_point(x, self.domain.dim)
        if not self.domain.contains(x):
            raise OutsideDomainError(f"{self.label}: point {x.tolist()} outside the open domain box")
        out = np.asarray(self.evaluator(x), dtype=float).reshape(-1)
        if out.shape != (self.codomain_dim,):
            raise ValueError(f"{self.label}: evaluator returned shape {out.shape}, expected ({self.codomain_dim},)")
        if not np.all(np.isfinite(out)):
            raise ValueError(f"{self.label}: non-finite value at {x.tolist()}")
        return out


def known_directional(f: VectorMapping, x0, h) -> np.ndarray | None:
    """Analytic one-sided derivative when the family provides one, else None."""
    if f.analytic_directional is None:
        return None
    x0 = as_point(x0, f.domain.dim)
    if not f.domain.contains(x0):
        raise OutsideDomainError(f"{f.label}: oracle query outside the domain")
    out = f.analytic_directional(x0, np.asarray(h, dtype=float))
    return None if out is None else np.asarray(out, dtype=float).reshape(-1)


# ---------------------------------------------------------------------------
# scalar building blocks


@dataclass(frozen=True)
class PiecewiseLinear:
    """Convex piecewise-linear function in hinge form.

    kinks is a sorted tuple of (position, slope_after) pairs; slopes must be
    nondecreasing from initial_slope onward or construction fails.
    """

    initial_slope: float
    kinks: tuple = ()
    anchor: float = 0.0
    value_at_anchor: float = 0.0

    def __post_init__(self):
        kinks = tuple((float(p), float(s)) for p, s in self.kinks)
        object.__setattr__(self, "kinks", kinks)
        pos = [p for p, _ in kinks]
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("kink positions must be strictly increasing")
        slopes = [float(self.initial_slope)] + [s for _, s in kinks]
        if any(b < a for a, b in zip(slopes, slopes[1:])):
            raise ValueError("slope decrease detected: piecewise-linear part is not convex")

    def _slope_jumps(self):
        slopes = [self.initial_slope] + [s for _, s in self.kinks]
        return [(p, slopes[i + 1] - slopes[i]) for i, (p, _) in enumerate(self.kinks)]

    def value(self, x: float) -> float:
        a = self.anchor
        acc = self.value_at_anchor + self.initial_slope * (x - a)
        for p, jump in self._slope_jumps():
            acc += jump * (max(x - p, 0.0) - max(a - p, 0.0))
        return acc

    def slope_left(self, x: float) -> float:
        s = self.initial_slope
        for p, jump in self._slope_jumps():
            if p < x:
                s += jump
        return s

    def slope_right(self, x: float) -> float:
        s = self.initial_slope
        for p, jump in self._slope_jumps():
            if p <= x:
                s += jump
        return s

    @property
    def kink_positions(self) -> tuple:
        return tuple(p for p, _ in self.kinks)


class SmoothPart(Protocol):
    def value(self, x: float) -> float: ...

    def deriv(self, x: float) -> float: ...

    def second(self, x: float) -> float: ...


@dataclass(frozen=True)
class Quadratic1D:
    a: float
    b: float = 0.0
    c: float = 0.0

    def value(self, x: float) -> float:
        return self.a * x * x + self.b * x + self.c

    def deriv(self, x: float) -> float:
        return 2.0 * self.a * x + self.b

    def second(self, x: float) -> float:
        return 2.0 * self.a


@dataclass(frozen=True)
class Sine1D:
    amplitude: float
    frequency: float
    phase: float = 0.0

    def value(self, x: float) -> float:
        return self.amplitude * np.sin(self.frequency * x + self.phase)

    def deriv(self, x: float) -> float:
        return self.amplitude * self.frequency * np.cos(self.frequency * x + self.phase)

    def second(self, x: float) -> float:
        return -self.amplitude * self.frequency**2 * np.sin(self.frequency * x + self.phase)


@dataclass(frozen=True)
class ZeroPart:
    def value(self, x: float) -> float:
        return 0.0

    def deriv(self, x: float) -> float:
        return 0.0

    def second(self, x: float) -> float:
        return 0.0


def _audit_curvature(part: SmoothPart, lo: float, hi: float, bound: float, label: str, n: int = 512):
    grid = np.linspace(lo, hi, n)
    worst = max(abs(part.second(float(t))) for t in grid)
    if worst > bound * (1.0 + 1e-12) + 1e-15:
        raise ValueError(
            f"{label}: smooth-part curvature {worst:.6g} exceeds the allowed bound {bound:.6g} on the audit grid"
        )


def _one_sided_slope(u1: PiecewiseLinear, part: SmoothPart, x: float, h: float) -> float:
    if h > 0:
        branch = u1.slope_right(x)
    elif h < 0:
        branch = u1.slope_left(x)
    else:
        return 0.0
    return h * (branch + part.deriv(x))


def make_semiconvex_scalar(
    u1: PiecewiseLinear, u2: SmoothPart, C: float, domain: "Box", label: str = "semiconvex-scalar"
) -> VectorMapping:
    """Scalar family u1 + u2 with the square-gap allowance claimed at C.

    u1 must be convex (enforced by its type) and u2 must keep its curvature
    within 2*C on the domain, audited on a dense grid.  The analytic oracle
    returns the exact one-sided derivative everywhere, kinks included.
    """
    if domain.dim != 1:
        raise ValueError("scalar family needs a one-dimensional domain")
    if not np.isfinite(C) or C < 0.0:
        raise ValueError("constant must be finite and nonnegative")
    lo, hi = float(domain.lo[0]), float(domain.hi[0])
    _audit_curvature(u2, lo, hi, 2.0 * C, label)
    spec = ParaSpec(modulus=square_modulus(), k=np.array([1.0]), cone=orthant(1), C=C, C1=C)

    def _eval(x: np.ndarray) -> np.ndarray:
        t = float(x[0])
        return np.array([u1.value(t) + u2.value(t)])

    def _directional(x0: np.ndarray, h: np.ndarray):
        return np.array([_one_sided_slope(u1, u2, float(x0[0]), float(h[0]))])

    return VectorMapping(
        domain=domain,
        codomain_dim=1,
        evaluator=_eval,
        label=label,
        claimed=spec,
        analytic_directional=_directional,
        kink_locus=u1.kink_positions,
        domain_norm="two",
        codomain_norm="two",
    )


# ---------------------------------------------------------------------------
# the weighted stacked-scalar vector family


@dataclass(frozen=True)
class Example1Config:
    """Parameters of the stacked scalar family f(x) = (f_i(x) * k_i)_i on an
    interval, with f_i a convex piecewise-linear part plus a bounded-curvature
    smooth part.  k must have positive nonincreasing entries (a decaying
    weight sequence)."""

    n: int
    k: np.ndarray
    convex_parts: tuple
    smooth_parts: tuple
    C: float
    domain: "Box"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one component")
        object.__setattr__(self, "k", as_point(self.k, self.n))
        if np.any(self.k <= 0.0):
            raise ValueError("weights must be strictly positive")
        if np.any(np.diff(self.k) > 0.0):
            raise ValueError("weights must be nonincreasing (a decaying sequence)")
        if len(self.convex_parts) != self.n or len(self.smooth_parts) != self.n:
            raise ValueError("need one convex part and one smooth part per component")
        if not np.isfinite(self.C) or self.C < 0.0:
            raise ValueError("constant must be finite and nonnegative")
        if self.domain.dim != 1:
            raise ValueError("the stacked family lives on a one-dimensional domain")


def make_example1(cfg: Example1Config, label: str = "stacked-scalars") -> VectorMapping:
    """Build the stacked family and audit its structural claims.

    Rejects any component whose piecewise-linear part loses convexity or
    whose smooth part exceeds the curvature budget 2*C on the audit grid.
    The claimed allowance uses the square modulus with both constants equal
    to cfg.C, the nonnegative orthant order, and sup norm on the codomain.
    The analytic oracle covers every point off the kink set and declines
    (returns None) within 1e-12 of a kink, where only one-sided slopes exist.
    """
    lo, hi = float(cfg.domain.lo[0]), float(cfg.domain.hi[0])
    for i, (u1, u2) in enumerate(zip(cfg.convex_parts, cfg.smooth_parts)):
        slopes = [u1.initial_slope] + [s for _, s in u1.kinks]
        if any(b < a for a, b in zip(slopes, slopes[1:])):
            raise ValueError(f"component {i}: slope decrease detected, convex part is not convex")
        _audit_curvature(u2, lo, hi, 2.0 * cfg.C, f"component {i}")

    kinks = sorted({p for u1 in cfg.convex_parts for p in u1.kink_positions})
    spec = ParaSpec(modulus=square_modulus(), k=cfg.k, cone=orthant(cfg.n), C=cfg.C, C1=cfg.C)
    parts = tuple(zip(cfg.convex_parts, cfg.smooth_parts))
    weights = np.asarray(cfg.k, dtype=float)

    def _eval(x: np.ndarray) -> np.ndarray:
        t = float(x[0])
        return weights * np.array([u1.value(t) + u2.value(t) for u1, u2 in parts])

    def _directional(x0: np.ndarray, h: np.ndarray):
        t = float(x0[0])
        if kinks:
            idx = bisect.bisect_left(kinks, t)
            for j in (idx - 1, idx):
                if 0 <= j < len(kinks) and abs(kinks[j] - t) <= 1e-12:
                    return None  # only one-sided slopes exist here
        return weights * np.array([_one_sided_slope(u1, u2, t, float(h[0])) for u1, u2 in parts])

    return VectorMapping(
        domain=cfg.domain,
        codomain_dim=cfg.n,
        evaluator=_eval,
        label=label,
        claimed=spec,
        analytic_directional=_directional,
        kink_locus=tuple(kinks),
        domain_norm="two",
        codomain_norm="sup",
    )


def example1_default(n: int = 8, kinks_per_component: int = 5, C: float = 0.5) -> VectorMapping:
    """Pinned default instance: dyadic rational kinks, all distinct across
    components, weights 2^-i, alternating quadratic and sine smooth parts
    well inside the curvature budget.

    Magnitudes are deliberately modest.  The smallest weighted slope jump,
    2^-7 * 0.125, still towers over the linearity-test tolerance, while the
    value scale keeps the quotient rounding floor under that tolerance so
    the derivative estimator converges everywhere on the domain.
    """
    domain = Box(lo=[-1.0], hi=[1.0])
    convex_parts = []
    smooth_parts = []
    for i in range(n):
        s0 = -0.5 - i / 16.0
        slope = s0
        kinks = []
        for j in range(kinks_per_component):
            pos = (-48.0 + 20.0 * j + 3.0 * i) / 64.0
            slope = slope + 0.125 + 0.0625 * ((i + j) % 3)
            kinks.append((pos, slope))
        convex_parts.append(PiecewiseLinear(initial_slope=s0, kinks=tuple(kinks)))
        if i % 2 == 0:
            smooth_parts.append(Quadratic1D(a=-C * (0.4 + 0.05 * i)))
        else:
            smooth_parts.append(Sine1D(amplitude=0.3 * C, frequency=1.5))
    cfg = Example1Config(
        n=n,
        k=np.array([2.0**-i for i in range(n)]),
        convex_parts=tuple(convex_parts),
        smooth_parts=tuple(smooth_parts),
        C=C,
        domain=domain,
    )
    return make_example1(cfg, label=f"stacked-scalars-{n}x{kinks_per_component}")


# ---------------------------------------------------------------------------
# individual testbed mappings


def affine_mapping(a_matrix, offset, domain: "Box", cone: PolyCone | None = None, k=None, label: str = "affine") -> VectorMapping:
    """Affine map with the zero modulus claimed at constant zero: the
    convexity inequality holds with equality, so any cone order works."""
    a_matrix = np.atleast_2d(np.asarray(a_matrix, dtype=float))
    offset = np.asarray(offset, dtype=float).reshape(-1)
    m, d = a_matrix.shape
    if offset.shape != (m,):
        raise ValueError("offset length must match the matrix row count")
    if domain.dim != d:
        raise ValueError("domain dimension must match the matrix column count")
    if cone is None:
        cone = orthant(m)
    if k is None:
        k = np.asarray(ensure_generators(cone), dtype=float).sum(axis=0)
        k = k / max(norm(k, "two"), 1e-300)
    spec = ParaSpec(modulus=zero_modulus(), k=np.asarray(k, dtype=float), cone=cone, C=0.0, C1=0.0)

    def _eval(x: np.ndarray) -> np.ndarray:
        return a_matrix @ x + offset

    def _directional(x0: np.ndarray, h: np.ndarray):
        return a_matrix @ h

    return VectorMapping(
        domain=domain,
        codomain_dim=m,
        evaluator=_eval,
        label=label,
        claimed=spec,
        analytic_directional=_directional,
        kink_locus=(),
    )


def neg_square_1d() -> VectorMapping:
    """f(x) = -x^2 on (-1, 1): the calibration family whose allowance slack
    in the lam*(1-lam) form at constant 1 is identically zero."""
    domain = Box(lo=[-1.0], hi=[1.0])
    spec = ParaSpec(modulus=square_modulus(), k=np.array([1.0]), cone=orthant(1), C=1.0, C1=1.0)
    return VectorMapping(
        domain=domain,
        codomain_dim=1,
        evaluator=lambda x: np.array([-float(x[0]) ** 2]),
        label="neg-square",
        claimed=spec,
        analytic_directional=lambda x0, h: np.array([-2.0 * float(x0[0]) * float(h[0])]),
        kink_locus=(),
    )


def abs_1d() -> VectorMapping:
    """f(x) = |x| on (-1, 1): convex, single kink at the origin."""
    domain = Box(lo=[-1.0], hi=[1.0])
    spec = ParaSpec(modulus=zero_modulus(), k=np.array([1.0]), cone=orthant(1), C=0.0, C1=0.0)

    def _directional(x0: np.ndarray, h: np.ndarray):
        t, hh = float(x0[0]), float(h[0])
        if t > 0:
            return np.array([hh])
        if t < 0:
            return np.array([-hh])
        return np.array([abs(hh)])

    return VectorMapping(
        domain=domain,
        codomain_dim=1,
        evaluator=lambda x: np.array([abs(float(x[0]))]),
        label="abs",
        claimed=spec,
        analytic_directional=_directional,
        kink_locus=(0.0,),
    )


def neg_abs_1d() -> VectorMapping:
    """f(x) = -|x| on (-1, 1): the canonical family with no valid allowance
    constant for any modulus with ratio -> 0, used by falsification tests."""
    domain = Box(lo=[-1.0], hi=[1.0])

    def _directional(x0: np.ndarray, h: np.ndarray):
        t, hh = float(x0[0]), float(h[0])
        if t > 0:
            return np.array([-hh])
        if t < 0:
            return np.array([hh])
        return np.array([-abs(hh)])

    return VectorMapping(
        domain=domain,
        codomain_dim=1,
        evaluator=lambda x: np.array([-abs(float(x[0]))]),
        label="neg-abs",
        claimed=None,
        analytic_directional=_directional,
        kink_locus=(0.0,),
    )


def curved_cone_map(cone: PolyCone, seed: int, label: str | None = None) -> VectorMapping:
    """Affine map bent by -||x||^2 along an interior cone direction.

    The affine part cancels in the convexity slack, and the euclidean
    parallelogram identity makes the bent part's slack exactly
    (allowance - lam*(1-lam)*||x-y||^2) times the bend direction, so the
    claimed constants C = C1 = 1 are valid and the lambda form is tight.
    """
    rng = np.random.default_rng(seed)
    gens = ensure_generators(cone)
    k0 = gens.sum(axis=0)
    nk = norm(k0, "two")
    if nk <= 1e-12:
        raise ValueError("cone generators sum to zero; no interior bend direction")
    k0 = k0 / nk
    a_matrix = rng.normal(size=(cone.dim, 2))
    domain = Box(lo=[-1.0, -1.0], hi=[1.0, 1.0])
    spec = ParaSpec(modulus=square_modulus(), k=k0, cone=cone, C=1.0, C1=1.0)

    def _eval(x: np.ndarray) -> np.ndarray:
        return a_matrix @ x - float(x @ x) * k0

    def _directional(x0: np.ndarray, h: np.ndarray):
        return a_matrix @ h - 2.0 * float(x0 @ h) * k0

    return VectorMapping(
        domain=domain,
        codomain_dim=cone.dim,
        evaluator=_eval,
        label=label or f"curved-{cone.name or 'cone'}",
        claimed=spec,
        analytic_directional=_directional,
        kink_locus=(),
    )


def smooth_r2_r3() -> VectorMapping:
    """Smooth map from the plane into R^3 ordered by the orthant.

    Component Hessians are bounded below by -2 (eigenvalues at worst -1 for
    the quadratic and product parts, -1 for the sine part), so each component
    plus ||x||^2 is convex and the claimed constants C = C1 = 1 hold.
    """
    domain = Box(lo=[-1.0, -1.0], hi=[1.0, 1.0])
    spec = ParaSpec(modulus=square_modulus(), k=np.array([1.0, 1.0, 1.0]), cone=orthant(3), C=1.0, C1=1.0)

    def _eval(x: np.ndarray) -> np.ndarray:
        x1, x2 = float(x[0]), float(x[1])
        return np.array([-(x1 * x1 + x2 * x2) / 2.0, np.sin(x1) + np.sin(x2), -x1 * x2])

    def _directional(x0: np.ndarray, h: np.ndarray):
        x1, x2 = float(x0[0]), float(x0[1])
        jac = np.array([[-x1, -x2], [np.cos(x1), np.cos(x2)], [-x2, -x1]])
        return jac @ h

    return VectorMapping(
        domain=domain,
        codomain_dim=3,
        evaluator=_eval,
        label="smooth-r2-r3",
        claimed=spec,
        analytic_directional=_directional,
        kink_locus=(),
    )


def testbed_families() -> tuple:
    """The standard claimed-allowance families the acceptance suite sweeps."""
    rng_domain = Box(lo=[-1.0, -1.0], hi=[1.0, 1.0])
    affine = affine_mapping(
        np.array([[1.0, 2.0], [0.5, -1.0], [3.0, 0.0]]),
        np.array([0.1, -0.2, 0.3]),
        rng_domain,
        label="affine-2to3",
    )
    # curvature exactly fills the 2C budget, a deliberately tight instance
    hinge = make_semiconvex_scalar(
        PiecewiseLinear(initial_slope=-1.0, kinks=((-0.25, 0.25), (0.5, 1.5))),
        Quadratic1D(a=-0.5),
        C=0.5,
        domain=Box(lo=[-1.0], hi=[1.0]),
        label="hinge-plus-quadratic",
    )
    return (
        affine,
        neg_square_1d(),
        abs_1d(),
        hinge,
        example1_default(),
        smooth_r2_r3(),
    )
