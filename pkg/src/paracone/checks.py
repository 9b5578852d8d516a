"""Checkers and falsifiers for the relaxed-convexity inequalities.

Every checker reduces its vector inequality to scalar slacks through the
cone's unit supporting functionals and reports the most negative slack as
worst_margin, scaled relative to the sampled value magnitudes.  The boolean
verdict is exactly worst_margin >= -tol, which for a polyhedral cone in
inequality form is the cone membership test itself, so the verdict and the
margin can never disagree.

Sampling mixes seeded uniform triples with a deterministic dyadic small-gap
schedule: the characteristic failure mode of these inequalities lives at
small ||x - y|| where the allowance term vanishes faster than the gap, and
uniform sampling alone essentially never lands there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    Box,
    DualFunctional,
    ensure_generators,
    is_standard_orthant,
    norm,
    normality_constant,
    unit_dual_generators,
)
from .mappings import VectorMapping
from .modulus import ParaSpec, eval_modulus
from .reports import CheckReport


@dataclass(frozen=True)
class SampleTriple:
    """One instance of the quantified variables: endpoints and the mixing
    weight.  The segment point lam*x + (1-lam)*y stays in the (convex)
    domain box whenever the endpoints do."""

    x: np.ndarray
    y: np.ndarray
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("mixing weight must lie in [0, 1]")

    @property
    def mid(self) -> np.ndarray:
        return self.lam * self.x + (1.0 - self.lam) * self.y


def dyadic_small_gap_triples(box: Box, n_gaps: int = 14) -> list:
    """Deterministic schedule of midpoint triples with geometrically
    shrinking gaps around a few interior anchor points.

    Anchors sit at box fractions 1/2, 1/4, 3/4 along the diagonal; probe
    directions are the coordinate axes plus the main diagonal; gaps halve
    n_gaps times from just under the anchor's boundary clearance.
    """
    d = box.dim
    width = box.hi - box.lo
    dirs = [np.eye(d)[i] for i in range(d)]
    diag = np.ones(d) / math.sqrt(d)
    if not any(np.allclose(diag, u) for u in dirs):
        dirs.append(diag)
    out = []
    for frac in (0.5, 0.25, 0.75):
        c = box.lo + frac * width
        for u in dirs:
            span = 0.9 * min(box.boundary_distance(c, u), box.boundary_distance(c, -u))
            if span <= 0.0:
                continue
            for j in range(1, n_gaps + 1):
                t = span * 2.0**-j
                out.append(SampleTriple(x=c - t * u, y=c + t * u, lam=0.5))
    return out


def sample_triples(box: Box, budget: int, seed: int, structured: bool = True) -> list:
    """budget triples: the dyadic schedule first (when structured), then
    seeded uniform fill with every third pair contracted to a small gap."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    triples = dyadic_small_gap_triples(box) if structured else []
    triples = triples[:budget]
    rng = np.random.default_rng(seed)
    while len(triples) < budget:
        x = box.sample(1, rng)[0]
        y = box.sample(1, rng)[0]
        lam = float(rng.uniform())
        if len(triples) % 3 == 2:
            y = x + (y - x) * 2.0 ** -float(rng.integers(1, 12))
        triples.append(SampleTriple(x=x, y=y, lam=lam))
    return triples


def _allowance_coef(form: str, constant: float, lam: float) -> float:
    if form == "min":
        return constant * min(lam, 1.0 - lam)
    if form == "lambda":
        return constant * lam * (1.0 - lam)
    raise ValueError(f"unknown allowance form {form!r}; expected 'min' or 'lambda'")


def _margins_for_rows(rows, fx, fy, fmid, lam, coef, k, codomain_norm: str) -> np.ndarray:
    """Scalar slacks of one triple through the given functionals.

    slack_j = lam*row_j(fx) + (1-lam)*row_j(fy) + coef*row_j(k) - row_j(fmid),
    divided by 1 + ||fx|| + ||fy|| so tolerances mean the same thing for
    large-magnitude families.  Shared verbatim by the direct checker and the
    scalarized checker so their margins agree bitwise on identical inputs.
    """
    raw = lam * (rows @ fx) + (1.0 - lam) * (rows @ fy) + coef * (rows @ k) - rows @ fmid
    scale = 1.0 + norm(fx, codomain_norm) + norm(fy, codomain_norm)
    return raw / scale


def _triple_margins(f: VectorMapping, spec: ParaSpec, rows, form: str, triple: SampleTriple) -> np.ndarray:
    constant = spec.constant(form)
    fx = f.eval(triple.x)
    fy = f.eval(triple.y)
    fmid = f.eval(triple.mid)
    gap = norm(triple.x - triple.y, f.domain_norm)
    coef = _allowance_coef(form, constant, triple.lam) * eval_modulus(spec.modulus, gap)
    return _margins_for_rows(rows, fx, fy, fmid, triple.lam, coef, spec.k, f.codomain_norm)


def _check_rows(
    f: VectorMapping,
    spec: ParaSpec,
    rows,
    form: str,
    budget: int,
    seed: int,
    tol: float,
    triples,
) -> CheckReport:
    if spec.cone.dim != f.codomain_dim:
        raise ValueError("spec cone dimension does not match the mapping codomain")
    if triples is None:
        triples = sample_triples(f.domain, budget, seed)
    if not triples:
        raise ValueError("no triples to check")
    worst = np.inf
    witness = None
    for triple in triples:
        margins = _triple_margins(f, spec, rows, form, triple)
        m = float(np.min(margins)) if margins.size else 0.0
        if m < worst:
            worst = m
            witness = triple
    return CheckReport(
        passed=bool(worst >= -tol),
        worst_margin=float(worst),
        witness=witness,
        samples_used=len(triples),
        tol=tol,
        seed=seed,
        notes=f"form={form}",
    )


def check_inequality(
    f: VectorMapping,
    spec: ParaSpec,
    form: str = "min",
    budget: int = 1000,
    seed: int = 0,
    tol: float = 1e-9,
    triples=None,
) -> CheckReport:
    """Direct test of the cone inequality on sampled triples.

    For each triple the slack lam*f(x) + (1-lam)*f(y) + c(lam)*modulus(gap)*k
    - f(segment point) is pushed through the unit supporting functionals;
    the check passes when every scalar slack clears -tol (relative scale).
    c(lam) is C*min(lam, 1-lam) in the min form, C1*lam*(1-lam) otherwise.
    """
    rows = unit_dual_generators(spec.cone)
    return _check_rows(f, spec, rows, form, budget, seed, tol, triples)


def scalarize_check(
    f: VectorMapping,
    spec: ParaSpec,
    functionals,
    form: str = "min",
    budget: int = 1000,
    seed: int = 0,
    tol: float = 1e-9,
    triples=None,
) -> CheckReport:
    """Scalar relaxed convexity of y*(f) with constant scaled by y*(k), for
    each supplied functional from the dual cone.

    Functionals are audited against the spec cone's dual and scaled to unit
    length (scalar relaxed convexity is invariant under positive scaling);
    the zero functional is legal and contributes an identically zero slack.
    When the functionals are exactly the cone's unit supporting rows this
    computes the same arithmetic as check_inequality, slack for slack.
    """
    rows = []
    for fun in functionals:
        coeffs = fun.coeffs if isinstance(fun, DualFunctional) else np.asarray(fun, dtype=float)
        if np.any(coeffs != 0.0):
            DualFunctional(coeffs, spec.cone)  # raises when outside the dual cone
        n2 = norm(coeffs, "two")
        rows.append(coeffs / n2 if n2 > 0.0 else coeffs)
    rows = np.array(rows) if rows else np.zeros((0, spec.cone.dim))
    return _check_rows(f, spec, rows, form, budget, seed, tol, triples)


def falsify(
    f: VectorMapping,
    spec: ParaSpec,
    form: str = "min",
    budget: int = 1000,
    seed: int = 0,
    tol: float = 1e-9,
    refine: bool = True,
) -> CheckReport:
    """Search for a violating triple; passes only when the budget runs out.

    The deterministic dyadic schedule runs first, then seeded random triples.
    A found violation is sharpened by coordinate pattern search on (x, y,
    lam), and the final witness is replayed through the checking kernel so a
    reported failure is guaranteed to reproduce under check_inequality.
    """
    rows = unit_dual_generators(spec.cone)
    structured = dyadic_small_gap_triples(f.domain)[:budget]
    triples = list(structured)
    rng = np.random.default_rng(seed)
    while len(triples) < budget:
        x = f.domain.sample(1, rng)[0]
        y = f.domain.sample(1, rng)[0]
        lam = float(rng.uniform())
        if len(triples) % 3 == 2:
            y = x + (y - x) * 2.0 ** -float(rng.integers(1, 12))
        triples.append(SampleTriple(x=x, y=y, lam=lam))

    def margin_of(triple: SampleTriple) -> float:
        margins = _triple_margins(f, spec, rows, form, triple)
        return float(np.min(margins)) if margins.size else 0.0

    worst = np.inf
    witness = None
    witness_idx = -1
    for idx, triple in enumerate(triples):
        m = margin_of(triple)
        if m < worst:
            worst, witness, witness_idx = m, triple, idx
    source = "structured-dyadic" if 0 <= witness_idx < len(structured) else "random"

    if worst < -tol and refine and witness is not None:
        refined, refined_margin = _pattern_search(f.domain, margin_of, witness, worst)
        if refined_margin < worst:  # keep only a strictly sharper violation
            witness, worst = refined, refined_margin
            source += "+refined"
    # witness replay: the margin above is computed by the same kernel
    # check_inequality uses, so worst < -tol reproduces there by identity
    return CheckReport(
        passed=bool(worst >= -tol),
        worst_margin=float(worst),
        witness=witness,
        samples_used=len(triples),
        tol=tol,
        seed=seed,
        notes=f"form={form}; witness source: {source}" if worst < -tol else f"form={form}; no violation at budget",
    )


def _pattern_search(box: Box, objective, start: SampleTriple, start_val: float, rounds: int = 50):
    """Minimize the slack by coordinate steps on (x, y, lam), clipped to the
    open box and [0, 1]."""
    width = box.hi - box.lo
    inset = 1e-9 * width
    best, best_val = start, start_val
    step = 0.05
    for _ in range(rounds):
        improved = False
        candidates = []
        for axis in range(box.dim):
            for sign in (1.0, -1.0):
                dx = np.zeros(box.dim)
                dx[axis] = sign * step * width[axis]
                candidates.append((dx, np.zeros(box.dim), 0.0))
                candidates.append((np.zeros(box.dim), dx, 0.0))
        for dlam in (step, -step):
            candidates.append((np.zeros(box.dim), np.zeros(box.dim), dlam))
        for dx, dy, dlam in candidates:
            x = np.clip(best.x + dx, box.lo + inset, box.hi - inset)
            y = np.clip(best.y + dy, box.lo + inset, box.hi - inset)
            lam = float(np.clip(best.lam + dlam, 0.0, 1.0))
            cand = SampleTriple(x=x, y=y, lam=lam)
            val = objective(cand)
            if val < best_val:
                best, best_val = cand, val
                improved = True
        if not improved:
            step *= 0.5
            if step < 1e-6:
                break
    return best, best_val


def check_fact2(
    f: VectorMapping,
    spec: ParaSpec,
    y_star,
    budget: int = 1000,
    seed: int = 0,
    tol: float = 1e-9,
    pairs=None,
) -> CheckReport:
    """Midpoint convexity of g(x) = y*(f(x)) + C*scale*||x||^2 * y*(k).

    Only meaningful for the square-gap modulus with the euclidean domain
    norm, where the parallelogram identity makes g convex exactly when the
    scalarized map satisfies the lam-form inequality.  The slack here is the
    raw midpoint defect g(x)/2 + g(y)/2 - g(midpoint), absolute tolerance.
    """
    if spec.modulus.kind != "square":
        raise ValueError("midpoint-convexity test needs the square-gap modulus")
    if f.domain_norm != "two":
        raise ValueError("midpoint-convexity test needs the euclidean domain norm")
    coeffs = y_star.coeffs if isinstance(y_star, DualFunctional) else np.asarray(y_star, dtype=float)
    DualFunctional(coeffs, spec.cone)  # audit
    # the parallelogram identity matches the lam-weighted form exactly
    c_lam = spec.C1 if spec.C1 is not None else 2.0 * spec.C
    c_eff = c_lam * spec.modulus.scale * float(coeffs @ spec.k)

    def g(x: np.ndarray) -> float:
        return float(coeffs @ f.eval(x)) + c_eff * float(x @ x)

    if pairs is None:
        triples = sample_triples(f.domain, budget, seed)
        pairs = [(t.x, t.y) for t in triples]
    worst = np.inf
    witness = None
    for x, y in pairs:
        slack = 0.5 * g(x) + 0.5 * g(y) - g(0.5 * (x + y))
        if slack < worst:
            worst = slack
            witness = SampleTriple(x=x, y=y, lam=0.5)
    return CheckReport(
        passed=bool(worst >= -tol),
        worst_margin=float(worst),
        witness=witness,
        samples_used=len(pairs),
        tol=tol,
        seed=seed,
        notes="midpoint convexity of the shifted scalarization",
    )


def _ball_inside_domain(f: VectorMapping, x0: np.ndarray, radius: float):
    # the domain-norm ball sits inside the sup box of the same radius,
    # so per-axis clearance suffices (and is exact for the sup norm)
    if np.any(x0 - radius <= f.domain.lo) or np.any(x0 + radius >= f.domain.hi):
        raise ValueError(f"{f.label}: ball of radius {radius} around {x0.tolist()} escapes the open domain")


def _ball_samples(f: VectorMapping, x0: np.ndarray, radius: float, budget: int, rng) -> list:
    d = f.domain.dim
    pts = [x0.copy()]
    r_in = radius * (1.0 - 1e-9)
    for axis in range(d):
        for sign in (1.0, -1.0):
            e = np.zeros(d)
            e[axis] = sign
            pts.append(x0 + r_in * e)
    while len(pts) < budget:
        v = rng.uniform(-radius, radius, size=d)
        if norm(v, f.domain_norm) <= r_in:
            pts.append(x0 + v)
    return pts[:budget]


def check_approx_convex(
    f: VectorMapping,
    x0,
    epsilon: float,
    delta: float,
    budget: int = 1000,
    seed: int = 0,
    tol: float = 1e-9,
) -> CheckReport:
    """Approximate convexity of a scalar mapping near x0: inside the delta
    ball the convexity defect may not exceed epsilon*lam*(1-lam)*||x - y||."""
    if f.codomain_dim != 1:
        raise ValueError("approximate-convexity test is defined for scalar mappings")
    if epsilon < 0.0 or delta <= 0.0:
        raise ValueError("need epsilon >= 0 and delta > 0")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    _ball_inside_domain(f, x0, delta)
    rng = np.random.default_rng(seed)
    d = f.domain.dim
    r_in = delta * (1.0 - 1e-9)

    pairs = []
    # maximal-gap probes first: the failure mode lives at gap close to 2*delta
    dirs = [np.eye(d)[i] for i in range(d)] + [np.ones(d) / math.sqrt(d)]
    for u in dirs:
        un = u / norm(u, f.domain_norm)
        pairs.append((x0 - r_in * un, x0 + r_in * un, 0.5))
    while len(pairs) < budget:
        v = rng.uniform(-delta, delta, size=d)
        w = rng.uniform(-delta, delta, size=d)
        if norm(v, f.domain_norm) <= r_in and norm(w, f.domain_norm) <= r_in:
            pairs.append((x0 + v, x0 + w, float(rng.uniform())))
    pairs = pairs[:budget]

    worst = np.inf
    witness = None
    for x, y, lam in pairs:
        gx = float(f.eval(x)[0])
        gy = float(f.eval(y)[0])
        gm = float(f.eval(lam * x + (1.0 - lam) * y)[0])
        gap = norm(x - y, f.domain_norm)
        slack = lam * gx + (1.0 - lam) * gy + epsilon * lam * (1.0 - lam) * gap - gm
        if slack < worst:
            worst = slack
            witness = SampleTriple(x=x, y=y, lam=lam)
    return CheckReport(
        passed=bool(worst >= -tol),
        worst_margin=float(worst),
        witness=witness,
        samples_used=len(pairs),
        tol=tol,
        seed=seed,
        notes=f"epsilon={epsilon}, delta={delta}",
    )


def check_local_vector_bounded(
    f: VectorMapping,
    cone,
    x0,
    radius: float,
    budget: int = 256,
    seed: int = 0,
    tol: float = 1e-9,
) -> CheckReport:
    """Find and verify a sandwich witness: -k_bar <= f(x) <= k_bar in the
    cone order over a ball around x0.

    For the standard orthant the witness is the componentwise absolute sup
    of the sampled values, which the sandwich then meets with margin zero.
    For other cones the witness is an interior direction scaled to dominate
    every supporting-functional envelope, inflated by 1.1 before the verify
    pass; any verified witness is as good as any other here.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    _ball_inside_domain(f, x0, radius)
    rng = np.random.default_rng(seed)
    pts = _ball_samples(f, x0, radius, budget, rng)
    vals = np.array([f.eval(p) for p in pts])
    rows = unit_dual_generators(cone)

    if is_standard_orthant(cone):
        k_bar = np.max(np.abs(vals), axis=0)
    else:
        env = np.max(np.abs(vals @ rows.T), axis=0)  # per-functional envelope
        gens = ensure_generators(cone)
        k0 = gens.sum(axis=0)
        k0 = k0 / max(norm(k0, "two"), 1e-300)
        denom = rows @ k0
        if np.any(denom <= 1e-12):
            raise ValueError("cone has no interior direction to scale the bound witness along")
        k_bar = 1.1 * float(np.max(env / denom)) * k0

    # verify the sandwich through the same functionals
    upper = (k_bar - vals) @ rows.T
    lower = (vals + k_bar) @ rows.T
    worst = float(min(np.min(upper), np.min(lower))) if rows.size else 0.0
    arg = int(np.argmin(np.min(np.minimum(upper, lower), axis=1)))
    return CheckReport(
        passed=bool(worst >= -tol),
        worst_margin=worst,
        witness=pts[arg],
        samples_used=len(pts),
        tol=tol,
        seed=seed,
        notes="sandwich bound over the sampled ball",
        extras={"k_bar": k_bar},
    )


def check_vector_lipschitz(
    f: VectorMapping,
    spec: ParaSpec,
    region: Box,
    budget: int = 512,
    seed: int = 0,
    tol: float = 1e-9,
) -> CheckReport:
    """Estimate the smallest L with -L*||u-x||*k <= f(u)-f(x) <= L*||u-x||*k
    on sampled pairs, then verify the norm form ||f(u)-f(x)|| <=
    gamma*L*||u-x||*||k|| with gamma the sampled order-bound constant."""
    if np.any(region.lo < f.domain.lo) or np.any(region.hi > f.domain.hi):
        raise ValueError("region escapes the mapping domain")
    rows = unit_dual_generators(spec.cone)
    denom_k = rows @ spec.k
    rng = np.random.default_rng(seed)
    n_pairs = max(budget // 2, 8)
    xs = region.sample(n_pairs, rng)
    ys = region.sample(n_pairs, rng)
    # deterministic short-gap pairs near the region corners
    width = region.hi - region.lo
    extra = []
    for frac in (0.05, 0.95):
        base = region.lo + frac * width
        extra.append((base, base + 0.01 * width * (1 if frac < 0.5 else -1)))
    pairs = [(xs[i], ys[i]) for i in range(n_pairs) if norm(xs[i] - ys[i], f.domain_norm) > 0.0] + extra

    ratios = []
    deltas = []
    for x, u in pairs:
        df = f.eval(u) - f.eval(x)
        gap = norm(u - x, f.domain_norm)
        deltas.append((df, gap))
        proj = np.abs(rows @ df)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(denom_k > 1e-12, proj / (gap * np.maximum(denom_k, 1e-300)), np.where(proj > 0, np.inf, 0.0))
        ratios.append(float(np.max(r)) if r.size else 0.0)
    big_l = float(max(ratios)) if ratios else 0.0
    if not np.isfinite(big_l):
        return CheckReport(
            passed=False,
            worst_margin=float("-inf"),
            witness=None,
            samples_used=len(pairs),
            tol=tol,
            seed=seed,
            notes="no finite constant: some functional vanishes on k but not on a sampled difference",
        )

    gamma = normality_constant(spec.cone, f.codomain_norm, budget=256, seed=seed + 1)
    worst = np.inf
    witness = None
    for (df, gap), (x, u) in zip(deltas, pairs):
        sandwich = np.concatenate([(big_l * gap * denom_k - rows @ df), (big_l * gap * denom_k + rows @ df)])
        m = float(np.min(sandwich)) if sandwich.size else 0.0
        norm_slack = gamma * big_l * gap * norm(spec.k, f.codomain_norm) - norm(df, f.codomain_norm)
        m = min(m, norm_slack / (1.0 + norm(df, f.codomain_norm)))
        if m < worst:
            worst = m
            witness = (x, u)
    return CheckReport(
        passed=bool(worst >= -tol),
        worst_margin=float(worst),
        witness=witness,
        samples_used=len(pairs),
        tol=tol,
        seed=seed,
        notes="vector sandwich plus norm form",
        extras={"L": big_l, "gamma": gamma},
    )
