"""Config-file driven runs.

A run is described by a JSON document: one mapping (from the family
registry), an optional constant-and-cone block overriding the family's
declared one, and a list of operations.  Stochastic operations must carry
an explicit seed; a missing seed is a validation error, not a silent
default, so every published run is replayable from its config alone.

The manifest written next to the outputs contains the config hash, the
package version, every report, and the exit status; two runs of the same
config differ only in the wall-clock field.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from .checks import (
    check_approx_convex,
    check_fact2,
    check_inequality,
    check_local_vector_bounded,
    check_vector_lipschitz,
    falsify,
    scalarize_check,
)
from .derivative import (
    QuotientTrace,
    ScanReport,
    build_trace,
    check_alpha_monotone,
    check_lower_bound,
    check_upper_bound,
    directional_derivative,
    frechet_test,
    gateaux_scan,
    gateaux_test,
)
from .geometry import (
    Box,
    PolyCone,
    cone_from_generators,
    cone_from_inequalities,
    orthant,
    random_simplicial_cone,
    strictly_positive_functional,
    unit_dual_generators,
)
from .mappings import (
    PiecewiseLinear,
    Quadratic1D,
    Sine1D,
    VectorMapping,
    ZeroPart,
    abs_1d,
    affine_mapping,
    curved_cone_map,
    example1_default,
    make_semiconvex_scalar,
    neg_abs_1d,
    neg_square_1d,
    smooth_r2_r3,
)
from .modulus import Modulus, ParaSpec, power_modulus, square_modulus, table_modulus, zero_modulus
from .reports import _jsonify


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending path."""


# operations whose sampling must be replayable from the config alone
STOCHASTIC_OPS = frozenset(
    {
        "check-paraconvex",
        "falsify",
        "scalarize",
        "fact2",
        "approx-convex",
        "bounded",
        "lipschitz",
        "gateaux",
        "gateaux-scan",
        "frechet",
    }
)

OPS = STOCHASTIC_OPS | {"trace", "derivative"}


def _req(obj: dict, key: str, path: str):
    if key not in obj:
        raise ConfigError(f"{path}.{key}: required")
    return obj[key]


def _as_floats(val, path: str) -> np.ndarray:
    try:
        arr = np.asarray(val, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: expected numbers, got {val!r}") from exc
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{path}: entries must be finite")
    return arr


def load_config(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{p}: top level must be an object")
    return cfg


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def build_box(obj, path: str) -> Box:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object with lo/hi")
    lo = _as_floats(_req(obj, "lo", path), f"{path}.lo")
    hi = _as_floats(_req(obj, "hi", path), f"{path}.hi")
    try:
        return Box(lo=lo, hi=hi)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def build_cone(obj, path: str) -> PolyCone:
    if isinstance(obj, dict) and "orthant" in obj:
        return orthant(int(obj["orthant"]))
    if isinstance(obj, dict) and ("generators" in obj or "dual_generators" in obj):
        gens = obj.get("generators")
        duals = obj.get("dual_generators")
        try:
            if gens is not None and duals is not None:
                return PolyCone(
                    dim=len(gens[0]),
                    generators=_as_floats(gens, f"{path}.generators"),
                    dual_generators=_as_floats(duals, f"{path}.dual_generators"),
                    name=str(obj.get("name", "config-cone")),
                )
            if gens is not None:
                return cone_from_generators(_as_floats(gens, f"{path}.generators"), name=str(obj.get("name", "config-cone")))
            return cone_from_inequalities(
                _as_floats(duals, f"{path}.dual_generators"), name=str(obj.get("name", "config-cone"))
            )
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if isinstance(obj, dict) and obj.get("random_simplicial"):
        return random_simplicial_cone(int(_req(obj, "dim", path)), int(_req(obj, "seed", path)))
    raise ConfigError(f"{path}: expected orthant/generators/dual_generators")


def build_modulus(obj, path: str) -> Modulus:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(f"{path}: expected an object with a kind")
    kind = obj["kind"]
    try:
        if kind == "zero":
            return zero_modulus()
        if kind == "square":
            return square_modulus(scale=float(obj.get("scale", 1.0)))
        if kind == "power":
            return power_modulus(p=float(_req(obj, "p", path)), scale=float(obj.get("scale", 1.0)))
        if kind == "table":
            knots = tuple((float(t), float(v)) for t, v in _req(obj, "knots", path))
            return table_modulus(knots)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.kind: unknown modulus kind {kind!r}")


_SMOOTH_KINDS = {
    "quadratic": lambda o: Quadratic1D(a=float(o.get("a", 0.0)), b=float(o.get("b", 0.0)), c=float(o.get("c", 0.0))),
    "sine": lambda o: Sine1D(
        amplitude=float(o.get("amplitude", 1.0)),
        frequency=float(o.get("frequency", 1.0)),
        phase=float(o.get("phase", 0.0)),
    ),
    "zero": lambda o: ZeroPart(),
}


def build_mapping(obj, path: str = "mapping") -> VectorMapping:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    family = str(_req(obj, "family", path))
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}.params: expected an object")
    ppath = f"{path}.params"
    if family == "affine":
        matrix = _as_floats(_req(params, "matrix", ppath), f"{ppath}.matrix")
        offset = _as_floats(_req(params, "offset", ppath), f"{ppath}.offset")
        domain = build_box(_req(params, "domain", ppath), f"{ppath}.domain")
        cone = build_cone(params["cone"], f"{ppath}.cone") if "cone" in params else None
        k = _as_floats(params["k"], f"{ppath}.k") if "k" in params else None
        try:
            return affine_mapping(matrix, offset, domain, cone=cone, k=k)
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if family == "neg_square":
        return neg_square_1d()
    if family == "abs":
        return abs_1d()
    if family == "neg_abs":
        return neg_abs_1d()
    if family == "semiconvex_scalar":
        kinks = tuple((float(p), float(s)) for p, s in params.get("kinks", ()))
        u1 = PiecewiseLinear(initial_slope=float(_req(params, "initial_slope", ppath)), kinks=kinks)
        smooth_obj = params.get("smooth", {"kind": "zero"})
        kind = str(smooth_obj.get("kind", "zero"))
        if kind not in _SMOOTH_KINDS:
            raise ConfigError(f"{ppath}.smooth.kind: unknown kind {kind!r}")
        u2 = _SMOOTH_KINDS[kind](smooth_obj)
        domain = build_box(_req(params, "domain", ppath), f"{ppath}.domain")
        try:
            return make_semiconvex_scalar(u1, u2, C=float(_req(params, "C", ppath)), domain=domain)
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if family == "example1":
        return example1_default(
            n=int(params.get("n", 8)),
            kinks_per_component=int(params.get("kinks_per_component", 5)),
            C=float(params.get("C", 0.5)),
        )
    if family == "curved_cone":
        cone = build_cone(_req(params, "cone", ppath), f"{ppath}.cone")
        return curved_cone_map(cone, seed=int(_req(params, "seed", ppath)))
    if family == "smooth_r2_r3":
        return smooth_r2_r3()
    raise ConfigError(f"{path}.family: unknown family {family!r}")


def build_spec(cfg: dict, mapping: VectorMapping) -> ParaSpec:
    obj = cfg.get("spec")
    if obj is None:
        if mapping.claimed is None:
            raise ConfigError("spec: required, the mapping family declares no constants")
        return mapping.claimed
    path = "spec"
    modulus = build_modulus(_req(obj, "modulus", path), f"{path}.modulus")
    cone = build_cone(_req(obj, "cone", path), f"{path}.cone")
    k = _as_floats(_req(obj, "k", path), f"{path}.k")
    c_min = obj.get("C")
    c_lam = obj.get("C1")
    try:
        return ParaSpec(
            modulus=modulus,
            k=k,
            cone=cone,
            C=None if c_min is None else float(c_min),
            C1=None if c_lam is None else float(c_lam),
            membership_tol=float(obj.get("membership_tol", 1e-9)),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def validate_operation(op: dict, path: str) -> str:
    if not isinstance(op, dict):
        raise ConfigError(f"{path}: expected an object")
    name = str(_req(op, "op", path))
    if name not in OPS:
        raise ConfigError(f"{path}.op: unknown operation {name!r}")
    if name in STOCHASTIC_OPS and "seed" not in op:
        raise ConfigError(f"{path}.seed: explicit seed required for stochastic operation {name!r}")
    if "seed" in op and not isinstance(op["seed"], int):
        raise ConfigError(f"{path}.seed: expected an integer")
    return name


def write_trace_csv(trace: QuotientTrace, path) -> None:
    m = trace.raw.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"raw_{i + 1}" for i in range(m)] + [f"corrected_{i + 1}" for i in range(m)])
        for t, raw, cor in zip(trace.t_grid, trace.raw, trace.corrected):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in raw] + [repr(float(v)) for v in cor])


def write_scan_csv(report: ScanReport, path) -> None:
    d = report.region.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x_{i + 1}" for i in range(d)] + ["pass", "defect"])
        for p, ok, defect in zip(report.points, report.passed, report.defects):
            writer.writerow([repr(float(v)) for v in p] + [int(bool(ok)), repr(float(defect))])


def _point(op, key, path, dim):
    arr = _as_floats(_req(op, key, path), f"{path}.{key}")
    if arr.shape != (dim,):
        raise ConfigError(f"{path}.{key}: expected {dim} coordinates")
    return arr


def run_operation(name: str, op: dict, f: VectorMapping, spec: ParaSpec, out_dir: Path | None, path: str):
    """Execute one operation and return (report_dict, passed)."""
    tol = float(op.get("tol", 1e-9))
    budget = int(op.get("budget", 1000))
    seed = op.get("seed")
    form = str(op.get("form", "min"))
    if form not in ("min", "lambda"):
        raise ConfigError(f"{path}.form: expected 'min' or 'lambda'")

    if name == "check-paraconvex":
        rep = check_inequality(f, spec, form=form, budget=budget, seed=seed, tol=tol)
        return rep.to_dict(), rep.passed
    if name == "falsify":
        # exit semantics stay verdict-based: a found violation reports fail
        rep = falsify(f, spec, form=form, budget=budget, seed=seed, tol=tol, refine=bool(op.get("refine", True)))
        return rep.to_dict(), rep.passed
    if name == "scalarize":
        if "functionals" in op:
            functionals = [_as_floats(row, f"{path}.functionals") for row in op["functionals"]]
        else:
            functionals = list(unit_dual_generators(spec.cone))
        rep = scalarize_check(f, spec, functionals, form=form, budget=budget, seed=seed, tol=tol)
        return rep.to_dict(), rep.passed
    if name == "fact2":
        if "y_star" in op:
            y_star = _as_floats(op["y_star"], f"{path}.y_star")
        else:
            y_star = strictly_positive_functional(spec.cone).coeffs
        rep = check_fact2(f, spec, y_star, budget=budget, seed=seed, tol=tol)
        return rep.to_dict(), rep.passed
    if name == "approx-convex":
        x0 = _point(op, "x0", path, f.domain.dim)
        rep = check_approx_convex(
            f,
            x0,
            epsilon=float(_req(op, "epsilon", path)),
            delta=float(_req(op, "delta", path)),
            budget=budget,
            seed=seed,
            tol=tol,
        )
        return rep.to_dict(), rep.passed
    if name == "bounded":
        x0 = _point(op, "x0", path, f.domain.dim)
        rep = check_local_vector_bounded(
            f, spec.cone, x0, radius=float(_req(op, "radius", path)), budget=budget, seed=seed, tol=tol
        )
        return rep.to_dict(), rep.passed
    if name == "lipschitz":
        region = build_box(op["region"], f"{path}.region") if "region" in op else f.domain.shrink(
            0.02 * float(np.min(f.domain.hi - f.domain.lo))
        )
        rep = check_vector_lipschitz(f, spec, region, budget=budget, seed=seed, tol=tol)
        return rep.to_dict(), rep.passed
    if name == "trace":
        x0 = _point(op, "x0", path, f.domain.dim)
        h = _point(op, "h", path, f.domain.dim)
        trace = build_trace(
            f,
            spec,
            x0,
            h,
            t0=op.get("t0"),
            ratio=float(op.get("ratio", 0.5)),
            depth=int(op.get("depth", 40)),
        )
        mono = check_alpha_monotone(trace, tol=tol)
        lower = check_lower_bound(trace, tol=tol)
        if out_dir is not None and "csv" in op:
            write_trace_csv(trace, out_dir / str(op["csv"]))
        return (
            {"monotone": mono.to_dict(), "lower_bound": lower.to_dict()},
            mono.passed and lower.passed,
        )
    if name == "derivative":
        x0 = _point(op, "x0", path, f.domain.dim)
        h = _point(op, "h", path, f.domain.dim)
        est = directional_derivative(
            f,
            spec,
            x0,
            h,
            tol=float(op.get("tol", 1e-6)),
            t0=op.get("t0"),
            ratio=float(op.get("ratio", 0.5)),
            max_depth=int(op.get("max_depth", 40)),
        )
        result = {
            "value": _jsonify(est.value),
            "error_bound": est.error_bound,
            "t_used": est.t_used,
            "iterations": est.iterations,
            "converged": est.converged,
            "cancellation_warning": est.cancellation_warning,
        }
        if op.get("upper_bound", True) and est.converged:
            ub = check_upper_bound(f, spec, x0, h, est, tol=float(op.get("upper_tol", 1e-9)))
            result["upper_bound"] = ub.to_dict()
            return result, est.converged and ub.passed
        return result, est.converged
    if name == "gateaux":
        x0 = _point(op, "x0", path, f.domain.dim)
        rep = gateaux_test(
            f,
            spec,
            x0,
            n_directions=int(op.get("n_directions", 8)),
            tol=float(op.get("tol", 1e-6)),
            seed=seed,
        )
        return rep.to_dict(), rep.passed
    if name == "gateaux-scan":
        region = build_box(op["region"], f"{path}.region") if "region" in op else f.domain.shrink(
            0.02 * float(np.min(f.domain.hi - f.domain.lo))
        )
        points = None
        if "points" in op:
            points = [_as_floats(p, f"{path}.points") for p in op["points"]]
        rep = gateaux_scan(
            f,
            spec,
            region,
            n_points=int(op.get("n_points", 100)),
            n_directions=int(op.get("n_directions", 8)),
            tol=float(op.get("tol", 1e-6)),
            seed=seed,
            points=points,
            kink_match_tol=float(op.get("kink_match_tol", 1e-9)),
        )
        if out_dir is not None and "csv" in op:
            write_scan_csv(rep, out_dir / str(op["csv"]))
        return rep.to_dict(), bool(rep.density == 1.0)
    if name == "frechet":
        x0 = _point(op, "x0", path, f.domain.dim)
        rep = frechet_test(
            f,
            spec,
            x0,
            epsilons=tuple(float(e) for e in op.get("epsilons", (1e-2, 1e-3))),
            n_directions=int(op.get("n_directions", 16)),
            tol=float(op.get("tol", 1e-6)),
            seed=seed,
        )
        return rep.to_dict(), rep.passed
    raise ConfigError(f"{path}.op: unknown operation {name!r}")


def run_config(cfg: dict, out_dir=None, overrides: dict | None = None) -> dict:
    """Execute every operation in the config and assemble the manifest.

    overrides (from CLI flags) replace the matching key in every
    operation entry before validation, so a flag seed satisfies the
    explicit-seed rule.
    """
    import time

    start = time.perf_counter()
    mapping = build_mapping(_req(cfg, "mapping", "config"), "mapping")
    spec = build_spec(cfg, mapping)
    ops = cfg.get("checks")
    if not isinstance(ops, list) or not ops:
        raise ConfigError("checks: expected a non-empty list of operations")
    out_path = None
    if out_dir is not None:
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
    reports = []
    all_passed = True
    for idx, op in enumerate(ops):
        path = f"checks[{idx}]"
        merged = dict(op)
        for key, val in (overrides or {}).items():
            if val is not None:
                merged[key] = val
        name = validate_operation(merged, path)
        report, passed = run_operation(name, merged, mapping, spec, out_path, path)
        reports.append({"op": name, "label": str(merged.get("label", f"{name}-{idx}")), "pass": bool(passed), "report": report})
        all_passed = all_passed and passed
    manifest = {
        "config_hash": config_hash(cfg),
        "version": __version__,
        "mapping": mapping.label,
        "reports": reports,
        "exit_status": 0 if all_passed else 1,
        "wall_clock_s": round(time.perf_counter() - start, 6),
    }
    if out_path is not None:
        (out_path / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return manifest
