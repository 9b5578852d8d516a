"""Command line front end.

Every subcommand reads a JSON config naming the mapping and its checks,
runs the selected operation kind (or all of them, for `run`), prints one
verdict line per executed check, and exits 0 only when every executed
check passed.  Exit 1 means a violation or a failed certification; exit 2
means the inputs were unusable.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config, run_config
from .derivative import ConvergenceError
from .mappings import OutsideDomainError

_SUBCOMMANDS = (
    "check-paraconvex",
    "falsify",
    "scalarize",
    "fact2",
    "approx-convex",
    "bounded",
    "lipschitz",
    "trace",
    "derivative",
    "gateaux",
    "gateaux-scan",
    "frechet",
    "run",
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paracone",
        description="certify or falsify cone-ordered convexity defects from a JSON run config",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name, help=f"execute {'all configured checks' if name == 'run' else f'the {name} entries'}")
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--out", default=None, help="directory for the manifest and CSV outputs")
        p.add_argument("--seed", type=int, default=None, help="override the seed of every executed entry")
        p.add_argument("--budget", type=int, default=None, help="override the sample budget of every executed entry")
        p.add_argument("--tol", type=float, default=None, help="override the tolerance of every executed entry")
        p.add_argument("--form", choices=("min", "lambda"), default=None, help="override the inequality form")
    return parser


def _summary_line(entry: dict) -> str:
    verdict = "PASS" if entry["pass"] else "FAIL"
    rep = entry["report"]
    detail = ""
    if isinstance(rep, dict):
        if "worst_margin" in rep:
            detail = f" worst_margin={rep['worst_margin']:.3e}"
        elif "defect" in rep:
            detail = f" defect={rep['defect']:.3e}"
        elif "density" in rep:
            detail = f" density={rep['density']:.4f}"
        elif "error_bound" in rep:
            detail = f" error_bound={rep['error_bound']:.3e}"
    return f"[{entry['op']}] {entry['label']}: {verdict}{detail}"


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command != "run":
            entries = [op for op in cfg.get("checks", []) if isinstance(op, dict) and op.get("op") == args.command]
            if not entries:
                raise ConfigError(f"checks: no entry with op {args.command!r}")
            cfg = dict(cfg)
            cfg["checks"] = entries
        overrides = {"seed": args.seed, "budget": args.budget, "tol": args.tol, "form": args.form}
        manifest = run_config(cfg, out_dir=args.out, overrides=overrides)
    except (ConfigError, OutsideDomainError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"not certified: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    for entry in manifest["reports"]:
        print(_summary_line(entry))
    if args.out is not None:
        print(f"manifest written under {args.out} (config {manifest['config_hash'][:12]})")
    return int(manifest["exit_status"])


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
