#!/usr/bin/env python3
"""Sweep the allowance constant for f(x) = -|x| and record how the
counterexample band shrinks.

With the square modulus the midpoint slack along a symmetric pair at gap g
is -g/2 + C*g**2/2, negative exactly on 0 < g < 1/C and deepest at
g = 1/(2C).  No finite constant clears the band, so every sweep row should
come back falsified, with the witness gap tracking 1/(2C).  The predicted
margin column rescales the symmetric-pair depth by the same
1 + |f(x)| + |f(y)| division the checker applies; the search also tries
asymmetric weights, so observed margins may land a little below it.
"""

import argparse
import csv
import sys

from paracone import ParaSpec, falsify, neg_abs_1d, orthant, square_modulus


def predicted_gap(c: float) -> float:
    return 1.0 / (2.0 * c)


def predicted_margin(c: float, gap: float) -> float:
    # same relative scale as the checker: both endpoint values are gap/2
    slack = -gap / 2.0 + c * gap * gap / 2.0
    return slack / (1.0 + gap)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--constants", type=float, nargs="+",
                    default=[0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0])
    ap.add_argument("--budget", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default=None, help="optional CSV path")
    args = ap.parse_args(argv)

    f = neg_abs_1d()
    rows = []
    print(f"{'C':>8} {'verdict':>10} {'witness gap':>12} {'pred gap':>10} "
          f"{'margin':>12} {'pred margin':>12}")
    for c in args.constants:
        spec = ParaSpec(modulus=square_modulus(), k=[1.0], cone=orthant(1), C=c)
        rep = falsify(f, spec, form="min", budget=args.budget, seed=args.seed)
        if rep.witness is None:
            print(f"{c:8.2f} {'no witness':>10}")
            continue
        gap = abs(float(rep.witness.x[0]) - float(rep.witness.y[0]))
        g_star = predicted_gap(c)
        m_star = predicted_margin(c, g_star)
        verdict = "violated" if not rep.passed else "passed"
        print(f"{c:8.2f} {verdict:>10} {gap:12.6f} {g_star:10.6f} "
              f"{rep.worst_margin:12.3e} {m_star:12.3e}")
        rows.append({
            "C": c,
            "passed": rep.passed,
            "witness_gap": gap,
            "predicted_gap": g_star,
            "worst_margin": rep.worst_margin,
            "predicted_margin": m_star,
            "lam": rep.witness.lam,
            "samples_used": rep.samples_used,
        })

    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.out}", file=sys.stderr)

    return 0 if all(not r["passed"] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
