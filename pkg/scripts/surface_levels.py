"""Equilibrium value surface over (P, R_A), its level curves and the effectiveness table.

Writes three CSV files into --out-dir:
  surface.csv        P, R_A, payoff
  level_curves.csv   Pi, P, R_A, branch
  effectiveness.csv  Pi, R_A, P_bar, ratio
"""

import argparse
import csv
import os

import numpy as np

from lotto_prealloc import analysis, closed_form

LEVELS = (0.25, 0.5, 0.625, 0.75, 0.875)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qRB", type=float, default=1.0)
    ap.add_argument("--W", type=float, default=1.0)
    ap.add_argument("--P-max", dest="P_max", type=float, default=4.0)
    ap.add_argument("--RA-max", dest="RA_max", type=float, default=2.0)
    ap.add_argument("--steps", type=int, default=81)
    ap.add_argument("--points", type=int, default=201)
    ap.add_argument("--out-dir", default="results/surface")
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    surface = [(P, R_A, closed_form.payoff_value(args.W, args.qRB, P, R_A))
               for P in np.linspace(0, args.P_max, args.steps)
               for R_A in np.linspace(0, args.RA_max, args.steps)]
    write_csv(os.path.join(args.out_dir, "surface.csv"), ["P", "R_A", "payoff"], surface)

    curves = []
    for frac in LEVELS:
        for pt in analysis.level_curve(frac * args.W, args.qRB, 1.0, args.W, args.points):
            curves.append((pt.Pi, pt.P, pt.R_A, pt.branch.value))
    write_csv(os.path.join(args.out_dir, "level_curves.csv"), ["Pi", "P", "R_A", "branch"], curves)

    table = []
    for frac in LEVELS:
        R_A = analysis.level_RA(frac * args.W, 0.0, args.qRB, 1.0, args.W).R_A
        P_bar = analysis.effectiveness_equivalent_P(R_A, args.qRB)
        table.append((frac * args.W, R_A, P_bar, P_bar / R_A))
        print(f"Pi={frac * args.W:.3f}  R_A={R_A:.6f}  P_bar={P_bar:.6f}  ratio={P_bar / R_A:.4f}")
    write_csv(os.path.join(args.out_dir, "effectiveness.csv"), ["Pi", "R_A", "P_bar", "ratio"], table)
    print(f"wrote {len(surface)} surface points and {len(curves)} curve points to {args.out_dir}")


if __name__ == "__main__":
    main()
