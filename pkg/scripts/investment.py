"""Optimal investment between pre-allocated and real-time resources.

For each unit cost c the script reports the optimal purchase, writes the
budget segment and the tangent level curve, and checks the optimum against a
dense search of the segment.
"""

import argparse
import csv
import os

import numpy as np

from lotto_prealloc import analysis, closed_form


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--XA", type=float, default=4 / 3)
    ap.add_argument("--c", type=float, nargs="+", default=[0.423, 1.333])
    ap.add_argument("--qRB", type=float, default=1.0)
    ap.add_argument("--W", type=float, default=1.0)
    ap.add_argument("--grid", type=int, default=10_000)
    ap.add_argument("--out-dir", default="results/invest")
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    for c in args.c:
        inv = analysis.optimal_investment(args.XA, c, args.qRB, 1.0, args.W)
        P = np.linspace(0.0, args.XA / c, args.grid)
        R_A = np.maximum(args.XA - c * P, 0.0)
        values = np.array([closed_form.payoff_value(args.W, args.qRB, a, b) for a, b in zip(P, R_A)])
        k = int(np.argmax(values))
        print(f"c={c}: P*={inv.P_star:.6f} R_A*={inv.R_A_star:.6f} payoff={inv.payoff:.6f} t={inv.t:.4f}"
              f" | search best P={P[k]:.4f} payoff={values[k]:.6f}")
        path = os.path.join(args.out_dir, f"invest_c{c:g}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["curve", "P", "R_A", "payoff"])
            for a, b, v in zip(P[::50], R_A[::50], values[::50]):
                writer.writerow(["segment", a, b, v])
            if inv.payoff < args.W:
                for pt in analysis.level_curve(inv.payoff, args.qRB, 1.0, args.W, 201):
                    writer.writerow(["level", pt.P, pt.R_A, inv.payoff])
            writer.writerow(["optimum", inv.P_star, inv.R_A_star, inv.payoff])


if __name__ == "__main__":
    main()
