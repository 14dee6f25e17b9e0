"""Compare the exact stage-2 values with the grid oracle on random small instances.

Prints one line per instance and a summary; exits non-zero if any deviation
exceeds the tolerance.
"""

import argparse
import sys
import time

import numpy as np

from lotto_prealloc import oracle, solve_glf, validate_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--max-n", type=int, default=2, choices=(1, 2, 3))
    ap.add_argument("--delta", type=float, default=0.025)
    ap.add_argument("--tol", type=float, default=0.02, help="allowed deviation as a fraction of W")
    ap.add_argument("--tie-rule", default="split", choices=("split", "A", "B"))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    worst, failures, skipped = 0.0, 0, 0
    start = time.perf_counter()
    for i in range(args.instances):
        n = int(rng.integers(1, args.max_n + 1))
        w = rng.dirichlet(np.ones(n))
        inst = validate_instance(list(w), 10 ** rng.uniform(-0.3, 0.3), rng.uniform(0, 1),
                                 rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0))
        p = rng.dirichlet(np.ones(n)) * inst.P
        p[-1] = max(0.0, inst.P - p[:-1].sum())
        try:
            game = oracle.build_discretized(inst, p, args.delta, tie_rule=args.tie_rule)
        except oracle.TooLarge as err:
            skipped += 1
            print(f"[{i}] skipped: {err}")
            continue
        cert = oracle.solve_saddle(game, seed=args.seed)
        exact = solve_glf(inst, p).payoff.value_A
        dev = abs(cert.value - exact)
        worst = max(worst, dev / inst.W)
        bad = dev > args.tol * inst.W or not cert.converged
        failures += bad
        print(f"[{i}] n={n} exact={exact:.5f} oracle={cert.value:.5f} gap={cert.gap:.1e} "
              f"dev={dev:.5f}{'  FAIL' if bad else ''}")
    print(f"{args.instances - skipped} checked, {skipped} skipped, {failures} failed, "
          f"worst deviation {worst:.4f} W, {time.perf_counter() - start:.1f}s")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
