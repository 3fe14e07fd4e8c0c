"""Relaxed privacy funnel on random instances: solver value vs the grid oracle."""

import argparse
import time

import numpy as np

from gaussib.analysis import pf_grid_oracle
from gaussib.pf import PfInstance, minimize_pf, random_orthogonal


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--c1", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    parser.add_argument("--instances", type=int, default=3)
    parser.add_argument("--restarts", type=int, default=16)
    parser.add_argument("--step", type=float, default=0.02)
    args = parser.parse_args()

    print("inst  C1     solver      oracle      rates")
    for k in range(args.instances):
        rng = np.random.default_rng(k)
        psi = np.sort(rng.uniform(0.1, 0.95, args.n))[::-1]
        v2 = random_orthogonal(args.n, rng)
        for c1 in args.c1:
            inst = PfInstance(psi, v2, c1)
            t0 = time.perf_counter()
            sol = minimize_pf(inst, restarts=args.restarts, seed=k)
            oracle, _, _ = pf_grid_oracle(inst, step=args.step)
            rates = np.array2string(sol.rates, precision=3, suppress_small=True)
            print(f"{k:<5d} {c1:<6.2f} {sol.value:.8f}  {oracle:.8f}  {rates}  "
                  f"({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
