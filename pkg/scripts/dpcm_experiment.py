"""Predictive-loop Monte Carlo: empirical c_hat against the target C over seeds and orders."""

import argparse
import time
from pathlib import Path

from gaussib.dpcm import end_to_end_rates
from gaussib.models import load_model

MODELS = Path(__file__).resolve().parent.parent / "models"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--models", nargs="+", default=["flat", "ar1"])
    parser.add_argument("--c", type=float, default=1.0)
    parser.add_argument("--orders", type=int, nargs="+", default=[4, 16, 64])
    parser.add_argument("--seeds", type=int, default=3)
    parser.add_argument("--length", type=int, default=2 ** 18)
    args = parser.parse_args()

    print("model  L   seed  c_hat      c_se      r_hat      r_target   resid     secs")
    for name in args.models:
        src = load_model(MODELS / f"{name}.json")
        for order in args.orders:
            for seed in range(args.seeds):
                t0 = time.perf_counter()
                est = end_to_end_rates(src, args.c, order=order, length=args.length, seed=seed)
                print(f"{name:6s} {order:<3d} {seed:<5d} {est.c_hat:.6f}  {est.c_se:.2e}  "
                      f"{est.r_hat:.6f}   {est.r_target:.6f}   {est.identity_residual:.1e}  "
                      f"{time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
