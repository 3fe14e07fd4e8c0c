"""R(C) curves for the shipped models, written as CSV (C_bits, theta, R_bits, model)."""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from gaussib.models import load_model
from gaussib.spectra import mi_rate, snr_spectrum
from gaussib.waterfill import ib_rate

MODELS = Path(__file__).resolve().parent.parent / "models"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--models", nargs="+", default=["flat", "ar1", "halfband"])
    parser.add_argument("--c-max", type=float, default=4.0)
    parser.add_argument("--points", type=int, default=81)
    parser.add_argument("--out", default="-")
    args = parser.parse_args()

    cs = np.linspace(0.0, args.c_max, args.points)
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["model", "C_bits", "theta", "R_bits"])
    for name in args.models:
        src = load_model(MODELS / f"{name}.json")
        gamma = snr_spectrum(src)
        for c in cs:
            sol = ib_rate(gamma, c)
            writer.writerow([name, f"{c:.17g}", f"{sol.theta:.17g}", f"{sol.r:.17g}"])
        print(f"# {name}: I(X;Y) rate = {mi_rate(src):.6f} bits", file=sys.stderr)
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
