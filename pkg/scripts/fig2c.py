"""Capacity of the direct-sum layer (two strided block averages), against f(P, 2N)."""

import argparse
from pathlib import Path

from equicap.experiments import gcnn_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/fig2c/dsum.csv")
    ap.add_argument("--moduli", default="10,8")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--p", type=int, default=16)
    args = ap.parse_args()

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    curve = gcnn_sweep(
        f"dsum:{args.moduli}", args.p, [2, 4, 6, 8, 10, 12], args.trials, args.seed,
        repeats=args.repeats, kernel=10, allow_non_coprime=True,
    )
    curve.write(out)
    for p in curve.points:
        print(f"N={p.channels:2d}  f={p.fraction:.3f}  [{p.wilson_lo:.3f}, {p.wilson_hi:.3f}]  theory {p.theory_fraction:.3f}")


if __name__ == "__main__":
    main()
