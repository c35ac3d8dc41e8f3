"""Capacity vs channel count for a random periodic conv layer, with and without 2x2 pooling.

Writes one CSV (plus JSON sidecar) per architecture into --out-dir.
"""

import argparse
from pathlib import Path

from equicap.experiments import gcnn_sweep

CHANNELS = [10, 15, 20, 25, 30, 40, 60]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results/fig2a")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--p", type=int, default=40)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for arch in ("conv", "conv-maxpool", "conv-avgpool"):
        curve = gcnn_sweep(arch, args.p, CHANNELS, args.trials, args.seed, repeats=args.repeats, kernel=10)
        curve.write(out / f"{arch}.csv")
        print(f"{arch:13s}", " ".join(f"{p.channels}:{p.fraction:.3f}" for p in curve.points))


if __name__ == "__main__":
    main()
