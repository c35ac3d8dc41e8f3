"""Dump orbits, centroids and fixed subspaces of the three toy representations as JSON."""

import argparse
import json

from equicap.experiments import figure1_data


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/figure1.json")
    args = ap.parse_args()
    data = figure1_data(args.seed)
    with open(args.out, "w") as fh:
        json.dump(data, fh, indent=2)
    for key, panel in data["panels"].items():
        print(f"({key}) {panel['representation']}: N0={panel['n0']} separable={panel['separable']}")


if __name__ == "__main__":
    main()
