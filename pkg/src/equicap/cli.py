"""``equicap`` command line: cover, fraction, gcnn-sweep, verify, figure1-data.

Exit codes: 0 success, 1 solver undecided or a failed verification, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .cover import cover_count, cover_fraction
from .separability import UndecidedError

SUBCOMMANDS = ("cover", "fraction", "gcnn-sweep", "verify", "figure1-data")


@dataclass
class ExperimentConfig:
    subcommand: str
    spec: str | None = None  # representation spec (fraction) or architecture (gcnn-sweep)
    group: str = "Z5"
    p: int | None = None
    n: int | None = None
    trials: int = 100
    seed: int | None = None
    channels: list[int] = field(default_factory=list)
    out: str | None = None
    probe: str = "lp"
    raw_orbits: bool = False
    exact: bool = False
    count: bool = False
    repeats: int = 1
    size: int | None = None
    in_channels: int = 3
    kernel: int | None = None
    pool: int = 2
    allow_non_coprime: bool = False
    suites: list[str] = field(default_factory=lambda: ["all"])
    thorough: bool = False

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand {self.subcommand!r}")

    def resolve_seed(self) -> int:
        if self.seed is None:
            self.seed = secrets.randbits(64)
        return self.seed

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        return cls(**json.loads(text))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="equicap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"equicap {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("cover", help="Cover's fraction f(P, N)")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--exact", action="store_true", help="print the reduced rational num/den")
    c.add_argument("--count", action="store_true", help="print the number of separable dichotomies")

    f = sub.add_parser("fraction", help="empirical separable fraction for a representation")
    f.add_argument("--rep", dest="spec", required=True)
    f.add_argument("--group", default="Z5", help="group for 'regular'-style specs, e.g. Z6 or Z10xZ8")
    f.add_argument("--p", type=int, required=True)
    f.add_argument("--trials", type=int, default=100)
    f.add_argument("--seed", type=int)
    f.add_argument("--raw-orbits", action="store_true")
    f.add_argument("--probe", choices=("lp", "logistic"), default="lp")

    g = sub.add_parser("gcnn-sweep", help="capacity vs channel count for a random conv layer")
    g.add_argument("--arch", dest="spec", required=True, help="conv | conv-maxpool | conv-avgpool | dsum:m1,m2")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--channels", type=lambda s: [int(v) for v in s.split(",")], required=True)
    g.add_argument("--trials", type=int, default=100)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)
    g.add_argument("--repeats", type=int, default=1, help="independent input/weight draws, pooled")
    g.add_argument("--size", type=int)
    g.add_argument("--in-channels", type=int, default=3)
    g.add_argument("--kernel", type=int)
    g.add_argument("--pool", type=int, default=2)
    g.add_argument("--probe", choices=("lp", "logistic"), default="lp")
    g.add_argument("--raw-orbits", action="store_true")
    g.add_argument("--allow-non-coprime", action="store_true")

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("--suite", dest="suites", action="append", help="suite name or 'all' (repeatable)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--thorough", action="store_true", help="full acceptance sizes")
    v.add_argument("--out")

    fig = sub.add_parser("figure1-data", help="orbits and fixed subspaces of the three toy representations")
    fig.add_argument("--seed", type=int, default=0)
    fig.add_argument("--out")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        print(text)


def run(config: ExperimentConfig) -> int:
    from .experiments import Architecture, figure1_data, gcnn_sweep
    from .groups import parse_group
    from .representation import parse_rep
    from .separability import empirical_fraction
    from .verify import verify_suites

    cmd = config.subcommand
    try:
        if cmd == "cover":
            if config.p is None or config.n is None or config.p < 1 or config.n < 0:
                raise ValueError("cover needs --p >= 1 and --n >= 0")
            if config.count:
                print(cover_count(config.p, config.n))
            elif config.exact:
                fr = cover_fraction(config.p, config.n)
                print(f"{fr.numerator}/{fr.denominator}")
            else:
                print(repr(float(cover_fraction(config.p, config.n))))
            return 0
        if cmd == "fraction":
            seed = config.resolve_seed()
            rep = parse_rep(config.spec, parse_group(config.group))
            est = empirical_fraction(rep, config.p, config.trials, seed, config.raw_orbits, config.probe)
            print(json.dumps(est.to_json(), indent=2))
            return 0
        if cmd == "gcnn-sweep":
            seed = config.resolve_seed()
            arch = Architecture.parse(config.spec, pool=config.pool)
            curve = gcnn_sweep(
                arch,
                config.p,
                config.channels,
                config.trials,
                seed,
                repeats=config.repeats,
                size=config.size,
                in_channels=config.in_channels,
                kernel=config.kernel,
                probe=config.probe,
                raw=config.raw_orbits,
                allow_non_coprime=config.allow_non_coprime,
            )
            curve.metadata["config_echo"] = json.loads(config.to_json())
            csv_path, meta_path = curve.write(config.out)
            print(f"wrote {csv_path} and {meta_path} (seed {seed})", file=sys.stderr)
            return 0
        if cmd == "verify":
            report = verify_suites(config.suites, seed=config.seed or 0, thorough=config.thorough)
            _emit(json.dumps(report, indent=2, default=str), config.out)
            for s in report["suites"]:
                print(f"{'PASS' if s['passed'] else 'FAIL'} {s['suite']} ({s['seconds']}s)", file=sys.stderr)
            return 0 if report["passed"] else 1
        if cmd == "figure1-data":
            _emit(json.dumps(figure1_data(config.seed or 0), indent=2), config.out)
            return 0
    except UndecidedError as exc:
        print(f"error: solver undecided: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    fields = ExperimentConfig.__dataclass_fields__
    values = {k: v for k, v in vars(ns).items() if k in fields and v is not None}
    return ExperimentConfig(**values)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        config = config_from_args(ns)
    except (TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
