"""Command-line entry point: ``swiptrelay <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from .analytic import BASELINE
from .optimizer import Grid


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--seed", type=int, help="unsigned 64-bit master seed")
    p.add_argument("--locations", type=int, help="number of random location sets")
    p.add_argument("--trials", type=int, help="channel realizations per location set")
    p.add_argument("--out", required=True, help="output path")
    p.add_argument("--k", type=int, action="append", help="user pairs (repeatable)")
    p.add_argument("--antennas", type=int, help="relay antennas N")
    p.add_argument("--power-db", type=float, dest="p_u_db", help="source power p_u in dB")
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    p.add_argument("--baseline-only", action="store_true", help="skip the grid search")
    p.add_argument("--no-mc", action="store_true", help="analytic rates only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swiptrelay",
        description="Massive-MIMO SWIPT relay: closed-form rates, Monte Carlo and tilt/PS search.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("sweep-power", "average sum-rate versus user power"),
                        ("sweep-antennas", "average sum-rate versus relay antennas")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.add_argument("--values", type=_floats, help="comma-separated sweep values")
        p.add_argument("--plot", help="also render the curves to this file (e.g. .svg)")

    p = sub.add_parser("optimize", help="grid search on one scenario file")
    _common(p)
    p.add_argument("--scenario", required=True, help="scenario file")

    p = sub.add_parser("verify-moments", help="Monte-Carlo check of the random-matrix identities")
    _common(p)

    p = sub.add_parser("gen-scenarios", help="write random location sets as scenario files")
    _common(p)
    return parser


def _config(args) -> ex.ExperimentConfig:
    override = {
        "seed": args.seed, "locations": args.locations, "trials": args.trials,
        "n_antennas": args.antennas, "p_u_db": args.p_u_db, "workers": args.workers,
    }
    if args.k and len(args.k) == 1:
        override["k_pairs"] = args.k[0]
    if args.config:
        return ex.ExperimentConfig.from_file(args.config, **override)
    return ex.ExperimentConfig(**{k: v for k, v in override.items() if v is not None})


def _single_k(args, config) -> int:
    if args.k and len(args.k) > 1:
        raise ValueError(f"{args.command} takes a single --k")
    return config.k_pairs


def run(args) -> None:
    config = _config(args)
    if args.command in ("sweep-power", "sweep-antennas"):
        power = args.command == "sweep-power"
        values = args.values or (ex.POWER_SWEEP_DB if power else ex.ANTENNA_SWEEP)
        if not power:
            if any(v != int(v) for v in values):
                raise ValueError("antenna counts must be integers")
            values = [int(v) for v in values]
        spec = ex.SweepSpec(
            variable="user_power_db" if power else "n_antennas",
            values=tuple(values),
            k_pairs=tuple(args.k) if args.k else (5, 7),
            n_location_sets=config.locations,
            n_channel_trials=config.trials,
            designs=("baseline",) if args.baseline_only else ("baseline", "optimized"),
            seed=config.seed,
            run_mc=not args.no_mc,
        )
        rows = ex.sweep(spec, config, args.out)
        if args.plot:
            ex.plot_sweep(rows, args.plot)
    elif args.command == "optimize":
        grid = None
        if args.baseline_only:
            grid = Grid([BASELINE.rho], [BASELINE.tilt], include_baseline=True)
        _, summary = ex.optimize_once(args.scenario, config, args.out, grid=grid)
        print(" ".join(f"{k}={v}" for k, v in summary.items()))
    elif args.command == "verify-moments":
        ex.verify_moments(config.n_antennas, _single_k(args, config), config.trials,
                          config.seed, args.out, config)
    elif args.command == "gen-scenarios":
        ex.gen_scenarios(config, _single_k(args, config), config.locations, config.seed, args.out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run(args)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"swiptrelay {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
