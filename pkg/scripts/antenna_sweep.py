"""Average sum-rate versus relay antenna count at p_u = 15 dB.

Usage: python3 scripts/antenna_sweep.py [--locations 100] [--trials 1000] [--out runs/antennas.csv]
"""

import argparse
from pathlib import Path

from swiptrelay import experiments as ex


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--locations", type=int, default=100)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="runs/antenna_sweep.csv")
    args = ap.parse_args()

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    spec = ex.SweepSpec("n_antennas", ex.ANTENNA_SWEEP, (5, 7), args.locations, args.trials,
                        seed=args.seed)
    rows = ex.sweep(spec, ex.ExperimentConfig(seed=args.seed, p_u_db=15.0), out, workers=args.workers)
    ex.plot_sweep(rows, out.with_suffix(".svg"))
    for r in rows:
        imp = "" if r.improvement_pct is None else f"  (+{r.improvement_pct:.0f}%)"
        print(f"K={r.k_pairs} N={r.value:>3} {r.design:>9}: {r.analytic_sum_rate:7.3f}{imp}")


if __name__ == "__main__":
    main()
