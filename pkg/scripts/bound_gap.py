"""How far the ergodic Monte-Carlo sum-rate sits above the closed-form lower bound.

For a few location sets, optimize the design at N = 100 and then compare the
bound with the simulated ergodic rate as N grows.
"""

import argparse

from swiptrelay import experiments as ex
from swiptrelay import rng
from swiptrelay.analytic import sum_rate
from swiptrelay.montecarlo import mc_rate_report
from swiptrelay.optimizer import grid_search
from swiptrelay.propagation import beta_profile
from swiptrelay.scenario_gen import sample_scenario

ANTENNAS = (50, 100, 200, 400)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--locations", type=int, default=5)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--power-db", type=float, default=15.0)
    args = ap.parse_args()

    cfg = ex.ExperimentConfig(seed=args.seed, p_u_db=args.power_db)
    print("loc  rho     tilt    " + "  ".join(f"N={n:<5}" for n in ANTENNAS))
    for loc in range(args.locations):
        sc = sample_scenario(cfg.placement(5), rng.stream(args.seed, rng.SCENARIO, 5, loc))
        best = grid_search(sc, cfg.params(k_pairs=5), cfg.grid()).best
        gaps = []
        for n in ANTENNAS:
            p = cfg.params(n_antennas=n, k_pairs=5)
            bound = sum_rate(beta_profile(sc, best.tilt, p.pattern, p.nu), best.rho, p)
            mc = mc_rate_report(sc, best, p, args.trials, args.seed).sum_rate.mean
            gaps.append(100 * (mc - bound) / bound)
        print(f"{loc:>3}  {best.rho:.4f}  {best.tilt:.4f}  " + "  ".join(f"{g:+6.2f}%" for g in gaps))


if __name__ == "__main__":
    main()
