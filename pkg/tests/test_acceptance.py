"""Exit criteria. Run with ``pytest tests/test_acceptance.py -s`` to see one verdict line each."""

import filecmp
import math

import numpy as np
import pytest

from swiptrelay import experiments as ex
from swiptrelay import rng as rngmod
from swiptrelay.analytic import BASELINE, SystemParams, rate_report, sum_rate
from swiptrelay.cli import main
from swiptrelay.montecarlo import mc_hardening_sinr, mc_rate_report, moment_suite
from swiptrelay.optimizer import Grid, grid_search
from swiptrelay.propagation import AntennaPattern, UserGeometry, antenna_gain_dbi, beta_profile
from swiptrelay.scenario_gen import sample_scenario

SEED = 1
CONFIG = ex.ExperimentConfig(seed=SEED)


@pytest.fixture
def verdict(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    return emit


def location_set(k, loc):
    return sample_scenario(CONFIG.placement(k), rngmod.stream(SEED, rngmod.SCENARIO, k, loc))


@pytest.fixture(scope="module")
def power_sweep():
    spec = ex.SweepSpec("user_power_db", ex.POWER_SWEEP_DB, (5, 7), 100, 1, seed=SEED, run_mc=False)
    return ex.sweep(spec, CONFIG)


@pytest.fixture(scope="module")
def antenna_sweep():
    spec = ex.SweepSpec("n_antennas", ex.ANTENNA_SWEEP, (5, 7), 100, 1, seed=SEED, run_mc=False)
    return ex.sweep(spec, CONFIG.__class__(seed=SEED, p_u_db=15.0))


def curve(rows, k, design):
    sel = [r for r in rows if r.k_pairs == k and r.design == design]
    return np.array([r.value for r in sel], float), np.array([r.analytic_sum_rate for r in sel])


# 1 ------------------------------------------------------------------------------

def test_c1_bound_tightness(verdict):
    sc = location_set(5, 0)
    params = CONFIG.params(n_antennas=100, k_pairs=5, p_u_db=15.0)
    best = grid_search(sc, params, CONFIG.grid()).best
    gaps = {}
    for n in (50, 100, 200, 400):
        p = CONFIG.params(n_antennas=n, k_pairs=5, p_u_db=15.0)
        analytic = sum_rate(beta_profile(sc, best.tilt, p.pattern, p.nu), best.rho, p)
        mc = mc_rate_report(sc, best, p, 1000, SEED).sum_rate.mean
        gaps[n] = (mc - analytic) / analytic
    # independent cross-check: moments of the same draws plugged into the bound's ratio
    prof = beta_profile(sc, best.tilt)
    h_mac, h_bc = mc_hardening_sinr(prof, best.rho, params, 1000, SEED)
    hard = rates_sum(h_mac, h_bc)
    analytic100 = rate_report(prof, best.rho, params).sum_rate
    ns = np.log2(list(gaps))
    slope = np.polyfit(ns, [abs(g) for g in gaps.values()], 1)[0]
    tight = abs(gaps[100]) <= 0.05
    shrinking = slope < 0 and abs(gaps[400]) < abs(gaps[50])
    verdict(1, tight and shrinking,
            f"design rho={best.rho:.4f} tilt={best.tilt:.4f}; relative gap (ergodic MC - bound)/bound "
            + ", ".join(f"N={n}: {100 * g:+.2f}%" for n, g in gaps.items())
            + f"; trend slope per doubling {100 * slope:+.2f}%"
            + f"; hardening-moment MC at N=100 vs bound {100 * (hard - analytic100) / analytic100:+.2f}%")
    assert shrinking
    assert tight


def rates_sum(g_mac, g_bc):
    return float(np.minimum(np.log2(1 + g_mac), np.log2(1 + g_bc)).sum())


# 2 ------------------------------------------------------------------------------

def test_c2ab_optimization_gain(verdict):
    params = CONFIG.params(n_antennas=100, k_pairs=5, p_u_db=25.0)
    grid = CONFIG.grid()
    opt, base = [], []
    for loc in range(100):
        sc = location_set(5, loc)
        opt.append(grid_search(sc, params, grid).best_sum_rate)
        base.append(sum_rate(beta_profile(sc, BASELINE.tilt), BASELINE.rho, params))
    opt, base = np.array(opt), np.array(base)
    structural = bool(np.all(opt >= base))
    gain = 100 * (opt.mean() - base.mean()) / base.mean()
    per_set = 100 * np.mean((opt - base) / base)
    verdict("2a", structural, f"optimized >= baseline in {np.sum(opt >= base)}/100 location sets")
    verdict("2b", gain >= 30, f"mean improvement {gain:.1f}% (ratio of means; mean of per-set ratios "
                              f"{per_set:.1f}%) at p_u=25 dB, N=100, K=5; threshold 30%")
    assert structural
    assert gain >= 30


def test_c2c_improvement_trend(verdict, power_sweep, antenna_sweep):
    ok = True
    details = []
    for rows, name in ((power_sweep, "p_u"), (antenna_sweep, "N")):
        for k in (5, 7):
            imp = [r.improvement_pct for r in rows if r.k_pairs == k and r.design == "optimized"]
            mono = bool(np.all(np.diff(imp) >= 0))
            ok &= mono
            details.append(f"K={k} vs {name}: " + ", ".join(f"{v:.0f}" for v in imp) + "%")
    verdict("2c", ok, "improvement non-decreasing; " + "; ".join(details))
    assert ok


# 3 ------------------------------------------------------------------------------

def test_c3_power_shape(verdict, power_sweep):
    ok = True
    details = []
    for k in (5, 7):
        for design in ("baseline", "optimized"):
            db, rate = curve(power_sweep, k, design)
            lin = 10 ** (db / 10)
            slopes = np.diff(rate) / np.diff(lin)
            increasing = bool(np.all(np.diff(rate) > 0))
            # negative acceleration with respect to the power itself
            concave = bool(np.all(np.diff(slopes) < 0))
            db_curv = np.diff(rate, 2)
            ok &= increasing and concave
            details.append(f"K={k} {design}: increasing={increasing} concave(p)={concave} "
                           f"dB-axis 2nd diffs {np.round(db_curv, 2).tolist()}")
    verdict("3a", ok, "; ".join(details))
    assert ok


def test_c3_antenna_linearity(verdict, antenna_sweep):
    r2s = {}
    for k in (5, 7):
        for design in ("baseline", "optimized"):
            n, rate = curve(antenna_sweep, k, design)
            fit = np.polyval(np.polyfit(n, rate, 1), n)
            r2s[(k, design)] = 1 - np.sum((rate - fit) ** 2) / np.sum((rate - rate.mean()) ** 2)
            assert np.all(np.diff(rate) > 0)
    ok = all(v >= 0.98 for v in r2s.values())
    verdict("3b", ok, "linear-fit R^2 " + ", ".join(f"K={k} {d}: {v:.4f}" for (k, d), v in r2s.items()))
    assert ok


# 4, 5 ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def moments():
    prof = beta_profile(location_set(4, 0), BASELINE.tilt)
    return {
        "trace": moment_suite(64, 4, prof, 10_000, SEED),
        "suite": moment_suite(64, 4, prof, 100_000, SEED),
    }


def test_c4_harvested_energy_trace(verdict, moments):
    rep = moments["trace"]
    target = rep.targets()["e_trace"]
    rel = abs(rep.e_trace.mean - target) / target
    verdict(4, rel <= 0.01, f"E trace(G G^H) = {rep.e_trace.mean:.6g} vs N*sum(beta) = {target:.6g}, "
                            f"relative error {100 * rel:.3f}% (1e4 draws, N=64, K=4)")
    assert rel <= 0.01


def test_c5_moment_suite(verdict, moments):
    rep = moments["suite"]
    tol = {"e_h4": 0.02, "e_v2": 0.02, "e_sigma2": 0.01, "e_var_ratio": 0.03}
    ok = True
    parts = []
    for name, est, target in rep.rows():
        rel = abs(est.mean - target) / target
        z = est.z_score(target)
        good = abs(z) < 3 and rel <= tol.get(name, math.inf)
        ok &= good
        parts.append(f"{name}={est.mean:.5g} (target {target:.5g}, rel {100 * rel:.2f}%, z {z:+.2f})")
    verdict(5, ok, f"{rep.e_h4.n_trials} draws; " + "; ".join(parts))
    assert ok


# 6 ------------------------------------------------------------------------------

def test_c6_antenna_pattern(verdict):
    pat = AntennaPattern()
    peak = antenna_gain_dbi(UserGeometry(4.0, 0.7, 0.0), 0.7)
    worst = antenna_gain_dbi(UserGeometry(4.0, 0.2 + math.pi / 2, math.pi), 0.2)
    el = antenna_gain_dbi(UserGeometry(4.0, 0.7 + pat.theta_3db, 0.0), 0.7)
    el_neg = antenna_gain_dbi(UserGeometry(4.0, 0.7 - pat.theta_3db, 0.0), 0.7)
    az = antenna_gain_dbi(UserGeometry(4.0, 0.7, pat.phi_3db), 0.7)
    eps = 4 * np.finfo(float).eps * 12
    ok = (peak == 0.0 and worst == -45.0 and abs(el + 12) <= eps and abs(el_neg + 12) <= eps
          and abs(az + 12) <= eps)
    verdict(6, ok, f"peak {peak} dBi, worst {worst} dBi, beamwidth cases {el!r}, {el_neg!r}, {az!r}")
    assert ok


# 7 ------------------------------------------------------------------------------

def exhaustive(scenario, params, rhos, tilts):
    best = None
    for rho in rhos:
        for tilt in tilts:
            v = rate_report(beta_profile(scenario, tilt), rho, params).sum_rate
            if best is None or v > best[0]:
                best = (v, rho, tilt)
    return best


def test_c7_optimizer_oracle(verdict):
    g = rngmod.stream(SEED, 99)
    checked = 0
    ties = 0
    for case in range(60):
        k = int(g.integers(1, 8))
        sc = location_set(k, case)
        rhos = np.sort(g.choice(np.arange(1, 15) / 15, int(g.integers(1, 6)), replace=False))
        # low tilts leave every user on the clamped sidelobe floor and produce exact ties
        pool = np.arange(1, 15) * math.pi / 30 if case % 2 else np.arange(1, 6) * 0.02
        tilts = np.sort(g.choice(pool, int(g.integers(1, min(6, pool.size + 1))), replace=False))
        params = SystemParams.from_db(float(g.uniform(0, 25)), n_antennas=100, k_pairs=k)
        res = grid_search(sc, params, Grid(rhos, tilts))
        v, rho, tilt = exhaustive(sc, params, rhos, tilts)
        assert (res.best_sum_rate, res.best.rho, res.best.tilt) == (v, rho, tilt), case
        ties += int(np.sum(res.surface == res.best_sum_rate) > 1)
        checked += 1
    verdict(7, True, f"{checked} grids up to 5x5 match the exhaustive oracle exactly ({ties} with tied maxima)")


# 8 ------------------------------------------------------------------------------

def test_c8_cli_determinism(verdict, tmp_path):
    runs = {
        "sweep-power": ["sweep-power", "--locations", "3", "--trials", "20", "--values", "0,25"],
        "sweep-antennas": ["sweep-antennas", "--locations", "3", "--trials", "20", "--values", "45,170"],
        "verify-moments": ["verify-moments", "--k", "3", "--antennas", "16", "--trials", "500"],
        "optimize": None,
    }
    main(["gen-scenarios", "--k", "5", "--locations", "1", "--seed", "3", "--out", str(tmp_path / "sc")])
    runs["optimize"] = ["optimize", "--scenario", str(tmp_path / "sc" / "scenario_K5_000.txt")]
    same = True
    for name, argv in runs.items():
        outs = []
        for i, workers in enumerate((1, 1, 2, 3)):
            out = tmp_path / f"{name}_{i}.csv"
            assert main(argv + ["--seed", "17", "--workers", str(workers), "--out", str(out)]) == 0
            outs.append(out)
        same &= all(filecmp.cmp(outs[0], o, shallow=False) for o in outs[1:])
    again = tmp_path / "sc2"
    main(["gen-scenarios", "--k", "5", "--locations", "1", "--seed", "3", "--out", str(again)])
    same &= filecmp.cmp(tmp_path / "sc" / "scenario_K5_000.txt", again / "scenario_K5_000.txt",
                        shallow=False)
    verdict(8, same, "repeated runs at 1, 2 and 3 workers give byte-identical files for "
                     + ", ".join(runs) + ", gen-scenarios")
    assert same


# 9 ------------------------------------------------------------------------------

def test_c9_indicative_magnitude(verdict, power_sweep):
    rate = [r.analytic_sum_rate for r in power_sweep
            if r.k_pairs == 5 and r.design == "optimized" and r.value == 0.0][0]
    inside = 3.25 <= rate <= 9.75
    # indicative only: reported, never gating
    verdict(9, inside, f"optimized mean sum-rate at p_s = 1 W, N=100, K=5: {rate:.3f} bit/s/Hz "
                       f"(reference 6.5, window 3.25-9.75; indicative)")
