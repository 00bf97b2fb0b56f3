"""Batch experiments: sum-rate sweeps, moment verification, single-scenario search.

Every output is a CSV whose bytes depend only on the inputs and the seed.
Location sets are evaluated independently (optionally in worker
processes) and rows are written in a fixed order.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .analytic import BASELINE, SystemParams, sum_rate
from .kvfile import KVFormatError, read_kv
from .montecarlo import MCEstimate, mc_rate_report, moment_suite
from .optimizer import RHO_STEP, TILT_STEP, Grid, OptimizationResult, build_grid, grid_search
from .propagation import beta_profile
from .scenario_gen import PlacementConfig, load_scenario, sample_scenario, save_scenario

NA = "NA"

SWEEP_COLUMNS = ["sweep_var", "value", "K", "design", "analytic_sum_rate", "mc_sum_rate",
                 "mc_std_error", "mean_rho_star", "mean_tilt_star", "improvement_pct"]
MOMENT_COLUMNS = ["identity", "estimate", "target", "std_error", "z_score", "n_trials"]
SURFACE_COLUMNS = ["rho", "tilt", "sum_rate"]

POWER_SWEEP_DB = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)
ANTENNA_SWEEP = (45, 70, 95, 120, 145, 170)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment needs besides the sweep itself. dB at the boundary."""

    n_antennas: int = 100
    k_pairs: int = 5
    p_u_db: float = 15.0
    eta: float = 0.5
    sigma2_r_db: float = -70.0
    sigma2_d_db: float = -50.0
    nu: float = 3.76
    relay_height: float = 3.0
    max_distance: float = 10.0
    min_horizontal_distance: float = 1.0
    azimuth_span_deg: float = 120.0
    rho_step: float = RHO_STEP
    tilt_step: float = TILT_STEP
    include_baseline: bool = True
    half_duplex_prelog: bool = False
    harvest: str = "expected"
    seed: int = 0
    locations: int = 100
    trials: int = 1000
    workers: int = 1

    def __post_init__(self):
        if self.harvest not in ("expected", "instantaneous"):
            raise ValueError(f"harvest must be 'expected' or 'instantaneous', got {self.harvest!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        rngmod.check_seed(self.seed)

    def params(self, **override) -> SystemParams:
        cfg = dataclasses.replace(self, **override)
        return SystemParams.from_db(
            p_u_db=cfg.p_u_db, sigma2_r_db=cfg.sigma2_r_db, sigma2_d_db=cfg.sigma2_d_db,
            n_antennas=cfg.n_antennas, k_pairs=cfg.k_pairs, eta=cfg.eta, nu=cfg.nu,
            half_duplex_prelog=cfg.half_duplex_prelog)

    def placement(self, k_pairs: int | None = None) -> PlacementConfig:
        return PlacementConfig(
            k_pairs=self.k_pairs if k_pairs is None else k_pairs,
            max_distance=self.max_distance,
            min_horizontal_distance=self.min_horizontal_distance,
            azimuth_span=math.radians(self.azimuth_span_deg),
            relay_height=self.relay_height)

    def grid(self) -> Grid:
        return build_grid(self.rho_step, self.tilt_step, self.include_baseline)

    @classmethod
    def from_file(cls, path: str | Path, **override) -> "ExperimentConfig":
        """Read a ``key = value`` config; keyword overrides win over the file."""
        kv = read_kv(path)
        kinds = {f.name: f.type for f in dataclasses.fields(cls)}
        values: dict[str, object] = {}
        for key, raw in kv.items():
            if key not in kinds:
                raise KVFormatError(f"{path}: unknown config key {key!r}")
            values[key] = _coerce(kinds[key], raw, f"{path}: {key}")
        values.update({k: v for k, v in override.items() if v is not None})
        return cls(**values)


def _coerce(kind: str, raw: str, where: str):
    try:
        if kind == "bool":
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError:
        raise KVFormatError(f"{where}: cannot read {raw!r} as {kind}") from None


@dataclass(frozen=True)
class SweepSpec:
    variable: str  # "user_power_db" or "n_antennas"
    values: tuple
    k_pairs: tuple = (5, 7)
    n_location_sets: int = 100
    n_channel_trials: int = 1000
    designs: tuple = ("baseline", "optimized")
    seed: int = 0
    run_mc: bool = True

    def __post_init__(self):
        if self.variable not in ("user_power_db", "n_antennas"):
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        vals = tuple(self.values)
        if not vals or list(vals) != sorted(vals) or len(set(vals)) != len(vals):
            raise ValueError("sweep values must be non-empty, sorted and distinct")
        if self.n_location_sets < 1 or self.n_channel_trials < 1:
            raise ValueError("location sets and trials must be >= 1")
        bad = set(self.designs) - {"baseline", "optimized"}
        if bad or not self.designs:
            raise ValueError(f"unknown designs {sorted(bad)}")
        rngmod.check_seed(self.seed)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "designs", tuple(d for d in ("baseline", "optimized")
                                                  if d in self.designs))


@dataclass
class LocationOutcome:
    """Per-design results for one location set at one sweep point."""

    analytic: dict = field(default_factory=dict)
    mc: dict = field(default_factory=dict)  # design -> MCEstimate
    point: dict = field(default_factory=dict)  # design -> DesignPoint


def _evaluate_location(task) -> LocationOutcome:
    spec, config, vi, value, k, loc = task
    if spec.variable == "user_power_db":
        params = config.params(p_u_db=float(value), k_pairs=k)
    else:
        params = config.params(n_antennas=int(value), k_pairs=k)
    scenario = sample_scenario(config.placement(k), rngmod.stream(spec.seed, rngmod.SCENARIO, k, loc))
    out = LocationOutcome()
    for design in spec.designs:
        if design == "baseline":
            point = BASELINE
            value_an = sum_rate(beta_profile(scenario, point.tilt, params.pattern, params.nu),
                                point.rho, params)
        else:
            res = grid_search(scenario, params, config.grid())
            point, value_an = res.best, res.best_sum_rate
        out.analytic[design] = value_an
        out.point[design] = point
        if spec.run_mc:
            # both designs see the same fading draws
            out.mc[design] = mc_rate_report(scenario, point, params, spec.n_channel_trials,
                                            spec.seed, key=(k, loc, vi),
                                            harvest=config.harvest).sum_rate
    return out


def _run_tasks(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _fmt(x) -> str:
    if x is None:
        return NA
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def _write_csv(path, header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


@dataclass(frozen=True)
class SweepRow:
    sweep_var: str
    value: float
    k_pairs: int
    design: str
    analytic_sum_rate: float
    mc_sum_rate: float | None
    mc_std_error: float | None
    mean_rho_star: float
    mean_tilt_star: float
    improvement_pct: float | None

    def cells(self):
        return [self.sweep_var, self.value, self.k_pairs, self.design, self.analytic_sum_rate,
                self.mc_sum_rate, self.mc_std_error, self.mean_rho_star, self.mean_tilt_star,
                self.improvement_pct]


def sweep(spec: SweepSpec, config: ExperimentConfig, out_path=None,
          workers: int | None = None) -> list[SweepRow]:
    """Average baseline and optimized sum-rates over random location sets.

    For each sweep value and each K, the same ``n_location_sets`` placements
    are used (placement streams do not depend on the sweep value).
    ``improvement_pct`` compares the location-averaged analytic sum-rates.
    """
    workers = config.workers if workers is None else workers
    tasks = [(spec, config, vi, v, k, loc)
             for k in spec.k_pairs
             for vi, v in enumerate(spec.values)
             for loc in range(spec.n_location_sets)]
    outcomes = _run_tasks(_evaluate_location, tasks, workers)

    rows: list[SweepRow] = []
    L = spec.n_location_sets
    it = iter(outcomes)
    for k in spec.k_pairs:
        for v in spec.values:
            block = [next(it) for _ in range(L)]
            means = {d: math.fsum(o.analytic[d] for o in block) / L for d in spec.designs}
            for d in spec.designs:
                mc_mean = mc_se = None
                if spec.run_mc:
                    ests: list[MCEstimate] = [o.mc[d] for o in block]
                    mc_mean = math.fsum(e.mean for e in ests) / L
                    if all(e.std_error is not None for e in ests):
                        mc_se = math.sqrt(math.fsum(e.std_error**2 for e in ests)) / L
                improvement = None
                if "baseline" in means and "optimized" in means:
                    base = means["baseline"]
                    improvement = 0.0 if d == "baseline" else 100.0 * (means[d] - base) / base
                rows.append(SweepRow(
                    spec.variable, v, k, d, means[d], mc_mean, mc_se,
                    math.fsum(o.point[d].rho for o in block) / L,
                    math.fsum(o.point[d].tilt for o in block) / L,
                    improvement))
    if out_path is not None:
        _write_csv(out_path, SWEEP_COLUMNS, (r.cells() for r in rows))
    return rows


def plot_sweep(rows: list[SweepRow], path) -> None:
    """Render analytic (lines) and Monte-Carlo (markers) curves to a vector file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.5))
    keys = sorted({(r.k_pairs, r.design) for r in rows})
    for k, d in keys:
        sel = [r for r in rows if r.k_pairs == k and r.design == d]
        x = [r.value for r in sel]
        line, = ax.plot(x, [r.analytic_sum_rate for r in sel], label=f"K={k}, {d}")
        if all(r.mc_sum_rate is not None for r in sel):
            ax.plot(x, [r.mc_sum_rate for r in sel], "o", color=line.get_color(), mfc="none")
    ax.set_xlabel("user power [dB]" if rows and rows[0].sweep_var == "user_power_db"
                  else "relay antennas N")
    ax.set_ylabel("average sum-rate [bit/s/Hz]")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    # fixed metadata keeps the svg reproducible
    fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
    plt.close(fig)


def moment_profile(config: ExperimentConfig, k_pairs: int, seed: int):
    """Large-scale profile of the first sampled location set at the baseline tilt."""
    scenario = sample_scenario(config.placement(k_pairs), rngmod.stream(seed, rngmod.SCENARIO, k_pairs, 0))
    return beta_profile(scenario, BASELINE.tilt, nu=config.nu)


def verify_moments(n_antennas: int, k_pairs: int, trials: int, seed: int, out_path=None,
                   config: ExperimentConfig | None = None):
    config = config or ExperimentConfig()
    profile = moment_profile(config, k_pairs, seed)
    report = moment_suite(n_antennas, k_pairs, profile, trials, seed)
    rows = []
    for name, est, target in report.rows():
        rows.append([name, est.mean, target, est.std_error, est.z_score(target), est.n_trials])
    if out_path is not None:
        _write_csv(out_path, MOMENT_COLUMNS, rows)
    return report, rows


def optimize_once(scenario_path, config: ExperimentConfig, out_path=None, grid: Grid | None = None):
    """Grid search on one scenario file; writes the surface and a summary file."""
    scenario = load_scenario(scenario_path)
    params = config.params(k_pairs=scenario.k_pairs)
    result = grid_search(scenario, params, grid or config.grid())
    g = result.grid
    rows = [[float(r), float(t), float(result.surface[i, j])]
            for i, r in enumerate(g.rho_values) for j, t in enumerate(g.tilt_values)]
    summary = summary_record(scenario, params, result)
    if out_path is not None:
        _write_csv(out_path, SURFACE_COLUMNS, rows)
        Path(str(out_path) + ".summary").write_text(
            "".join(f"{k} = {_fmt(v)}\n" for k, v in summary.items()), encoding="utf-8")
    return result, summary


def summary_record(scenario, params: SystemParams, result: OptimizationResult) -> dict:
    base = sum_rate(beta_profile(scenario, BASELINE.tilt, params.pattern, params.nu),
                    BASELINE.rho, params)
    return {
        "k_pairs": scenario.k_pairs,
        "n_antennas": params.n_antennas,
        "best_rho": result.best.rho,
        "best_tilt": result.best.tilt,
        "best_sum_rate": result.best_sum_rate,
        "baseline_sum_rate": base,
        "improvement_pct": 100.0 * (result.best_sum_rate - base) / base,
        "evaluations": result.evaluations,
    }


def gen_scenarios(config: ExperimentConfig, k_pairs: int, count: int, seed: int, out_dir) -> list[Path]:
    """Write ``count`` location sets, using the same streams as :func:`sweep`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for loc in range(count):
        sc = sample_scenario(config.placement(k_pairs), rngmod.stream(seed, rngmod.SCENARIO, k_pairs, loc))
        path = out_dir / f"scenario_K{k_pairs}_{loc:03d}.txt"
        save_scenario(sc, path)
        paths.append(path)
    return paths

