"""Exhaustive (tilt, rho) grid search on the closed-form sum-rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import BASELINE, DesignPoint, SystemParams, rate_report
from .propagation import Scenario, beta_profile

# Reference step sizes. They are rounded forms of 1/15 and pi/30.
RHO_STEP = 0.0667
TILT_STEP = 0.1047

# a multiple closer than this fraction of a step to an open bound counts as the bound
_BOUNDARY_TOL = 0.01


@dataclass(frozen=True)
class Grid:
    rho_values: np.ndarray
    tilt_values: np.ndarray
    include_baseline: bool = False

    def __post_init__(self):
        rho = np.array(self.rho_values, dtype=float).ravel()
        tilt = np.array(self.tilt_values, dtype=float).ravel()
        for name, v, hi in (("rho", rho, 1.0), ("tilt", tilt, math.pi / 2)):
            if v.size == 0:
                raise ValueError(f"empty {name} grid")
            if np.any(v <= 0) or np.any(v >= hi):
                raise ValueError(f"{name} values must be strictly inside (0, {hi})")
            if np.any(np.diff(v) <= 0):
                raise ValueError(f"{name} values must be strictly increasing")
        if self.include_baseline and not (np.any(rho == BASELINE.rho) and np.any(tilt == BASELINE.tilt)):
            raise ValueError("include_baseline set but the baseline point is missing")
        object.__setattr__(self, "rho_values", rho)
        object.__setattr__(self, "tilt_values", tilt)

    @property
    def shape(self):
        return self.rho_values.size, self.tilt_values.size


def _multiples(step: float, upper: float) -> np.ndarray:
    if not 0 < step < upper:
        raise ValueError(f"step must lie in (0, {upper}), got {step}")
    n = math.floor(upper / step)
    vals = step * np.arange(1, n + 1)
    vals = vals[vals < upper - _BOUNDARY_TOL * step]
    if vals.size == 0:
        raise ValueError(f"step {step} leaves no interior grid point")
    return vals


def build_grid(rho_step: float = RHO_STEP, tilt_step: float = TILT_STEP,
               include_baseline: bool = True) -> Grid:
    """Step multiples strictly inside (0, 1) x (0, pi/2), optionally with (0.5, pi/4)."""
    rho = _multiples(rho_step, 1.0)
    tilt = _multiples(tilt_step, math.pi / 2)
    if include_baseline:
        rho = np.union1d(rho, [BASELINE.rho])
        tilt = np.union1d(tilt, [BASELINE.tilt])
    return Grid(rho, tilt, include_baseline)


@dataclass(frozen=True)
class OptimizationResult:
    best: DesignPoint
    best_sum_rate: float
    surface: np.ndarray  # [rho index, tilt index]
    evaluations: int
    grid: Grid


def rate_surface(scenario: Scenario, params: SystemParams, grid: Grid) -> np.ndarray:
    surface = np.empty(grid.shape)
    for j, tilt in enumerate(grid.tilt_values):
        profile = beta_profile(scenario, float(tilt), params.pattern, params.nu)
        for i, rho in enumerate(grid.rho_values):
            surface[i, j] = rate_report(profile, float(rho), params).sum_rate
    return surface


def grid_search(scenario: Scenario, params: SystemParams, grid: Grid) -> OptimizationResult:
    """Maximise the analytic sum-rate over the grid.

    Exact ties go to the smallest rho, then the smallest tilt.
    """
    surface = rate_surface(scenario, params, grid)
    # C-order argmax returns the first maximum: lowest rho row, then lowest tilt
    i, j = np.unravel_index(int(np.argmax(surface)), surface.shape)
    best = DesignPoint(float(grid.rho_values[i]), float(grid.tilt_values[j]))
    return OptimizationResult(best, float(surface[i, j]), surface, surface.size, grid)
