"""Massive-MIMO multi-pair relaying with power-splitting SWIPT and a 3D antenna tilt.

Closed-form rate bounds, Monte-Carlo verification and (tilt, rho) grid search.
"""

from .analytic import (BASELINE, DesignPoint, RateReport, SystemParams, harvested_power,
                       rate_report, sinr_bc_lb, sinr_mac_lb, sum_rate)
from .montecarlo import MCEstimate, mc_rate_report, moment_suite, sample_channel
from .optimizer import Grid, OptimizationResult, build_grid, grid_search
from .propagation import (AntennaPattern, LargeScaleProfile, Scenario, UserGeometry,
                          antenna_gain_dbi, beta_profile, db_to_linear, large_scale_coeff,
                          user_geometry)
from .scenario_gen import PlacementConfig, load_scenario, sample_scenario, save_scenario

__version__ = "0.1.0"
