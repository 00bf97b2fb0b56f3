"""Closed-form harvested power, SINR lower bounds and achievable rates.

Pair indices are 0-based. All quantities are linear powers; rates are in
bits/s/Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .propagation import AntennaPattern, LargeScaleProfile, db_to_linear


@dataclass(frozen=True)
class SystemParams:
    """Link-budget constants. Defaults follow the reference simulation table."""

    n_antennas: int = 100
    k_pairs: int = 5
    p_s: float = 1.0
    eta: float = 0.5
    sigma2_r: float = 1e-7
    sigma2_d: float = 1e-5
    nu: float = 3.76
    pattern: AntennaPattern = field(default_factory=AntennaPattern)
    # multiply rates by 1/2 for the two half-duplex phases (off by default)
    half_duplex_prelog: bool = False

    def __post_init__(self):
        if self.n_antennas < 1 or self.k_pairs < 1:
            raise ValueError("n_antennas and k_pairs must be >= 1")
        if not (self.p_s > 0 and self.sigma2_r > 0 and self.sigma2_d > 0 and self.nu > 0):
            raise ValueError("powers, noise powers and nu must be positive")
        if not 0 < self.eta <= 1:
            raise ValueError("eta must lie in (0, 1]")

    @classmethod
    def from_db(cls, p_u_db: float = 0.0, sigma2_r_db: float = -70.0,
                sigma2_d_db: float = -50.0, **kw) -> "SystemParams":
        return cls(p_s=db_to_linear(p_u_db), sigma2_r=db_to_linear(sigma2_r_db),
                   sigma2_d=db_to_linear(sigma2_d_db), **kw)

    @property
    def prelog(self) -> float:
        return 0.5 if self.half_duplex_prelog else 1.0


@dataclass(frozen=True)
class DesignPoint:
    rho: float
    tilt: float

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if not 0 < self.tilt < math.pi / 2:
            raise ValueError(f"tilt must lie in (0, pi/2), got {self.tilt}")


BASELINE = DesignPoint(rho=0.5, tilt=math.pi / 4)


@dataclass(frozen=True)
class RateReport:
    sinr_mac: np.ndarray
    sinr_bc: np.ndarray
    rate_mac: np.ndarray
    rate_bc: np.ndarray
    rate_pair: np.ndarray
    sum_rate: float


def _check(profile: LargeScaleProfile, rho: float, params: SystemParams):
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if profile.k_pairs != params.k_pairs:
        raise ValueError(f"profile has {profile.k_pairs} pairs, params say {params.k_pairs}")


def harvested_power(profile: LargeScaleProfile, rho: float, params: SystemParams) -> float:
    """Average power harvested at the relay, used as its transmit power."""
    _check(profile, rho, params)
    return params.eta * (1 - rho) * params.p_s * params.n_antennas * math.fsum(profile.beta_s)


def _pick(vec, k):
    return vec if k is None else float(vec[k])


def sinr_mac_lb(profile: LargeScaleProfile, rho: float, params: SystemParams, k: int | None = None):
    """MRC uplink SINR lower bound; all pairs at once unless ``k`` is given."""
    _check(profile, rho, params)
    b = profile.beta_s
    # b_k + sum_{j != k} b_j is the full sum
    denom = b.sum() + params.sigma2_r / (rho * params.p_s)
    return _pick(params.n_antennas * b / denom, k)


def sinr_bc_lb(profile: LargeScaleProfile, rho: float, params: SystemParams, k: int | None = None):
    """MRT downlink SINR lower bound with the relay powered by harvested energy."""
    _check(profile, rho, params)
    bs, bd = profile.beta_s, profile.beta_d
    n = params.n_antennas
    noise = params.sigma2_d * bd.sum() / (params.eta * (1 - rho) * params.p_s * n * bd * bs.sum())
    return _pick(n * bd / (bd.sum() + noise), k)


def rate_report(profile: LargeScaleProfile, rho: float, params: SystemParams) -> RateReport:
    return rates_from_sinr(sinr_mac_lb(profile, rho, params),
                           sinr_bc_lb(profile, rho, params), params.prelog)


def rates_from_sinr(sinr_mac, sinr_bc, prelog: float = 1.0) -> RateReport:
    """Per-hop rates, the per-pair bottleneck and the sum over pairs."""
    g_mac = np.asarray(sinr_mac, dtype=float)
    g_bc = np.asarray(sinr_bc, dtype=float)
    r_mac = prelog * np.log2(1 + g_mac)
    r_bc = prelog * np.log2(1 + g_bc)
    r_pair = np.minimum(r_mac, r_bc)
    return RateReport(g_mac, g_bc, r_mac, r_bc, r_pair, math.fsum(r_pair))


def sum_rate(profile: LargeScaleProfile, rho: float, params: SystemParams) -> float:
    return rate_report(profile, rho, params).sum_rate
