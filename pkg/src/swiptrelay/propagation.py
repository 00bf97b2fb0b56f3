"""Geometry, 3D directional antenna gain and large-scale fading.

Angles are in radians. Elevation ``theta`` is measured downward from the
horizon (positive toward the ground), azimuth ``phi`` from the X-axis,
which is also the boresight of the relay array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def db_to_linear(x):
    """Power-convention dB to linear: ``10**(x/10)``.

    Works on scalars and arrays; non-finite input raises ``ValueError``.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"dB value must be finite, got {x!r}")
    out = 10.0 ** (arr / 10.0)
    return float(out) if out.ndim == 0 else out


def linear_to_db(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("linear power must be positive")
    out = 10.0 * np.log10(arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AntennaPattern:
    """3GPP-style separable directional pattern of the relay array."""

    sll_az: float = 25.0
    sll_el: float = 20.0
    phi_3db: float = math.radians(65.0)
    theta_3db: float = math.radians(6.0)
    boresight_azimuth: float = 0.0

    def __post_init__(self):
        if not (self.phi_3db > 0 and self.theta_3db > 0):
            raise ValueError("3-dB beamwidths must be positive")
        if not (self.sll_az > 0 and self.sll_el > 0):
            raise ValueError("sidelobe levels must be positive (dB)")

    @property
    def floor_dbi(self) -> float:
        return -(self.sll_az + self.sll_el)


@dataclass(frozen=True)
class UserGeometry:
    """Distance and angles from the relay to one user, or to a batch of users.

    Fields are floats for a single user and equal-length arrays for a batch.
    """

    d: float | np.ndarray
    theta: float | np.ndarray
    phi: float | np.ndarray

    def __len__(self):
        return int(np.size(self.d))

    def __getitem__(self, k):
        return UserGeometry(float(np.asarray(self.d)[k]),
                            float(np.asarray(self.theta)[k]),
                            float(np.asarray(self.phi)[k]))


def user_geometry(relay_height: float, user_xy) -> UserGeometry:
    """Slant distance, elevation and azimuth of ground users seen from the relay.

    ``user_xy`` is a single ``(x, y)`` pair or an ``(M, 2)`` array. A user
    exactly below the relay has no azimuth and is rejected.
    """
    if not relay_height > 0:
        raise ValueError(f"relay_height must be positive, got {relay_height}")
    xy = np.asarray(user_xy, dtype=float)
    single = xy.ndim == 1
    xy = np.atleast_2d(xy)
    if xy.shape[-1] != 2:
        raise ValueError("user coordinates must be (x, y) pairs")
    horiz = np.hypot(xy[:, 0], xy[:, 1])
    if np.any(horiz == 0):
        raise ValueError("user directly below the relay: azimuth undefined")
    d = np.hypot(horiz, relay_height)
    theta = np.arctan2(relay_height, horiz)
    phi = np.arctan2(xy[:, 1], xy[:, 0])
    # y = -0.0 or a tiny negative y behind the relay rounds to -pi; keep phi in (-pi, pi]
    phi = np.where(phi <= -np.pi, np.pi, phi)
    if single:
        return UserGeometry(float(d[0]), float(theta[0]), float(phi[0]))
    return UserGeometry(d, theta, phi)


def _wrap_angle(a):
    # into (-pi, pi]
    return np.pi - np.mod(np.pi - a, 2 * np.pi)


def antenna_gain_dbi(geom: UserGeometry, tilt: float, pattern: AntennaPattern = AntennaPattern()):
    """Relay array gain toward ``geom`` in dBi for a common electrical tilt.

    The azimuth and elevation attenuations are each clamped at their own
    sidelobe level before being added.
    """
    if not 0 < tilt < math.pi / 2:
        raise ValueError(f"tilt must lie in (0, pi/2), got {tilt}")
    dphi = _wrap_angle(np.asarray(geom.phi, dtype=float) - pattern.boresight_azimuth)
    dtheta = np.asarray(geom.theta, dtype=float) - tilt
    att_az = np.minimum(12.0 * (dphi / pattern.phi_3db) ** 2, pattern.sll_az)
    att_el = np.minimum(12.0 * (dtheta / pattern.theta_3db) ** 2, pattern.sll_el)
    out = -(att_az + att_el)
    return float(out) if np.ndim(out) == 0 else out


def large_scale_coeff(geom: UserGeometry, tilt: float, pattern: AntennaPattern = AntennaPattern(),
                      nu: float = 3.76):
    """Linear large-scale gain ``d**-nu * 10**(A_dBi/10)``."""
    d = np.asarray(geom.d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    if not nu > 0:
        raise ValueError("path-loss exponent must be positive")
    gain = np.asarray(antenna_gain_dbi(geom, tilt, pattern))
    out = d ** (-nu) * 10.0 ** (gain / 10.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Scenario:
    """Relay height plus K source and K destination ground positions (meters)."""

    relay_height: float
    source_positions: np.ndarray
    dest_positions: np.ndarray
    source_geometry: UserGeometry = field(init=False, repr=False, compare=False)
    dest_geometry: UserGeometry = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        src = np.array(self.source_positions, dtype=float).reshape(-1, 2)
        dst = np.array(self.dest_positions, dtype=float).reshape(-1, 2)
        if src.shape != dst.shape or src.shape[0] < 1:
            raise ValueError("need the same positive number of sources and destinations")
        src.flags.writeable = False
        dst.flags.writeable = False
        object.__setattr__(self, "source_positions", src)
        object.__setattr__(self, "dest_positions", dst)
        object.__setattr__(self, "source_geometry", user_geometry(self.relay_height, src))
        object.__setattr__(self, "dest_geometry", user_geometry(self.relay_height, dst))

    @property
    def k_pairs(self) -> int:
        return self.source_positions.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (self.relay_height == other.relay_height
                and np.array_equal(self.source_positions, other.source_positions)
                and np.array_equal(self.dest_positions, other.dest_positions))

    __hash__ = None


@dataclass(frozen=True)
class LargeScaleProfile:
    tilt: float
    beta_s: np.ndarray
    beta_d: np.ndarray

    def __post_init__(self):
        bs = np.array(self.beta_s, dtype=float).ravel()
        bd = np.array(self.beta_d, dtype=float).ravel()
        if bs.shape != bd.shape:
            raise ValueError("beta_s and beta_d must have the same length")
        if np.any(bs <= 0) or np.any(bd <= 0):
            raise ValueError("large-scale coefficients must be positive")
        object.__setattr__(self, "beta_s", bs)
        object.__setattr__(self, "beta_d", bd)

    @property
    def k_pairs(self) -> int:
        return self.beta_s.size


def beta_profile(scenario: Scenario, tilt: float, pattern: AntennaPattern = AntennaPattern(),
                 nu: float = 3.76) -> LargeScaleProfile:
    return LargeScaleProfile(
        tilt=tilt,
        beta_s=large_scale_coeff(scenario.source_geometry, tilt, pattern, nu),
        beta_d=large_scale_coeff(scenario.dest_geometry, tilt, pattern, nu),
    )
