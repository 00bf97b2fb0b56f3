"""Random user placement and scenario files."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kvfile import KVFormatError, format_kv, get_float, get_int, read_kv
from .propagation import Scenario


@dataclass(frozen=True)
class PlacementConfig:
    k_pairs: int = 5
    max_distance: float = 10.0
    min_horizontal_distance: float = 1.0
    azimuth_span: float = math.radians(120.0)
    relay_height: float = 3.0

    def __post_init__(self):
        if self.k_pairs < 1:
            raise ValueError("k_pairs must be >= 1")
        if not 0 < self.min_horizontal_distance < self.max_distance:
            raise ValueError("need 0 < min_horizontal_distance < max_distance")
        if not 0 < self.azimuth_span <= 2 * math.pi:
            raise ValueError("azimuth_span must lie in (0, 2*pi]")
        if not self.relay_height > 0:
            raise ValueError("relay_height must be positive")

    @property
    def max_horizontal_distance(self) -> float:
        """Largest ground radius whose slant distance stays within max_distance."""
        if self.relay_height >= self.max_distance:
            raise ValueError("infeasible placement: relay_height >= max_distance")
        r = math.sqrt(self.max_distance**2 - self.relay_height**2)
        if r <= self.min_horizontal_distance:
            raise ValueError("infeasible placement: no ground radius satisfies both distance limits")
        return r


def _sample_users(config: PlacementConfig, rng: np.random.Generator, m: int) -> np.ndarray:
    r_lo = config.min_horizontal_distance
    r_hi = config.max_horizontal_distance
    # uniform in area over the annular sector
    r = np.sqrt(r_lo**2 + rng.random(m) * (r_hi**2 - r_lo**2))
    phi = (rng.random(m) - 0.5) * config.azimuth_span
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def sample_scenario(config: PlacementConfig, rng: np.random.Generator) -> Scenario:
    """Drop K sources then K destinations independently over the sector."""
    config.max_horizontal_distance  # feasibility check
    src = _sample_users(config, rng, config.k_pairs)
    dst = _sample_users(config, rng, config.k_pairs)
    return Scenario(config.relay_height, src, dst)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    items: dict[str, object] = {
        "relay_height": float(scenario.relay_height),
        "k_pairs": scenario.k_pairs,
    }
    for role, pos in (("source", scenario.source_positions), ("dest", scenario.dest_positions)):
        for k, (x, y) in enumerate(pos, start=1):
            items[f"{role}_{k}_x"] = float(x)
            items[f"{role}_{k}_y"] = float(y)
    Path(path).write_text(format_kv(items), encoding="utf-8")


def load_scenario(path: str | Path) -> Scenario:
    src = str(path)
    kv = read_kv(path)
    height = get_float(kv, "relay_height", src)
    k = get_int(kv, "k_pairs", src)
    if k < 1:
        raise KVFormatError(f"{src}: k_pairs must be >= 1, got {k}")
    expected = {"relay_height", "k_pairs"}
    pos = {"source": np.empty((k, 2)), "dest": np.empty((k, 2))}
    for role, arr in pos.items():
        for i in range(k):
            for c, axis in enumerate("xy"):
                key = f"{role}_{i + 1}_{axis}"
                expected.add(key)
                arr[i, c] = get_float(kv, key, src)
    extra = sorted(set(kv) - expected)
    if extra:
        raise KVFormatError(f"{src}: keys inconsistent with k_pairs = {k}: {', '.join(extra)}")
    try:
        return Scenario(height, pos["source"], pos["dest"])
    except ValueError as exc:
        raise KVFormatError(f"{src}: {exc}") from None
