"""World description and random scenario generation.

All types are immutable after construction and every operation is pure, so
scenarios can be shared freely across threads and trials.  Geometry
primitives (points, obstacles, LoS classification) live in
:mod:`risuav.geometry` and are re-exported here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import _kernels
from .channel import RadioConfig
from .geometry import (
    LinkClass,
    Obstacle,
    Position3,
    classify_link,
    distance3,
    horizontal_distance,
    segment_blocked,
)

__all__ = [
    "LinkClass",
    "Obstacle",
    "Position3",
    "classify_link",
    "distance3",
    "horizontal_distance",
    "segment_blocked",
    "Scenario",
    "GenerationConfig",
    "GenerationError",
    "generate_scenario",
    "classify_links_to_point",
]


class GenerationError(RuntimeError):
    """Rejection sampling could not place an entity (over-dense obstacles)."""


@dataclass(frozen=True)
class Scenario:
    """Immutable world description for one set of trials.

    `d2d_pairs` holds (transmitter, receiver) tuples; both talk through the
    RIS.  `cus` talk to the UAV directly.  `region` is (x_lo, x_hi, y_lo,
    y_hi) and bounds all user ground positions.  The UAV flies at
    `uav_height`, above every user but not necessarily above every obstacle
    roof, so air links can be blocked too.
    """

    d2d_pairs: tuple
    cus: tuple
    obstacles: tuple
    region: tuple
    uav_height: float
    radio: RadioConfig

    def __post_init__(self):
        object.__setattr__(self, "d2d_pairs", tuple(tuple(p) for p in self.d2d_pairs))
        object.__setattr__(self, "cus", tuple(self.cus))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "region", tuple(float(v) for v in self.region))
        x_lo, x_hi, y_lo, y_hi = self.region
        if not (x_lo < x_hi and y_lo < y_hi):
            raise ValueError(f"degenerate region {self.region}")
        if self.uav_height <= 0:
            raise ValueError("uav_height must be positive")
        users = [u for pair in self.d2d_pairs for u in pair] + list(self.cus)
        for u in users:
            if not (x_lo <= u.x <= x_hi and y_lo <= u.y <= y_hi):
                raise ValueError(f"user {u} outside region {self.region}")
            if u.z >= self.uav_height:
                raise ValueError(
                    f"uav_height {self.uav_height} must exceed user height {u.z}"
                )

    @property
    def num_pairs(self) -> int:
        return len(self.d2d_pairs)

    @property
    def num_cus(self) -> int:
        return len(self.cus)

    @property
    def num_devices(self) -> int:
        """Simultaneously communicating devices: two per pair plus the CUs."""
        return 2 * self.num_pairs + self.num_cus

    @cached_property
    def tx_array(self) -> np.ndarray:
        return _positions_array([p[0] for p in self.d2d_pairs])

    @cached_property
    def rx_array(self) -> np.ndarray:
        return _positions_array([p[1] for p in self.d2d_pairs])

    @cached_property
    def cu_array(self) -> np.ndarray:
        return _positions_array(self.cus)

    @cached_property
    def obstacle_array(self) -> np.ndarray:
        arr = np.array([o.as_slab_row() for o in self.obstacles], dtype=np.float64)
        arr = arr.reshape(len(self.obstacles), 5)
        arr.setflags(write=False)
        return arr

    def to_dict(self) -> dict:
        return {
            "d2d_pairs": [
                {"tx": tx.to_dict(), "rx": rx.to_dict()} for tx, rx in self.d2d_pairs
            ],
            "cus": [c.to_dict() for c in self.cus],
            "obstacles": [o.to_dict() for o in self.obstacles],
            "region": list(self.region),
            "uav_height": self.uav_height,
            "radio": self.radio.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        return cls(
            d2d_pairs=tuple(
                (Position3.from_dict(p["tx"]), Position3.from_dict(p["rx"]))
                for p in d["d2d_pairs"]
            ),
            cus=tuple(Position3.from_dict(c) for c in d["cus"]),
            obstacles=tuple(Obstacle.from_dict(o) for o in d["obstacles"]),
            region=tuple(d["region"]),
            uav_height=float(d["uav_height"]),
            radio=RadioConfig.from_dict(d["radio"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Scenario":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _positions_array(positions) -> np.ndarray:
    arr = np.array([p.as_tuple() for p in positions], dtype=np.float64)
    arr = arr.reshape(len(positions), 3)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GenerationConfig:
    """Parameters for random scenario generation; defaults follow the
    standard benchmark setup (300 x 300 m region, 80 pairs, 30 CUs, 45
    obstacles, 25 m UAV altitude, handset-height users)."""

    num_pairs: int = 80
    num_cus: int = 30
    num_obstacles: int = 45
    region: tuple = (0.0, 300.0, 0.0, 300.0)
    uav_height: float = 25.0
    user_height: float = 1.5
    pair_max_dist: float = 50.0
    obstacle_side: tuple = (10.0, 30.0)
    obstacle_height: tuple = (10.0, 40.0)
    max_attempts: int = 10_000
    radio: RadioConfig = field(default_factory=RadioConfig)

    def __post_init__(self):
        object.__setattr__(self, "region", tuple(float(v) for v in self.region))
        object.__setattr__(self, "obstacle_side", tuple(float(v) for v in self.obstacle_side))
        object.__setattr__(self, "obstacle_height", tuple(float(v) for v in self.obstacle_height))
        if min(self.num_pairs, self.num_cus, self.num_obstacles) < 0:
            raise ValueError("entity counts must be >= 0")
        x_lo, x_hi, y_lo, y_hi = self.region
        if not (x_lo < x_hi and y_lo < y_hi):
            raise ValueError(f"degenerate region {self.region}")
        if self.pair_max_dist <= 0:
            raise ValueError("pair_max_dist must be > 0")
        if not 0 < self.obstacle_side[0] <= self.obstacle_side[1]:
            raise ValueError(f"bad obstacle_side range {self.obstacle_side}")
        if not 0 < self.obstacle_height[0] <= self.obstacle_height[1]:
            raise ValueError(f"bad obstacle_height range {self.obstacle_height}")
        if self.obstacle_side[1] > min(x_hi - x_lo, y_hi - y_lo):
            raise ValueError("obstacle footprint cannot exceed the region")
        if self.user_height < 0 or self.user_height >= self.uav_height:
            raise ValueError("need 0 <= user_height < uav_height")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


def generate_scenario(gen_cfg: GenerationConfig, seed: int) -> Scenario:
    """Deterministically generate a random scenario.

    Obstacles are boxes with per-axis footprint sides and heights drawn
    uniformly from the configured ranges, placed fully inside the region.
    Users are uniform over the obstacle-free part of the region at
    `user_height`; each D2D receiver is additionally uniform over the disc
    of radius `pair_max_dist` around its transmitter.  Separate seeded
    streams per entity class keep user draws stable when only the obstacle
    count changes between configurations.
    """
    x_lo, x_hi, y_lo, y_hi = gen_cfg.region
    rng_obs = np.random.default_rng(np.random.SeedSequence((seed, 0)))
    rng_pairs = np.random.default_rng(np.random.SeedSequence((seed, 1)))
    rng_cus = np.random.default_rng(np.random.SeedSequence((seed, 2)))

    obstacles = []
    for _ in range(gen_cfg.num_obstacles):
        sx = rng_obs.uniform(*gen_cfg.obstacle_side)
        sy = rng_obs.uniform(*gen_cfg.obstacle_side)
        h = rng_obs.uniform(*gen_cfg.obstacle_height)
        bx = rng_obs.uniform(x_lo, x_hi - sx)
        by = rng_obs.uniform(y_lo, y_hi - sy)
        obstacles.append(Obstacle(bx, bx + sx, by, by + sy, h))

    def free_point(rng) -> Position3:
        for _ in range(gen_cfg.max_attempts):
            x = rng.uniform(x_lo, x_hi)
            y = rng.uniform(y_lo, y_hi)
            if not any(o.contains_xy(x, y) for o in obstacles):
                return Position3(x, y, gen_cfg.user_height)
        raise GenerationError(
            f"could not place a user after {gen_cfg.max_attempts} attempts"
        )

    def paired_point(rng, tx: Position3) -> Position3:
        for _ in range(gen_cfg.max_attempts):
            ang = rng.uniform(0.0, 2.0 * math.pi)
            rad = gen_cfg.pair_max_dist * math.sqrt(rng.uniform(0.0, 1.0))
            x = tx.x + rad * math.cos(ang)
            y = tx.y + rad * math.sin(ang)
            if not (x_lo <= x <= x_hi and y_lo <= y <= y_hi):
                continue
            if not any(o.contains_xy(x, y) for o in obstacles):
                return Position3(x, y, gen_cfg.user_height)
        raise GenerationError(
            f"could not place a D2D receiver after {gen_cfg.max_attempts} attempts"
        )

    pairs = []
    for _ in range(gen_cfg.num_pairs):
        tx = free_point(rng_pairs)
        pairs.append((tx, paired_point(rng_pairs, tx)))
    cus = [free_point(rng_cus) for _ in range(gen_cfg.num_cus)]

    return Scenario(
        d2d_pairs=tuple(pairs),
        cus=tuple(cus),
        obstacles=tuple(obstacles),
        region=gen_cfg.region,
        uav_height=gen_cfg.uav_height,
        radio=gen_cfg.radio,
    )


def classify_links_to_point(points_array: np.ndarray, r: Position3, scn: Scenario) -> np.ndarray:
    """Vectorized classify_link for segments from array rows to `r` (0=LoS, 1=NLoS)."""
    return _kernels.classify_to_point(points_array, r.x, r.y, r.z, scn.obstacle_array)
