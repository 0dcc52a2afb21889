"""Points, axis-aligned box obstacles, and LoS/NLoS segment classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class LinkClass(Enum):
    """Propagation class of one link; selects path-loss law and fading family."""

    LOS = 0
    NLOS = 1


@dataclass(frozen=True)
class Position3:
    """A point in meters; z is height above ground and must be nonnegative."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"coordinates must be finite, got {(self.x, self.y, self.z)}")
        if self.z < 0:
            raise ValueError(f"z must be >= 0, got {self.z}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "z": self.z}

    @classmethod
    def from_dict(cls, d: dict) -> "Position3":
        return cls(float(d["x"]), float(d["y"]), float(d["z"]))


def distance3(p: Position3, q: Position3) -> float:
    """Euclidean distance between two points."""
    dx = p.x - q.x
    dy = p.y - q.y
    dz = p.z - q.z
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def horizontal_distance(p: Position3, q: Position3) -> float:
    """Distance between the ground projections of two points."""
    return math.hypot(p.x - q.x, p.y - q.y)


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned box footprint extruded from the ground to `height`."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    height: float

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min must be < x_max, got [{self.x_min}, {self.x_max}]")
        if not self.y_min < self.y_max:
            raise ValueError(f"y_min must be < y_max, got [{self.y_min}, {self.y_max}]")
        if not self.height > 0:
            raise ValueError(f"height must be > 0, got {self.height}")

    def contains_xy(self, x: float, y: float) -> bool:
        """Whether (x, y) lies in the closed footprint."""
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def as_slab_row(self) -> tuple[float, float, float, float, float]:
        return (self.x_min, self.x_max, self.y_min, self.y_max, self.height)

    def to_dict(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "y_min": self.y_min,
            "y_max": self.y_max,
            "height": self.height,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Obstacle":
        return cls(
            float(d["x_min"]),
            float(d["x_max"]),
            float(d["y_min"]),
            float(d["y_max"]),
            float(d["height"]),
        )


def segment_blocked(p: Position3, q: Position3, obs: Obstacle) -> bool:
    """Whether the open segment pq intersects the closed box of `obs`.

    Slab (parametric clipping) method over the three axes.  Endpoints lying
    exactly on a face do not count as blocked, so a user standing against a
    wall is not classified as self-blocked.
    """
    p_coords = (p.x, p.y, p.z)
    d_coords = (q.x - p.x, q.y - p.y, q.z - p.z)
    lo = (obs.x_min, obs.y_min, 0.0)
    hi = (obs.x_max, obs.y_max, obs.height)
    tmin = -math.inf
    tmax = math.inf
    for pa, da, la, ha in zip(p_coords, d_coords, lo, hi):
        if da == 0.0:
            if pa < la or pa > ha:
                return False
            continue
        ta = (la - pa) / da
        tb = (ha - pa) / da
        if ta > tb:
            ta, tb = tb, ta
        tmin = max(tmin, ta)
        tmax = min(tmax, tb)
        if tmin > tmax:
            return False
    return tmax > 0.0 and tmin < 1.0


def classify_link(p: Position3, q: Position3, obstacles) -> LinkClass:
    """NLoS when any obstacle blocks the segment, LoS otherwise."""
    for obs in obstacles:
        if segment_blocked(p, q, obs):
            return LinkClass.NLOS
    return LinkClass.LOS
