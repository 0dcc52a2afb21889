import pytest

from risuav.channel import RadioConfig
from risuav.geometry import Obstacle, Position3
from risuav.scenario import GenerationConfig, Scenario, generate_scenario


@pytest.fixture(scope="session")
def table1_scenario():
    """Full-size benchmark scenario: 80 pairs, 30 CUs, 45 obstacles."""
    return generate_scenario(GenerationConfig(), seed=42)


def make_scenario(pairs, cus, obstacles=(), region=(0.0, 100.0, 0.0, 100.0), height=25.0,
                  radio=None):
    """Hand-built scenario from (x, y) tuples; users at 1.5 m."""
    return Scenario(
        d2d_pairs=tuple(
            (Position3(ax, ay, 1.5), Position3(bx, by, 1.5)) for (ax, ay), (bx, by) in pairs
        ),
        cus=tuple(Position3(x, y, 1.5) for x, y in cus),
        obstacles=tuple(obstacles),
        region=region,
        uav_height=height,
        radio=radio if radio is not None else RadioConfig(),
    )


@pytest.fixture
def two_pop_scenario():
    """Small mixed scenario with one obstacle between the populations."""
    return make_scenario(
        pairs=[((10.0, 20.0), (30.0, 25.0)), ((15.0, 70.0), (25.0, 80.0))],
        cus=[(80.0, 30.0), (70.0, 75.0), (85.0, 60.0)],
        obstacles=[Obstacle(45.0, 55.0, 40.0, 60.0, 35.0)],
    )


def random_boxes(rng, count, region=(0.0, 100.0, 0.0, 100.0), side=(2.0, 20.0),
                 height=(5.0, 40.0)):
    out = []
    x_lo, x_hi, y_lo, y_hi = region
    for _ in range(count):
        sx = rng.uniform(*side)
        sy = rng.uniform(*side)
        bx = rng.uniform(x_lo, x_hi - sx)
        by = rng.uniform(y_lo, y_hi - sy)
        out.append(Obstacle(bx, bx + sx, by, by + sy, rng.uniform(*height)))
    return out
