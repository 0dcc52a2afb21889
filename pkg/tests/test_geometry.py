import numpy as np

from risuav.geometry import (
    LinkClass,
    Obstacle,
    Position3,
    classify_link,
    distance3,
    segment_blocked,
)

BOX = Obstacle(40.0, 60.0, 40.0, 60.0, 50.0)


class TestDistance3:
    def test_identity(self):
        p = Position3(3.0, -4.0, 7.0)
        assert distance3(p, p) == 0.0

    def test_pythagorean_triple(self):
        assert distance3(Position3(0, 0, 0), Position3(3, 4, 0)) == 5.0

    def test_vertical_separation(self):
        assert distance3(Position3(0, 0, 1.5), Position3(0, 0, 25.0)) == 23.5

    def test_symmetry_and_triangle_inequality(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            p, q, r = (Position3(*rng.uniform(0, 100, 2), rng.uniform(0, 50)) for _ in range(3))
            assert distance3(p, q) == distance3(q, p)
            assert distance3(p, r) <= distance3(p, q) + distance3(q, r) + 1e-12


class TestSegmentBlocked:
    def test_through_box(self):
        # midpoint (50, 50, 13.25) is strictly inside the box
        assert segment_blocked(Position3(0, 0, 1.5), Position3(100, 100, 25.0), BOX)

    def test_disjoint_x_range(self):
        assert not segment_blocked(Position3(0, 0, 1.5), Position3(10, 0, 25.0), BOX)

    def test_over_the_roof(self):
        low = Obstacle(40.0, 60.0, 40.0, 60.0, 5.0)
        assert not segment_blocked(Position3(30, 50, 20.0), Position3(70, 50, 25.0), low)

    def test_endpoint_on_face_pointing_away(self):
        p = Position3(40.0, 50.0, 10.0)
        q = Position3(0.0, 50.0, 20.0)
        assert not segment_blocked(p, q, BOX)
        assert not segment_blocked(q, p, BOX)

    def test_endpoint_on_face_pointing_inward(self):
        p = Position3(40.0, 50.0, 10.0)
        q = Position3(50.0, 50.0, 10.0)
        assert segment_blocked(p, q, BOX)

    def test_symmetric_in_endpoints(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            p = Position3(*rng.uniform(0, 100, 2), rng.uniform(0, 40))
            q = Position3(*rng.uniform(0, 100, 2), rng.uniform(0, 40))
            if p == q:
                continue
            assert segment_blocked(p, q, BOX) == segment_blocked(q, p, BOX)

    def test_translation_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            p = Position3(*rng.uniform(0, 100, 2), rng.uniform(0, 40))
            q = Position3(*rng.uniform(0, 100, 2), rng.uniform(1, 40))
            sx, sy = rng.integers(-20, 20, 2)
            moved = Obstacle(
                BOX.x_min + sx, BOX.x_max + sx, BOX.y_min + sy, BOX.y_max + sy, BOX.height
            )
            p2 = Position3(p.x + sx, p.y + sy, p.z)
            q2 = Position3(q.x + sx, q.y + sy, q.z)
            assert segment_blocked(p, q, BOX) == segment_blocked(p2, q2, moved)


class TestClassifyLink:
    def test_empty_obstacles(self):
        assert classify_link(Position3(0, 0, 1), Position3(9, 9, 9), []) is LinkClass.LOS

    def test_single_blocking_obstacle(self):
        cls = classify_link(Position3(0, 0, 1.5), Position3(100, 100, 25.0), [BOX])
        assert cls is LinkClass.NLOS

    def test_obstacle_behind_endpoint(self):
        # box center (50, 50) sits beyond q on the segment's line
        p = Position3(0.0, 0.0, 1.5)
        q = Position3(20.0, 20.0, 25.0)
        assert classify_link(p, q, [BOX]) is LinkClass.LOS

    def test_order_independence(self, table1_scenario):
        scn = table1_scenario
        obs = list(scn.obstacles)
        rng = np.random.default_rng(3)
        for _ in range(50):
            p = Position3(*rng.uniform(0, 300, 2), 1.5)
            q = Position3(*rng.uniform(0, 300, 2), 25.0)
            assert classify_link(p, q, obs) == classify_link(p, q, obs[::-1])
