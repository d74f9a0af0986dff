import unittest

from dresg.models import ScenarioValidationError
from dresg.topology import (
    RingNetwork,
    Spreading,
    build_network,
    fibonacci,
    ring_distance,
    stations_in_ring,
)


class TestFibonacci(unittest.TestCase):
    def test_first_terms(self) -> None:
        self.assertEqual([fibonacci(n) for n in range(9)], [0, 1, 1, 2, 3, 5, 8, 13, 21])

    def test_negative_index_is_rejected(self) -> None:
        with self.assertRaises(ValueError):
            fibonacci(-1)


class TestRingDistance(unittest.TestCase):
    def test_equidistant(self) -> None:
        self.assertEqual(ring_distance(Spreading.EQUIDISTANT, 5, 10, 1000.0), 500.0)

    def test_fibonacci_four_rings(self) -> None:
        got = [ring_distance(Spreading.FIBONACCI, r, 4, 1.0) for r in range(1, 5)]
        for value, expected in zip(got, (0.2, 0.4, 0.6, 1.0)):
            self.assertAlmostEqual(value, expected, places=12)

    def test_reverse_fibonacci_four_rings(self) -> None:
        got = [ring_distance(Spreading.REVERSE_FIBONACCI, r, 4, 1.0) for r in range(1, 5)]
        for value, expected in zip(got, (0.4, 0.6, 0.8, 1.0)):
            self.assertAlmostEqual(value, expected, places=12)

    def test_last_ring_sits_at_max_distance(self) -> None:
        for spreading in Spreading:
            for rings in range(1, 13):
                self.assertEqual(ring_distance(spreading, rings, rings, 1218.6), 1218.6)

    def test_distances_strictly_increase(self) -> None:
        for spreading in Spreading:
            for rings in range(1, 13):
                net = build_network(1000.0, rings, 2, spreading=spreading)
                gaps = [b - a for a, b in zip((0.0,) + net.distances, net.distances)]
                self.assertTrue(all(gap > 0 for gap in gaps), (spreading, rings))

    def test_reverse_fibonacci_gaps_mirror_fibonacci_gaps(self) -> None:
        for rings in range(1, 11):
            fib = build_network(1.0, rings, 1, spreading=Spreading.FIBONACCI)
            rev = build_network(1.0, rings, 1, spreading=Spreading.REVERSE_FIBONACCI)
            fib_gaps = [b - a for a, b in zip((0.0,) + fib.distances, fib.distances)]
            rev_gaps = [b - a for a, b in zip((0.0,) + rev.distances, rev.distances)]
            for a, b in zip(rev_gaps, reversed(fib_gaps)):
                self.assertAlmostEqual(a, b, places=12)

    def test_out_of_range_ring(self) -> None:
        with self.assertRaises(ScenarioValidationError):
            ring_distance(Spreading.EQUIDISTANT, 0, 3, 100.0)
        with self.assertRaises(ScenarioValidationError):
            ring_distance(Spreading.EQUIDISTANT, 4, 3, 100.0)
        with self.assertRaises(ScenarioValidationError):
            ring_distance(Spreading.EQUIDISTANT, 1, 0, 100.0)


class TestBuildNetwork(unittest.TestCase):
    def test_station_counts(self) -> None:
        self.assertEqual(build_network(1218.6, 7, 3).station_count, 1093)
        self.assertEqual(build_network(1218.6, 7, 2).station_count, 127)
        self.assertEqual(build_network(1.0, 1, 1).station_count, 1)

    def test_branch_load_with_several_branches(self) -> None:
        net = build_network(100.0, 2, 1, 4)
        self.assertEqual(net.branch_load, 2)
        self.assertEqual(net.station_count, 8)

    def test_closed_form_matches_ring_sum(self) -> None:
        for rings in range(1, 8):
            for c in range(1, 5):
                for branches in (1, 3):
                    net = build_network(500.0, rings, c, branches)
                    total = sum(stations_in_ring(net, r) for r in net.rings)
                    self.assertEqual(total, net.station_count)

    def test_stations_in_last_ring(self) -> None:
        self.assertEqual(stations_in_ring(build_network(1218.6, 7, 3), 7), 729)
        self.assertEqual(stations_in_ring(build_network(1218.6, 7, 2), 7), 64)
        self.assertEqual(stations_in_ring(build_network(1218.6, 7, 2, 5), 1), 5)

    def test_hop_distance_is_radial(self) -> None:
        net = build_network(700.0, 7, 3)
        self.assertAlmostEqual(net.hop_distance(7, 4), 300.0)
        self.assertAlmostEqual(net.hop_distance(3, 0), 300.0)
        with self.assertRaises(ScenarioValidationError):
            net.hop_distance(3, 3)

    def test_invalid_parameters(self) -> None:
        with self.assertRaises(ScenarioValidationError) as ctx:
            build_network(0.0, 3, 2)
        self.assertEqual(ctx.exception.field_path, "max_distance")
        with self.assertRaises(ScenarioValidationError) as ctx:
            build_network(100.0, 3, 0)
        self.assertEqual(ctx.exception.field_path, "children_ratio")
        with self.assertRaises(ScenarioValidationError):
            stations_in_ring(build_network(100.0, 3, 2), 4)

    def test_network_is_immutable(self) -> None:
        net = build_network(100.0, 3, 2)
        self.assertIsInstance(net, RingNetwork)
        with self.assertRaises(AttributeError):
            net.ring_count = 4  # type: ignore[misc]


if __name__ == "__main__":
    unittest.main()
