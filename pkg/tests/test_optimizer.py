import itertools
import os
import random
import unittest
from dataclasses import replace
from pathlib import Path
from typing import Optional

from dresg.aggregation import HopVector, PacketConfig, enumerate_hop_combinations
from dresg.energy import ConfigVector, energy_report
from dresg.models import InfeasibleScenarioError, SearchGuardError
from dresg.optimizer import (
    baseline,
    best_configs_for_combo,
    candidate_configs,
    improvement_ratios,
    optimize,
    solve,
)
from dresg.radio import DEFAULT_ENVIRONMENT, is_feasible, max_range
from dresg.routing import ImprovementRatios, RoutingModel, RoutingProblem
from dresg.topology import Spreading, build_network
from dresg.transceivers import (
    BUILTIN_TRANSCEIVERS,
    CC1200,
    SX1272,
    TransceiverCatalog,
    TransceiverModel,
)

FIXTURES = Path(__file__).parent / "fixtures"
SLOW = os.environ.get("DRESG_SLOW_TESTS") == "1"
ENV = DEFAULT_ENVIRONMENT


def problem_for(
    tx: TransceiverModel = CC1200,
    rings: int = 7,
    c: int = 3,
    *,
    aggregate: bool = True,
    spreading: Spreading = Spreading.EQUIDISTANT,
    exhaustive: bool = False,
) -> RoutingProblem:
    return RoutingProblem(
        network=build_network(max_range(tx, ENV), rings, c, spreading=spreading),
        transceiver=tx,
        packet=PacketConfig(aggregate=aggregate),
        exhaustive=exhaustive,
    )


def brute_force_bottleneck(problem: RoutingProblem) -> Optional[float]:
    """Every hop vector times every feasible (power, rate) per ring."""
    net, tx = problem.network, problem.transceiver
    pairs = [
        (p.level, s.level) for p in tx.power_levels for s in tx.rate_levels
    ]
    best: Optional[float] = None
    for delta in enumerate_hop_combinations(net.ring_count):
        per_ring = []
        for r in net.rings:
            d = net.hop_distance(r, delta.destination(r))
            per_ring.append([(p, s) for p, s in pairs if is_feasible(tx, ENV, p, s, d)])
        for entries in itertools.product(*per_ring):
            report = energy_report(
                net, delta, ConfigVector(entries), problem.packet, tx, ENV
            )
            if best is None or report.e_bt < best:
                best = report.e_bt
    return best


class TestCandidateConfigs(unittest.TestCase):
    def test_short_hop_keeps_only_the_fastest_cheapest(self) -> None:
        net = build_network(max_range(CC1200, ENV), 7, 3)
        self.assertEqual(
            candidate_configs(1, HopVector.next_ring_hop(7), CC1200, ENV, net), [(5, 1)]
        )

    def test_long_hop_prefers_faster_rate(self) -> None:
        net = build_network(max_range(CC1200, ENV), 7, 3)
        single = HopVector.single_hop(7)
        self.assertEqual(candidate_configs(4, single, CC1200, ENV, net), [(1, 6)])

    def test_unreachable_hop_is_empty(self) -> None:
        net = build_network(50_000.0, 1, 1)
        self.assertEqual(candidate_configs(1, HopVector.of((1,)), CC1200, ENV, net), [])

    def test_exhaustive_lists_every_feasible_pair(self) -> None:
        net = build_network(max_range(CC1200, ENV), 7, 3)
        delta = HopVector.single_hop(7)
        every = candidate_configs(7, delta, CC1200, ENV, net, exhaustive=True)
        self.assertEqual(every, [(1, 7)])
        short = candidate_configs(1, delta, CC1200, ENV, net, exhaustive=True)
        self.assertIn((5, 1), short)
        self.assertIn((1, 7), short)


class TestFirstReferenceNetwork(unittest.TestCase):
    problem: RoutingProblem

    @classmethod
    def setUpClass(cls) -> None:
        cls.problem = problem_for()
        cls.single = baseline(RoutingModel.SINGLE_HOP, cls.problem)
        cls.next_ring = baseline(RoutingModel.NEXT_RING_HOP, cls.problem)
        cls.optimal = optimize(cls.problem)

    def test_single_hop_configurations(self) -> None:
        self.assertEqual(
            self.single.config_star.entries,
            ((5, 1), (4, 3), (1, 4), (1, 6), (4, 7), (2, 7), (1, 7)),
        )
        self.assertEqual(self.single.report.bottleneck_ring, 7)
        self.assertAlmostEqual(self.single.e_bt * 1e3, 58.5, delta=0.1)

    def test_optimal_hop_vector(self) -> None:
        self.assertEqual(self.optimal.delta_star.delta, (1, 1, 1, 4, 1, 3, 1))
        self.assertEqual(
            self.optimal.config_star.entries,
            ((5, 1), (5, 1), (5, 1), (1, 6), (5, 1), (1, 4), (5, 1)),
        )
        report = self.optimal.report
        self.assertEqual([r.payloads for r in report.rings], [985, 328, 109, 4, 1, 4, 1])
        self.assertEqual([r.packets for r in report.rings], [247, 82, 28, 1, 1, 1, 1])
        self.assertEqual(report.bottleneck_ring, 1)
        self.assertAlmostEqual(self.optimal.slot_time_s, 107.03, delta=0.1)

    def test_next_ring_hop_bottleneck(self) -> None:
        self.assertEqual(self.next_ring.report.bottleneck_ring, 1)

    def test_search_statistics(self) -> None:
        stats = self.optimal.stats
        self.assertEqual(stats.combos_evaluated, 5040)
        self.assertEqual(stats.combos_infeasible, 0)
        self.assertGreaterEqual(stats.tied_combos, 1)
        self.assertGreater(stats.configs_pruned, 0)

    def test_combo_helper_matches_search(self) -> None:
        found = best_configs_for_combo(HopVector.of((1, 1, 1, 4, 1, 3, 1)), self.problem)
        assert found is not None
        config, e_bt = found
        self.assertEqual(config, self.optimal.config_star)
        self.assertAlmostEqual(e_bt, self.optimal.e_bt)

    def test_envelope(self) -> None:
        self.assertLessEqual(self.optimal.e_bt, self.single.e_bt)
        self.assertLessEqual(self.optimal.e_bt, self.next_ring.e_bt)

    def test_without_aggregation(self) -> None:
        plain = optimize(problem_for(aggregate=False))
        self.assertEqual(plain.delta_star.delta, (1, 1, 1, 1, 1, 1, 7))
        self.assertEqual(plain.config_star.entries, ((5, 1),) * 6 + ((1, 7),))
        self.assertLessEqual(self.optimal.e_bt, plain.e_bt)
        # ring 7 keeps its single-hop (1, 7) configuration
        self.assertAlmostEqual(plain.e_bt * 1e3, 58.5, delta=0.1)
        reduction = 1 - self.optimal.e_bt / plain.e_bt
        self.assertAlmostEqual(reduction * 100, 67.1, delta=0.5)


class TestSecondReferenceNetwork(unittest.TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        cls.single = baseline(RoutingModel.SINGLE_HOP, problem_for(c=2))
        cls.optimal = optimize(problem_for(c=2))
        cls.plain = optimize(problem_for(c=2, aggregate=False))

    def test_next_ring_routing_is_optimal(self) -> None:
        self.assertEqual(self.optimal.delta_star.delta, (1,) * 7)
        self.assertEqual(self.plain.delta_star.delta, (1,) * 7)
        rings = self.optimal.report.rings
        self.assertEqual([r.payloads for r in rings], [127, 63, 31, 15, 7, 3, 1])
        self.assertEqual([r.packets for r in rings], [32, 16, 8, 4, 2, 1, 1])

    def test_aggregation_reduction(self) -> None:
        reduction = 1 - self.optimal.e_bt / self.plain.e_bt
        self.assertAlmostEqual(reduction * 100, 74.7, delta=2.0)

    def test_reduction_against_single_hop(self) -> None:
        reduction = 1 - self.plain.e_bt / self.single.e_bt
        self.assertAlmostEqual(reduction * 100, 83.1, delta=2.0)


class TestSearchProperties(unittest.TestCase):
    def test_single_ring_models_agree(self) -> None:
        problem = problem_for(rings=1, c=1)
        results = [solve(problem, model) for model in RoutingModel]
        self.assertEqual({r.delta_star.delta for r in results}, {(1,)})
        self.assertEqual(len({r.config_star for r in results}), 1)
        ratios = improvement_ratios(problem)
        self.assertEqual(ratios, ImprovementRatios(1.0, 1.0))

    def test_envelope_on_random_structures(self) -> None:
        rng = random.Random(20170101)
        for _ in range(200):
            tx = rng.choice(BUILTIN_TRANSCEIVERS)
            problem = problem_for(
                tx,
                rings=rng.randint(1, 6),
                c=rng.randint(1, 4),
                aggregate=rng.random() < 0.5,
                spreading=rng.choice(list(Spreading)),
            )
            ratios = improvement_ratios(problem)
            self.assertGreaterEqual(ratios.rho_sh, 1 - 1e-8, problem)
            self.assertGreaterEqual(ratios.rho_nrh, 1 - 1e-8, problem)

    def test_pruned_search_matches_exhaustive_search(self) -> None:
        for tx, rings, c, aggregate in itertools.product(
            BUILTIN_TRANSCEIVERS, range(1, 5), range(1, 5), (True, False)
        ):
            pruned = optimize(problem_for(tx, rings, c, aggregate=aggregate))
            full = optimize(problem_for(tx, rings, c, aggregate=aggregate, exhaustive=True))
            case = (tx.name, rings, c, aggregate)
            self.assertEqual(pruned.delta_star, full.delta_star, case)
            self.assertLess(abs(pruned.e_bt / full.e_bt - 1.0), 1e-9, case)
            self.assertAlmostEqual(pruned.report.e_n / full.report.e_n, 1.0, places=8)

    def test_matches_brute_force(self) -> None:
        toy = TransceiverCatalog().load_file(FIXTURES / "toy_radio.json")[0]
        for tx, rings in ((toy, 3), (SX1272, 2), (CC1200, 2)):
            for aggregate in (True, False):
                problem = problem_for(tx, rings, 3, aggregate=aggregate)
                expected = brute_force_bottleneck(problem)
                assert expected is not None
                self.assertAlmostEqual(optimize(problem).e_bt / expected, 1.0, places=8)

    def test_worker_count_does_not_change_result(self) -> None:
        problem = problem_for(rings=5, c=3)
        self.assertEqual(optimize(problem, threads=1), optimize(problem, threads=2))

    def test_guard(self) -> None:
        problem = replace(problem_for(rings=3, c=2), max_rings=2)
        with self.assertRaises(SearchGuardError):
            optimize(problem)

    def test_joint_assignment_guard(self) -> None:
        problem = replace(problem_for(rings=4, c=2, exhaustive=True), max_joint_assignments=0)
        with self.assertRaises(SearchGuardError):
            optimize(problem)

    def test_unreachable_gateway(self) -> None:
        problem = RoutingProblem(network=build_network(50_000.0, 2, 2), transceiver=CC1200)
        with self.assertRaises(InfeasibleScenarioError):
            optimize(problem)
        with self.assertRaises(InfeasibleScenarioError):
            baseline(RoutingModel.SINGLE_HOP, problem)


def ring_sweep(last: int, *, threads: int = 2) -> dict[int, ImprovementRatios]:
    return {
        rings: improvement_ratios(problem_for(SX1272, rings, 3), threads=threads)
        for rings in range(1, last + 1)
    }


class TestRingSweep(unittest.TestCase):
    def test_single_hop_gain_peaks_at_four_rings(self) -> None:
        ratios = ring_sweep(8)
        rho_sh = {rings: r.rho_sh for rings, r in ratios.items()}
        self.assertEqual(max(rho_sh, key=rho_sh.__getitem__), 4)
        self.assertAlmostEqual(rho_sh[1], 1.0)
        self.assertGreater(rho_sh[4], rho_sh[3])
        self.assertGreater(rho_sh[4], rho_sh[5])
        self.assertGreater(ratios[8].rho_nrh, ratios[2].rho_nrh)


@unittest.skipUnless(SLOW, "set DRESG_SLOW_TESTS=1 to run the ten-ring sweep")
class TestFullRingSweep(unittest.TestCase):
    def test_shape_up_to_ten_rings(self) -> None:
        ratios = ring_sweep(10, threads=4)
        rho_sh = {rings: r.rho_sh for rings, r in ratios.items()}
        self.assertEqual(max(rho_sh, key=rho_sh.__getitem__), 4)
        self.assertLessEqual(abs(rho_sh[10] - 1.0), 0.05)
        self.assertGreater(ratios[10].rho_nrh, ratios[2].rho_nrh)


@unittest.skipUnless(SLOW, "set DRESG_SLOW_TESTS=1 to run the spreading study")
class TestSpreadingStudy(unittest.TestCase):
    def test_fibonacci_spreading_gives_the_lowest_bottleneck(self) -> None:
        single = {}
        optimal = {}
        for spreading in Spreading:
            problem = problem_for(spreading=spreading)
            single[spreading] = baseline(RoutingModel.SINGLE_HOP, problem).e_bt
            optimal[spreading] = optimize(problem, threads=2).e_bt
        values = list(single.values())
        for value in values[1:]:
            self.assertAlmostEqual(value / values[0], 1.0, places=12)
        self.assertEqual(min(optimal, key=optimal.__getitem__), Spreading.FIBONACCI)


if __name__ == "__main__":
    unittest.main()
