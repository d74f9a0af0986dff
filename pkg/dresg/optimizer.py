"""
Optimal-hop search.

For every hop vector the cheapest bottleneck is found exactly with a dynamic
programme over the hop tree (rings are nodes, ring ``r`` hangs off
``r - delta[r]``). A station's energy depends on its own configuration and on
the rates its direct children pick, so each ring keeps, per own option, the
smallest achievable maximum over its subtree.

Hop vectors whose bottleneck ties the global minimum (relative 1e-9) then go
through a second pass that picks, under that bottleneck, the configuration
with the lowest network energy and the lexicographically smallest
(power, rate) vector. The overall winner is the smallest
(e_N, delta, configuration) among the tied vectors.

Both passes are independent per hop vector, so the index range of the
lexicographic enumeration is split into chunks for a process pool and the
reduction only uses exact comparisons; the result does not depend on the
number of workers.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .aggregation import (
    HopVector,
    check_combination_guard,
    decode_hop_index,
    hop_combination_count,
)
from .energy import (
    ConfigVector,
    EnergyReport,
    energy_report,
    rx_unit_energy,
    slot_time,
    tx_unit_energy,
)
from .models import InfeasibleScenarioError, SearchGuardError
from .radio import RadioEnvironment, is_feasible
from .routing import (
    ImprovementRatios,
    RoutingModel,
    RoutingProblem,
    RoutingResult,
    SearchStats,
)
from .topology import RingNetwork
from .transceivers import TransceiverModel

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-9
CHUNKS_PER_WORKER = 8

Assignment = tuple[tuple[int, int, int], ...]


@dataclass(frozen=True, slots=True)
class HopOptions:
    """Configurations a ring may use toward one destination, with per-packet energies."""

    configs: tuple[tuple[int, int], ...]
    tx_units: tuple[float, ...]
    rx_units: tuple[float, ...]
    feasible_count: int


@dataclass(frozen=True, slots=True)
class SearchTables:
    ring_count: int
    children_ratio: int
    max_payloads: int
    stations: tuple[int, ...]
    options: dict[tuple[int, int], HopOptions]
    max_joint_assignments: int

    @property
    def configs_pruned(self) -> int:
        return sum(o.feasible_count - len(o.configs) for o in self.options.values())


@dataclass(frozen=True, slots=True)
class _ChunkScan:
    best: float
    ties: tuple[tuple[int, float], ...]
    evaluated: int
    infeasible: int


def _feasible_pairs(
    tx: TransceiverModel, env: RadioEnvironment, distance: float
) -> list[tuple[int, int]]:
    return [
        (p.level, s.level)
        for p in tx.power_levels
        for s in tx.rate_levels
        if is_feasible(tx, env, p.level, s.level, distance)
    ]


def _cheapest_power(
    tx: TransceiverModel, env: RadioEnvironment, s: int, distance: float
) -> Optional[int]:
    feasible = [
        p for p in tx.power_levels if is_feasible(tx, env, p.level, s, distance)
    ]
    if not feasible:
        return None
    # lowest current; among equal currents the lowest output
    return min(feasible, key=lambda p: (p.current_ma, -p.level)).level


def _undominated(
    tx: TransceiverModel, pairs: Sequence[tuple[int, int]]
) -> list[tuple[int, int]]:
    scored = [
        (tx.power(p).current_ma / tx.rate(s).rate_bps, tx.rate(s).rate_bps)
        for p, s in pairs
    ]
    kept: list[tuple[int, int]] = []
    for i, (cost_a, rate_a) in enumerate(scored):
        dominated = False
        for j, (cost_b, rate_b) in enumerate(scored):
            if i == j or cost_b > cost_a or rate_b < rate_a:
                continue
            if cost_b < cost_a or rate_b > rate_a or j < i:
                dominated = True
                break
        if not dominated:
            kept.append(pairs[i])
    return kept


def _hop_configs(
    tx: TransceiverModel, env: RadioEnvironment, distance: float, exhaustive: bool
) -> tuple[list[tuple[int, int]], int]:
    feasible = _feasible_pairs(tx, env, distance)
    if exhaustive:
        return feasible, len(feasible)
    cheapest: list[tuple[int, int]] = []
    for rate in tx.rate_levels:
        p = _cheapest_power(tx, env, rate.level, distance)
        if p is not None:
            cheapest.append((p, rate.level))
    return _undominated(tx, cheapest), len(feasible)


def candidate_configs(
    r: int,
    delta: HopVector,
    tx: TransceiverModel,
    env: RadioEnvironment,
    net: RingNetwork,
    *,
    exhaustive: bool = False,
) -> list[tuple[int, int]]:
    """(power, rate) pairs worth trying for ring ``r``; empty when its hop cannot close."""
    distance = net.hop_distance(r, delta.destination(r))
    configs, _ = _hop_configs(tx, env, distance, exhaustive)
    return configs


def build_tables(problem: RoutingProblem) -> SearchTables:
    net, tx, env, packet = (
        problem.network,
        problem.transceiver,
        problem.environment,
        problem.packet,
    )
    options: dict[tuple[int, int], HopOptions] = {}
    for r in net.rings:
        for destination in range(r):
            distance = net.hop_distance(r, destination)
            configs, feasible_count = _hop_configs(tx, env, distance, problem.exhaustive)
            options[(r, destination)] = HopOptions(
                configs=tuple(configs),
                tx_units=tuple(tx_unit_energy(tx, env, packet, p, s) for p, s in configs),
                rx_units=tuple(rx_unit_energy(tx, env, packet, s) for _, s in configs),
                feasible_count=feasible_count,
            )
    return SearchTables(
        ring_count=net.ring_count,
        children_ratio=net.children_ratio,
        max_payloads=packet.max_payloads,
        stations=tuple(net.branch_count * net.children_ratio ** (r - 1) for r in net.rings),
        options=options,
        max_joint_assignments=problem.max_joint_assignments,
    )


def _hop_tree(
    delta: Sequence[int], children_ratio: int, max_payloads: int
) -> tuple[list[list[int]], list[int]]:
    """Children per ring (index 0 is the gateway) and packets per station."""
    size = len(delta)
    children: list[list[int]] = [[] for _ in range(size + 1)]
    for j in range(1, size + 1):
        children[j - delta[j - 1]].append(j)
    payloads = [0] * (size + 1)
    for r in range(size, 0, -1):
        payloads[r] = 1 + sum(
            children_ratio ** (j - r) * payloads[j] for j in children[r]
        )
    packets = [-(-n // max_payloads) for n in payloads]
    return children, packets


def _step_function(
    children: Sequence[tuple[Sequence[float], Sequence[float]]],
) -> list[tuple[float, float]]:
    """Breakpoints (t, S) where S is the least child-RX sum with every child subtree <= t."""
    events = sorted(
        (value, idx, load)
        for idx, (values, loads) in enumerate(children)
        for value, load in zip(values, loads)
    )
    best = [math.inf] * len(children)
    steps: list[tuple[float, float]] = []
    for value, idx, load in events:
        if load < best[idx]:
            best[idx] = load
        if math.isfinite(max(best)):
            steps.append((value, sum(best)))
    return steps


def _min_bottleneck(tables: SearchTables, delta: Sequence[int]) -> Optional[float]:
    size = tables.ring_count
    c = tables.children_ratio
    children, packets = _hop_tree(delta, c, tables.max_payloads)
    subtree: list[list[float]] = [[] for _ in range(size + 1)]
    for r in range(size, 0, -1):
        opts = tables.options[(r, r - delta[r - 1])]
        if not opts.configs:
            return None
        own = [packets[r] * unit for unit in opts.tx_units]
        if not children[r]:
            subtree[r] = own
            continue
        loads = []
        for j in children[r]:
            child_opts = tables.options[(j, r)]
            scale = c ** (j - r) * packets[j]
            loads.append((subtree[j], [scale * unit for unit in child_opts.rx_units]))
        steps = _step_function(loads)
        subtree[r] = [min(max(t, tx + s) for t, s in steps) for tx in own]
    return max(min(subtree[j]) for j in children[0])


def _pareto(
    items: Iterable[tuple[float, float, Assignment]],
) -> list[tuple[float, float, Assignment]]:
    """Keep items no other item beats on (load) and on (cost, assignment) together."""
    kept: list[tuple[float, float, Assignment]] = []
    best: Optional[tuple[float, Assignment]] = None
    for load, cost, assignment in sorted(items):
        if best is None or (cost, assignment) < best:
            kept.append((load, cost, assignment))
            best = (cost, assignment)
    return kept


def _least_network_energy(
    tables: SearchTables, delta: Sequence[int], threshold: float
) -> Optional[Assignment]:
    """Configuration minimising network energy with every station at or below ``threshold``."""
    size = tables.ring_count
    c = tables.children_ratio
    children, packets = _hop_tree(delta, c, tables.max_payloads)
    subtree: list[list[Optional[tuple[float, Assignment]]]] = [[] for _ in range(size + 1)]
    for r in range(size, 0, -1):
        destination = r - delta[r - 1]
        opts = tables.options[(r, destination)]
        menus = []
        for j in children[r]:
            child_opts = tables.options[(j, r)]
            scale = c ** (j - r) * packets[j]
            menu = _pareto(
                (scale * unit, entry[0], entry[1])
                for unit, entry in zip(child_opts.rx_units, subtree[j])
                if entry is not None
            )
            menus.append(menu)
        joint_size = math.prod(len(menu) for menu in menus)
        if joint_size > tables.max_joint_assignments:
            raise SearchGuardError(
                f"ring {r} would combine {joint_size:,} child assignments "
                f"(limit {tables.max_joint_assignments:,})"
            )
        joint = _pareto(
            (
                sum(part[0] for part in combo),
                sum(part[1] for part in combo),
                tuple(sorted(itertools.chain.from_iterable(part[2] for part in combo))),
            )
            for combo in itertools.product(*menus)
        )
        weight = tables.stations[r - 1] * packets[r]
        entries: list[Optional[tuple[float, Assignment]]] = []
        for (p, s), tx_unit, rx_unit in zip(opts.configs, opts.tx_units, opts.rx_units):
            budget = threshold - packets[r] * tx_unit
            fitting = [(cost, assignment) for load, cost, assignment in joint if load <= budget]
            if budget < 0 or not fitting:
                entries.append(None)
                continue
            cost, assignment = min(fitting)
            own = weight * (tx_unit + (rx_unit if destination else 0.0))
            entries.append(
                (own + cost, tuple(sorted(assignment + ((r, p, s),))))
            )
        subtree[r] = entries
    total: Assignment = ()
    for j in children[0]:
        feasible = [entry for entry in subtree[j] if entry is not None]
        if not feasible:
            return None
        total += min(feasible)[1]
    return tuple(sorted(total))


def _config_from(assignment: Assignment) -> ConfigVector:
    return ConfigVector.of((p, s) for _, p, s in sorted(assignment))


def _scan_chunk(tables: SearchTables, start: int, stop: int) -> _ChunkScan:
    best = math.inf
    scores: list[tuple[int, float]] = []
    infeasible = 0
    for index in range(start, stop):
        value = _min_bottleneck(tables, decode_hop_index(tables.ring_count, index))
        if value is None:
            infeasible += 1
            continue
        scores.append((index, value))
        best = min(best, value)
    ties = tuple(
        (index, value) for index, value in scores if value <= best * (1 + TIE_TOLERANCE)
    )
    logger.debug(
        "Chunk [%d, %d): best %.6g J, %d tie(s), %d infeasible",
        start,
        stop,
        best,
        len(ties),
        infeasible,
    )
    return _ChunkScan(best, ties, stop - start, infeasible)


def _settle(
    problem: RoutingProblem, delta: HopVector, config: ConfigVector
) -> EnergyReport:
    return energy_report(
        problem.network,
        delta,
        config,
        problem.packet,
        problem.transceiver,
        problem.environment,
    )


def _resolve_ties(
    problem: RoutingProblem,
    tables: SearchTables,
    indices: Sequence[int],
    threshold: float,
) -> Optional[tuple[float, tuple[int, ...], tuple[tuple[int, int], ...]]]:
    best = None
    for index in indices:
        values = decode_hop_index(tables.ring_count, index)
        assignment = _least_network_energy(tables, values, threshold)
        if assignment is None:
            continue
        config = _config_from(assignment)
        report = _settle(problem, HopVector(values), config)
        key = (report.e_n, values, config.entries)
        if best is None or key < best:
            best = key
    return best


def _chunk_bounds(total: int, workers: int) -> list[tuple[int, int]]:
    pieces = max(1, min(total, workers * CHUNKS_PER_WORKER))
    size = -(-total // pieces)
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def _split(items: list[int], parts: int) -> list[list[int]]:
    size = max(1, -(-len(items) // parts))
    return [items[start : start + size] for start in range(0, len(items), size)]


def _result(
    problem: RoutingProblem,
    model: RoutingModel,
    delta: HopVector,
    config: ConfigVector,
    stats: SearchStats,
) -> RoutingResult:
    return RoutingResult(
        model=model,
        delta_star=delta,
        config_star=config,
        report=_settle(problem, delta, config),
        slot_time_s=slot_time(problem.network, delta, problem.packet, problem.transceiver),
        stats=stats,
    )


def _best_for_vector(
    tables: SearchTables, delta: HopVector
) -> Optional[tuple[ConfigVector, float]]:
    value = _min_bottleneck(tables, delta.delta)
    if value is None:
        return None
    assignment = _least_network_energy(tables, delta.delta, value * (1 + TIE_TOLERANCE))
    if assignment is None:
        return None
    return _config_from(assignment), value


def best_configs_for_combo(
    delta: HopVector, problem: RoutingProblem
) -> Optional[tuple[ConfigVector, float]]:
    """Cheapest-bottleneck configuration for one hop vector; None if a hop cannot close."""
    if delta.ring_count != problem.ring_count:
        raise ValueError(
            f"hop vector covers {delta.ring_count} rings, network has {problem.ring_count}"
        )
    found = _best_for_vector(build_tables(problem), delta)
    if found is None:
        return None
    config, _ = found
    return config, _settle(problem, delta, config).e_bt


def baseline(model: RoutingModel, problem: RoutingProblem) -> RoutingResult:
    delta = model.fixed_vector(problem.ring_count)
    if delta is None:
        raise ValueError(f"{model.value} has no fixed hop vector")
    tables = build_tables(problem)
    found = _best_for_vector(tables, delta)
    if found is None:
        raise InfeasibleScenarioError(
            f"{model.value}: {problem.transceiver.name} cannot close every hop of {delta}"
        )
    config, _ = found
    logger.debug("%s: %s with %s", model.value, delta, config)
    stats = SearchStats(
        combos_evaluated=1, combos_infeasible=0, configs_pruned=tables.configs_pruned
    )
    return _result(problem, model, delta, config, stats)


def optimize(problem: RoutingProblem, *, threads: int = 1) -> RoutingResult:
    size = problem.ring_count
    check_combination_guard(size, problem.override_guards, problem.max_rings)
    tables = build_tables(problem)
    total = hop_combination_count(size)
    workers = max(1, threads)
    bounds = _chunk_bounds(total, workers)
    logger.info(
        "Searching %s hop combinations for R=%d, c=%d with %s (%d chunk(s), %d worker(s))",
        f"{total:,}",
        size,
        problem.network.children_ratio,
        problem.transceiver.name,
        len(bounds),
        workers,
    )
    starts = [start for start, _ in bounds]
    stops = [stop for _, stop in bounds]
    if workers == 1 or len(bounds) == 1:
        scans = [_scan_chunk(tables, start, stop) for start, stop in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            scans = list(pool.map(_scan_chunk, itertools.repeat(tables), starts, stops))

    best = min(scan.best for scan in scans)
    infeasible = sum(scan.infeasible for scan in scans)
    if not math.isfinite(best):
        raise InfeasibleScenarioError(
            f"{problem.transceiver.name}: no hop combination closes every link "
            f"(R={size}, D={problem.network.max_distance:.1f} m)"
        )
    threshold = best * (1 + TIE_TOLERANCE)
    tied = sorted(
        index for scan in scans for index, value in scan.ties if value <= threshold
    )
    groups = _split(tied, workers)
    if workers == 1 or len(groups) == 1:
        picks = [_resolve_ties(problem, tables, group, threshold) for group in groups]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            picks = list(
                pool.map(
                    _resolve_ties,
                    itertools.repeat(problem),
                    itertools.repeat(tables),
                    groups,
                    itertools.repeat(threshold),
                )
            )
    winners = [pick for pick in picks if pick is not None]
    if not winners:
        raise InfeasibleScenarioError("tied hop combinations could not be settled")
    _, values, entries = min(winners)
    delta = HopVector(values)
    stats = SearchStats(
        combos_evaluated=sum(scan.evaluated for scan in scans),
        combos_infeasible=infeasible,
        configs_pruned=tables.configs_pruned,
        tied_combos=len(tied),
    )
    result = _result(problem, RoutingModel.OPTIMAL_HOP, delta, ConfigVector(entries), stats)
    logger.info(
        "Optimal hop vector %s: e_bt %.4f mJ at ring %d "
        "(%d tied, %d infeasible, %d configs pruned)",
        delta,
        result.e_bt * 1e3,
        result.report.bottleneck_ring,
        len(tied),
        infeasible,
        tables.configs_pruned,
    )
    return result


def solve(
    problem: RoutingProblem, model: RoutingModel, *, threads: int = 1
) -> RoutingResult:
    if model is RoutingModel.OPTIMAL_HOP:
        return optimize(problem, threads=threads)
    return baseline(model, problem)


def improvement_ratios(problem: RoutingProblem, *, threads: int = 1) -> ImprovementRatios:
    return ImprovementRatios.from_results(
        baseline(RoutingModel.SINGLE_HOP, problem),
        baseline(RoutingModel.NEXT_RING_HOP, problem),
        optimize(problem, threads=threads),
    )
