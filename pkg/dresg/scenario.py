"""
Scenario resolution, runs, sweeps and bundle reloads.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

from .aggregation import MAX_ENUMERATED_RINGS, HopVector, PacketConfig
from .config import ScenarioFile, SweepFile
from .energy import ConfigVector, EnergyReport, RingEnergy
from .models import (
    DresgError,
    ScenarioParseError,
    ScenarioValidationError,
    SearchGuardError,
)
from .optimizer import solve
from .radio import RadioEnvironment, max_range
from .routing import (
    DEFAULT_MAX_JOINT_ASSIGNMENTS,
    ImprovementRatios,
    RoutingModel,
    RoutingProblem,
    RoutingResult,
    SearchStats,
)
from .topology import RingNetwork, build_network, stations_in_ring
from .transceivers import TransceiverCatalog, TransceiverModel

logger = logging.getLogger(__name__)

BUNDLE_FORMAT_VERSION = 1


@dataclass(frozen=True, slots=True)
class Scenario:
    scenario_id: str
    network: RingNetwork
    transceiver: TransceiverModel
    environment: RadioEnvironment
    packet: PacketConfig
    models: tuple[RoutingModel, ...]
    description: str = ""

    def without_aggregation(self) -> "Scenario":
        return replace(self, packet=replace(self.packet, aggregate=False))


@dataclass(frozen=True, slots=True)
class RunOptions:
    threads: int = 1
    exhaustive: bool = False
    override_guards: bool = False
    max_rings: int = MAX_ENUMERATED_RINGS
    max_joint_assignments: int = DEFAULT_MAX_JOINT_ASSIGNMENTS

    def problem(self, scenario: Scenario) -> RoutingProblem:
        return RoutingProblem(
            network=scenario.network,
            transceiver=scenario.transceiver,
            environment=scenario.environment,
            packet=scenario.packet,
            exhaustive=self.exhaustive,
            override_guards=self.override_guards,
            max_rings=self.max_rings,
            max_joint_assignments=self.max_joint_assignments,
        )


@dataclass(frozen=True, slots=True)
class ResultBundle:
    scenario_id: str
    transceiver: str
    ring_count: int
    children_ratio: int
    branch_count: int
    max_distance: float
    spreading: str
    aggregation: bool
    station_count: int
    stations: tuple[int, ...]
    results: tuple[RoutingResult, ...]
    ratios: Optional[ImprovementRatios] = None

    def result(self, model: RoutingModel) -> RoutingResult:
        for item in self.results:
            if item.model is model:
                return item
        raise KeyError(model.value)


@dataclass(frozen=True, slots=True)
class SweepRow:
    sweep_id: str
    variable: str
    value: int
    transceiver: str
    rho_sh: Optional[float] = None
    rho_nrh: Optional[float] = None
    e_bt_sh: Optional[float] = None
    e_bt_nrh: Optional[float] = None
    e_bt_oh: Optional[float] = None
    delta_oh: Optional[str] = None
    error: Optional[str] = None


@dataclass(slots=True)
class SweepTable:
    sweep_id: str
    variable: str
    rows: list[SweepRow] = field(default_factory=list)


def resolve_scenario(
    spec: ScenarioFile, catalog: Optional[TransceiverCatalog] = None
) -> Scenario:
    catalog = TransceiverCatalog() if catalog is None else catalog
    if spec.catalog:
        catalog = TransceiverCatalog(catalog.values())
        for entry in spec.catalog:
            catalog.register(entry.build())
    if isinstance(spec.transceiver, str):
        try:
            transceiver = catalog[spec.transceiver]
        except KeyError as exc:
            raise ScenarioValidationError(exc.args[0], field_path="transceiver") from None
    else:
        transceiver = spec.transceiver.build()
    environment = spec.environment.build()
    net_spec = spec.network
    distance = net_spec.max_distance
    if distance is None:
        distance = max_range(transceiver, environment)
        logger.debug(
            "%s: D = max range of %s = %.1f m",
            spec.scenario_id,
            transceiver.name,
            distance,
        )
    network = build_network(
        distance,
        net_spec.rings,
        net_spec.children_ratio,
        net_spec.branches,
        net_spec.spreading,
    )
    return Scenario(
        scenario_id=spec.scenario_id,
        network=network,
        transceiver=transceiver,
        environment=environment,
        packet=spec.packet.build(spec.aggregation),
        models=tuple(spec.models),
        description=spec.description,
    )


def load_scenario(path: Path, catalog: Optional[TransceiverCatalog] = None) -> Scenario:
    scenario = resolve_scenario(ScenarioFile.load(path), catalog)
    logger.info(
        "Loaded %s: R=%d c=%d B=%d N=%d D=%.1f m, %s",
        scenario.scenario_id,
        scenario.network.ring_count,
        scenario.network.children_ratio,
        scenario.network.branch_count,
        scenario.network.station_count,
        scenario.network.max_distance,
        scenario.transceiver.name,
    )
    return scenario


def run(scenario: Scenario, options: RunOptions = RunOptions()) -> ResultBundle:
    problem = options.problem(scenario)
    results = tuple(
        solve(problem, model, threads=options.threads) for model in scenario.models
    )
    by_model = {result.model: result for result in results}
    ratios = None
    if len(by_model) == len(RoutingModel):
        ratios = ImprovementRatios.from_results(
            by_model[RoutingModel.SINGLE_HOP],
            by_model[RoutingModel.NEXT_RING_HOP],
            by_model[RoutingModel.OPTIMAL_HOP],
        )
    net = scenario.network
    return ResultBundle(
        scenario_id=scenario.scenario_id,
        transceiver=scenario.transceiver.name,
        ring_count=net.ring_count,
        children_ratio=net.children_ratio,
        branch_count=net.branch_count,
        max_distance=net.max_distance,
        spreading=net.spreading.value,
        aggregation=scenario.packet.aggregate,
        station_count=net.station_count,
        stations=tuple(stations_in_ring(net, r) for r in net.rings),
        results=results,
        ratios=ratios,
    )


def _sweep_row(
    spec: SweepFile,
    value: int,
    transceiver: str,
    catalog: TransceiverCatalog,
    options: RunOptions,
    no_aggregation: bool,
) -> SweepRow:
    base = SweepRow(spec.sweep_id, spec.variable, value, transceiver)
    try:
        scenario = resolve_scenario(spec.point(value, transceiver), catalog)
        if no_aggregation:
            scenario = scenario.without_aggregation()
        scenario = replace(scenario, models=tuple(RoutingModel))
        bundle = run(scenario, options)
    except DresgError as exc:
        logger.warning(
            "%s %s=%d %s: %s", spec.sweep_id, spec.variable, value, transceiver, exc
        )
        return replace(base, error=str(exc))
    assert bundle.ratios is not None
    optimal = bundle.result(RoutingModel.OPTIMAL_HOP)
    return replace(
        base,
        rho_sh=bundle.ratios.rho_sh,
        rho_nrh=bundle.ratios.rho_nrh,
        e_bt_sh=bundle.result(RoutingModel.SINGLE_HOP).e_bt,
        e_bt_nrh=bundle.result(RoutingModel.NEXT_RING_HOP).e_bt,
        e_bt_oh=optimal.e_bt,
        delta_oh=optimal.delta_star.label(),
    )


def sweep(
    spec: SweepFile,
    catalog: Optional[TransceiverCatalog] = None,
    options: RunOptions = RunOptions(),
    *,
    no_aggregation: bool = False,
) -> SweepTable:
    """One row per (value, transceiver); failing points keep their error text."""
    catalog = TransceiverCatalog() if catalog is None else catalog
    if spec.catalog:
        catalog = TransceiverCatalog(catalog.values())
        for entry in spec.catalog:
            catalog.register(entry.build())
    too_large = spec.variable == "R" and spec.bounds[1] > options.max_rings
    if too_large and not options.override_guards:
        raise SearchGuardError(
            f"{spec.sweep_id}: R up to {spec.bounds[1]} exceeds the guard of "
            f"{options.max_rings} rings (pass --override-guards)"
        )
    table = SweepTable(spec.sweep_id, spec.variable)
    for value in spec.values:
        for transceiver in spec.transceivers:
            row = _sweep_row(
                spec, value, transceiver, catalog, options, no_aggregation
            )
            logger.info(
                "%s %s=%d %s: rho_SH=%s rho_NRH=%s",
                spec.sweep_id,
                spec.variable,
                value,
                transceiver,
                "-" if row.rho_sh is None else f"{row.rho_sh:.4g}",
                "-" if row.rho_nrh is None else f"{row.rho_nrh:.4g}",
            )
            table.rows.append(row)
    return table


# JSON bundles ---------------------------------------------------------------


def _ring_record(ring: RingEnergy) -> dict[str, Any]:
    return {
        "ring": ring.ring,
        "stations": ring.stations,
        "destination": ring.destination,
        "hop_distance_m": ring.hop_distance_m,
        "link_margin_db": ring.link_margin_db,
        "power_level": ring.power_level,
        "rate_level": ring.rate_level,
        "payloads": ring.payloads,
        "packets": ring.packets,
        "e_tx_j": ring.e_tx,
        "e_rx_j": ring.e_rx,
    }


def result_record(result: RoutingResult) -> dict[str, Any]:
    report = result.report
    return {
        "model": result.model.value,
        "delta": list(result.delta_star.delta),
        "config": [list(entry) for entry in result.config_star.entries],
        "e_bt_j": report.e_bt,
        "bottleneck_ring": report.bottleneck_ring,
        "e_n_j": report.e_n,
        "slot_time_s": result.slot_time_s,
        "stats": {
            "combos_evaluated": result.stats.combos_evaluated,
            "combos_infeasible": result.stats.combos_infeasible,
            "configs_pruned": result.stats.configs_pruned,
            "tied_combos": result.stats.tied_combos,
        },
        "rings": [_ring_record(ring) for ring in report.rings],
    }


def bundle_record(bundle: ResultBundle) -> dict[str, Any]:
    return {
        "format_version": BUNDLE_FORMAT_VERSION,
        "scenario_id": bundle.scenario_id,
        "transceiver": bundle.transceiver,
        "network": {
            "R": bundle.ring_count,
            "c": bundle.children_ratio,
            "B": bundle.branch_count,
            "D": bundle.max_distance,
            "spreading": bundle.spreading,
            "N": bundle.station_count,
            "stations": list(bundle.stations),
        },
        "aggregation": bundle.aggregation,
        "results": [result_record(result) for result in bundle.results],
        "ratios": None
        if bundle.ratios is None
        else {"rho_sh": bundle.ratios.rho_sh, "rho_nrh": bundle.ratios.rho_nrh},
    }


def _result_from(record: dict[str, Any]) -> RoutingResult:
    rings = tuple(
        RingEnergy(
            ring=item["ring"],
            stations=item["stations"],
            destination=item["destination"],
            hop_distance_m=item["hop_distance_m"],
            link_margin_db=item["link_margin_db"],
            power_level=item["power_level"],
            rate_level=item["rate_level"],
            payloads=item["payloads"],
            packets=item["packets"],
            e_tx=item["e_tx_j"],
            e_rx=item["e_rx_j"],
        )
        for item in record["rings"]
    )
    return RoutingResult(
        model=RoutingModel(record["model"]),
        delta_star=HopVector.of(record["delta"]),
        config_star=ConfigVector.of(tuple(entry) for entry in record["config"]),
        report=EnergyReport(
            rings=rings,
            e_bt=record["e_bt_j"],
            bottleneck_ring=record["bottleneck_ring"],
            e_n=record["e_n_j"],
        ),
        slot_time_s=record["slot_time_s"],
        stats=SearchStats(**record["stats"]),
    )


def bundle_from_record(record: dict[str, Any]) -> ResultBundle:
    try:
        network = record["network"]
        ratios = record.get("ratios")
        return ResultBundle(
            scenario_id=record["scenario_id"],
            transceiver=record["transceiver"],
            ring_count=network["R"],
            children_ratio=network["c"],
            branch_count=network["B"],
            max_distance=network["D"],
            spreading=network["spreading"],
            aggregation=record["aggregation"],
            station_count=network["N"],
            stations=tuple(network["stations"]),
            results=tuple(_result_from(item) for item in record["results"]),
            ratios=None
            if ratios is None
            else ImprovementRatios(rho_sh=ratios["rho_sh"], rho_nrh=ratios["rho_nrh"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioValidationError(f"malformed bundle: {exc!r}") from exc


def load_bundle(path: Path) -> ResultBundle:
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(record, dict):
        raise ScenarioParseError(f"{path}: expected a JSON object")
    return bundle_from_record(record)
