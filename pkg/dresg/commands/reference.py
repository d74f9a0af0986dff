"""
Optimal configurations for the two single-branch reference networks.

Both use the CC1200 at its maximum range with seven equidistant rings; the
first has three children per station, the second two. For every ring the
table lists power/rate level, hop length and payloads (packets) under
single-hop, optimal-hop without aggregation and optimal-hop.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional

from ..app import DresgApp
from ..config import ScenarioFile
from ..routing import RoutingModel, RoutingResult
from ..scenario import resolve_scenario, run as run_scenario

logger = logging.getLogger(__name__)

REFERENCE_NETWORKS = (
    {"id": "scenario_1_1", "R": 7, "c": 3},
    {"id": "scenario_1_2", "R": 7, "c": 2},
)


@dataclass(frozen=True, slots=True)
class ReferenceColumn:
    title: str
    result: RoutingResult


@dataclass(frozen=True, slots=True)
class ReferenceBlock:
    scenario_id: str
    header: str
    columns: tuple[ReferenceColumn, ...]

    def lines(self) -> list[str]:
        width = 26
        out = [self.header]
        out.append("ring  " + "".join(f"{col.title:<{width}}" for col in self.columns))
        for r in range(1, self.columns[0].result.delta_star.ring_count + 1):
            cells = []
            for col in self.columns:
                ring = col.result.report.ring(r)
                cell = (
                    f"{ring.power_level}/{ring.rate_level} "
                    f"d={col.result.delta_star.hop(r)} "
                    f"{ring.payloads} ({ring.packets})"
                )
                cells.append(f"{cell:<{width}}")
            out.append(f"{r:<6}" + "".join(cells))
        out.append(
            "e_bt  "
            + "".join(f"{col.result.e_bt * 1e3:<{width}.4f}" for col in self.columns)
        )
        return out


def build_blocks(app: DresgApp, *, threads: Optional[int] = None) -> list[ReferenceBlock]:
    options = app.run_options(threads=threads)
    blocks: list[ReferenceBlock] = []
    for network in REFERENCE_NETWORKS:
        logger.info("Reproducing %s", network["id"])
        spec = ScenarioFile.model_validate({**network, "transceiver": "CC1200"})
        scenario = resolve_scenario(spec, app.catalog)
        aggregated = run_scenario(
            replace(
                scenario, models=(RoutingModel.SINGLE_HOP, RoutingModel.OPTIMAL_HOP)
            ),
            options,
        )
        plain = run_scenario(
            replace(scenario.without_aggregation(), models=(RoutingModel.OPTIMAL_HOP,)),
            options,
        )
        net = scenario.network
        levels = (
            f"{len(scenario.transceiver.power_levels)} power / "
            f"{len(scenario.transceiver.rate_levels)} rate levels"
        )
        blocks.append(
            ReferenceBlock(
                scenario_id=scenario.scenario_id,
                header=(
                    f"{scenario.scenario_id}: R={net.ring_count} c={net.children_ratio} "
                    f"N={net.station_count} D={net.max_distance:.1f} m "
                    f"{scenario.transceiver.name} ({levels})"
                ),
                columns=(
                    ReferenceColumn(
                        "single-hop", aggregated.result(RoutingModel.SINGLE_HOP)
                    ),
                    ReferenceColumn(
                        "optimal-hop, no agg.", plain.result(RoutingModel.OPTIMAL_HOP)
                    ),
                    ReferenceColumn(
                        "optimal-hop", aggregated.result(RoutingModel.OPTIMAL_HOP)
                    ),
                ),
            )
        )
    return blocks


def run(app: DresgApp, *, threads: Optional[int] = None) -> list[ReferenceBlock]:
    blocks = build_blocks(app, threads=threads)
    for block in blocks:
        for line in block.lines():
            print(line)
        print()
    return blocks
