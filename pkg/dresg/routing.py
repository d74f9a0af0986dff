from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .aggregation import MAX_ENUMERATED_RINGS, HopVector, PacketConfig
from .energy import ConfigVector, EnergyReport
from .models import DresgError
from .radio import DEFAULT_ENVIRONMENT, RadioEnvironment
from .topology import RingNetwork
from .transceivers import TransceiverModel

DEFAULT_MAX_JOINT_ASSIGNMENTS = 1_000_000


class RoutingModel(str, Enum):
    SINGLE_HOP = "single_hop"
    NEXT_RING_HOP = "next_ring_hop"
    OPTIMAL_HOP = "optimal_hop"

    def fixed_vector(self, ring_count: int) -> Optional[HopVector]:
        """The hop vector a baseline model imposes; None for the searched model."""
        if self is RoutingModel.SINGLE_HOP:
            return HopVector.single_hop(ring_count)
        if self is RoutingModel.NEXT_RING_HOP:
            return HopVector.next_ring_hop(ring_count)
        return None


@dataclass(frozen=True, slots=True)
class RoutingProblem:
    """Everything a search needs: structure, radio and packet settings, guards."""

    network: RingNetwork
    transceiver: TransceiverModel
    environment: RadioEnvironment = DEFAULT_ENVIRONMENT
    packet: PacketConfig = PacketConfig()
    exhaustive: bool = False
    override_guards: bool = False
    max_rings: int = MAX_ENUMERATED_RINGS
    max_joint_assignments: int = DEFAULT_MAX_JOINT_ASSIGNMENTS

    @property
    def ring_count(self) -> int:
        return self.network.ring_count


@dataclass(frozen=True, slots=True)
class SearchStats:
    combos_evaluated: int
    combos_infeasible: int
    configs_pruned: int
    tied_combos: int = 1


@dataclass(frozen=True, slots=True)
class RoutingResult:
    model: RoutingModel
    delta_star: HopVector
    config_star: ConfigVector
    report: EnergyReport
    slot_time_s: float
    stats: SearchStats

    @property
    def e_bt(self) -> float:
        return self.report.e_bt


@dataclass(frozen=True, slots=True)
class ImprovementRatios:
    rho_sh: float
    rho_nrh: float

    @classmethod
    def from_results(
        cls,
        single_hop: RoutingResult,
        next_ring_hop: RoutingResult,
        optimal_hop: RoutingResult,
    ) -> "ImprovementRatios":
        if optimal_hop.e_bt <= 0:
            raise DresgError("optimal-hop bottleneck energy is zero; ratios undefined")
        return cls(
            rho_sh=single_hop.e_bt / optimal_hop.e_bt,
            rho_nrh=next_ring_hop.e_bt / optimal_hop.e_bt,
        )
