"""
Per-ring energy accounting.

Only transmission and reception are charged by default; idle, sleep and
microprocessor terms stay available through :func:`state_energy`. Currents are
stored in mA and converted at this boundary; energies are joules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .aggregation import (
    ConnectivityMatrix,
    HopVector,
    PacketConfig,
    connectivity_matrix,
    direct_child_rings,
    packets_tx,
    payload_vector,
)
from .models import InfeasibleConfigError, ScenarioValidationError
from .radio import RadioEnvironment, is_feasible, link_margin
from .topology import RingNetwork, stations_in_ring
from .transceivers import TransceiverModel

MILLI = 1e-3


@dataclass(frozen=True, slots=True)
class ConfigVector:
    """(power level, rate level) per ring, ring 1 first."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ScenarioValidationError("configuration vector is empty")

    @classmethod
    def of(cls, entries: Iterable[tuple[int, int]]) -> "ConfigVector":
        return cls(tuple((int(p), int(s)) for p, s in entries))

    @classmethod
    def checked(
        cls,
        entries: Iterable[tuple[int, int]],
        net: RingNetwork,
        delta: HopVector,
        tx: TransceiverModel,
        env: RadioEnvironment,
    ) -> "ConfigVector":
        config = cls.of(entries)
        config.check_feasible(net, delta, tx, env)
        return config

    @property
    def ring_count(self) -> int:
        return len(self.entries)

    def power(self, r: int) -> int:
        return self.entries[r - 1][0]

    def rate(self, r: int) -> int:
        return self.entries[r - 1][1]

    def check_feasible(
        self,
        net: RingNetwork,
        delta: HopVector,
        tx: TransceiverModel,
        env: RadioEnvironment,
    ) -> None:
        if self.ring_count != net.ring_count or delta.ring_count != net.ring_count:
            raise ScenarioValidationError(
                f"configuration covers {self.ring_count} rings, hop vector "
                f"{delta.ring_count}, network {net.ring_count}"
            )
        for r in net.rings:
            _check_ring_feasible(net, r, delta, self, tx, env)

    def __str__(self) -> str:
        return " ".join(f"{p}/{s}" for p, s in self.entries)


@dataclass(frozen=True, slots=True)
class RingEnergy:
    ring: int
    stations: int
    destination: int
    hop_distance_m: float
    link_margin_db: float
    power_level: int
    rate_level: int
    payloads: int
    packets: int
    e_tx: float
    e_rx: float

    @property
    def e(self) -> float:
        return self.e_tx + self.e_rx


@dataclass(frozen=True, slots=True)
class EnergyReport:
    rings: tuple[RingEnergy, ...]
    e_bt: float
    bottleneck_ring: int
    e_n: float

    def ring(self, r: int) -> RingEnergy:
        return self.rings[r - 1]


@dataclass(frozen=True, slots=True)
class StatePowerProfile:
    """Time spent and current drawn per radio/MCU state, for a single station."""

    voltage_v: float
    t_lpm: float = 0.0
    t_cpu: float = 0.0
    t_sleep: float = 0.0
    t_idle: float = 0.0
    t_rx: float = 0.0
    t_tx: tuple[float, ...] = field(default_factory=tuple)
    i_lpm_ma: float = 0.0
    i_cpu_ma: float = 0.0
    i_sleep_ma: float = 0.0
    i_idle_ma: float = 0.0
    i_rx_ma: float = 0.0
    i_tx_ma: tuple[float, ...] = field(default_factory=tuple)


def state_energy(profile: StatePowerProfile) -> float:
    """Processing energy plus transceiver energy over every state, in joules."""
    scalars = (
        profile.voltage_v,
        profile.t_lpm,
        profile.t_cpu,
        profile.t_sleep,
        profile.t_idle,
        profile.t_rx,
        profile.i_lpm_ma,
        profile.i_cpu_ma,
        profile.i_sleep_ma,
        profile.i_idle_ma,
        profile.i_rx_ma,
    )
    if any(v < 0 for v in (*scalars, *profile.t_tx, *profile.i_tx_ma)):
        raise ValueError("state profile times, currents and voltage must be >= 0")
    if len(profile.t_tx) != len(profile.i_tx_ma):
        raise ValueError(
            f"{len(profile.t_tx)} TX times given for {len(profile.i_tx_ma)} TX currents"
        )
    processing = profile.t_lpm * profile.i_lpm_ma + profile.t_cpu * profile.i_cpu_ma
    transceiver = (
        profile.t_sleep * profile.i_sleep_ma
        + profile.t_idle * profile.i_idle_ma
        + profile.t_rx * profile.i_rx_ma
        + sum(t * i for t, i in zip(profile.t_tx, profile.i_tx_ma))
    )
    return (processing + transceiver) * MILLI * profile.voltage_v


def packet_airtime(packet: PacketConfig, rate_bps: float) -> float:
    return packet.packet_bits / rate_bps


def tx_unit_energy(
    tx: TransceiverModel, env: RadioEnvironment, packet: PacketConfig, p: int, s: int
) -> float:
    """Energy to transmit one packet at power level ``p`` and rate level ``s``."""
    return (
        packet_airtime(packet, tx.rate(s).rate_bps)
        * tx.power(p).current_ma
        * MILLI
        * env.nominal_voltage_v
    )


def rx_unit_energy(
    tx: TransceiverModel, env: RadioEnvironment, packet: PacketConfig, s: int
) -> float:
    """Energy to receive one packet sent at rate level ``s``."""
    return (
        packet_airtime(packet, tx.rate(s).rate_bps)
        * tx.rx_current_ma
        * MILLI
        * env.nominal_voltage_v
    )


def ring_packets(
    net: RingNetwork, lam: ConnectivityMatrix, packet: PacketConfig
) -> tuple[int, ...]:
    return tuple(
        packets_tx(n, packet.max_payloads)
        for n in payload_vector(lam, net.children_ratio)
    )


def _check_ring_feasible(
    net: RingNetwork,
    r: int,
    delta: HopVector,
    config: ConfigVector,
    tx: TransceiverModel,
    env: RadioEnvironment,
) -> None:
    distance = net.hop_distance(r, delta.destination(r))
    p, s = config.entries[r - 1]
    if not is_feasible(tx, env, p, s, distance):
        raise InfeasibleConfigError(
            f"ring {r}: {tx.name} power {p}/rate {s} cannot reach ring "
            f"{delta.destination(r)} over {distance:.1f} m"
        )


def tx_energy(
    net: RingNetwork,
    r: int,
    delta: HopVector,
    lam: ConnectivityMatrix,
    config: ConfigVector,
    packet: PacketConfig,
    tx: TransceiverModel,
    env: RadioEnvironment,
    *,
    packets: Optional[tuple[int, ...]] = None,
) -> float:
    _check_ring_feasible(net, r, delta, config, tx, env)
    if packets is None:
        packets = ring_packets(net, lam, packet)
    p, s = config.entries[r - 1]
    return packets[r - 1] * tx_unit_energy(tx, env, packet, p, s)


def rx_energy(
    net: RingNetwork,
    r: int,
    delta: HopVector,
    lam: ConnectivityMatrix,
    config: ConfigVector,
    packet: PacketConfig,
    tx: TransceiverModel,
    env: RadioEnvironment,
    *,
    packets: Optional[tuple[int, ...]] = None,
) -> float:
    """Energy one station of ring ``r`` spends receiving from its direct children."""
    if packets is None:
        packets = ring_packets(net, lam, packet)
    total = 0.0
    for child, per_parent in direct_child_rings(delta, r, net.children_ratio):
        total += (
            per_parent
            * packets[child - 1]
            * rx_unit_energy(tx, env, packet, config.rate(child))
        )
    return total


def energy_report(
    net: RingNetwork,
    delta: HopVector,
    config: ConfigVector,
    packet: PacketConfig,
    tx: TransceiverModel,
    env: RadioEnvironment,
) -> EnergyReport:
    config.check_feasible(net, delta, tx, env)
    lam = connectivity_matrix(delta)
    payloads = payload_vector(lam, net.children_ratio)
    packets = tuple(packets_tx(n, packet.max_payloads) for n in payloads)
    rings: list[RingEnergy] = []
    for r in net.rings:
        destination = delta.destination(r)
        distance = net.hop_distance(r, destination)
        p, s = config.entries[r - 1]
        rings.append(
            RingEnergy(
                ring=r,
                stations=stations_in_ring(net, r),
                destination=destination,
                hop_distance_m=distance,
                link_margin_db=link_margin(tx, env, p, s, distance),
                power_level=p,
                rate_level=s,
                payloads=payloads[r - 1],
                packets=packets[r - 1],
                e_tx=tx_energy(
                    net, r, delta, lam, config, packet, tx, env, packets=packets
                ),
                e_rx=rx_energy(
                    net, r, delta, lam, config, packet, tx, env, packets=packets
                ),
            )
        )
    bottleneck = max(rings, key=lambda item: (item.e, -item.ring))
    e_n = sum(item.stations * item.e for item in rings)
    return EnergyReport(
        rings=tuple(rings),
        e_bt=bottleneck.e,
        bottleneck_ring=bottleneck.ring,
        e_n=e_n,
    )


def slot_time(
    net: RingNetwork, delta: HopVector, packet: PacketConfig, tx: TransceiverModel
) -> float:
    """Worst-case TDMA slot: the busiest ring sending every packet at the slowest rate."""
    packets = ring_packets(net, connectivity_matrix(delta), packet)
    return max(packets) * packet_airtime(packet, tx.slowest_rate.rate_bps)
