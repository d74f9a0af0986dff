"""
Ring network structures.

Stations sit on R concentric distance rings around the gateway (ring 0).
Every station outside the last ring has ``c`` tree children in the next ring,
and ``B`` identical branches hang off the gateway.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .models import ScenarioValidationError


class Spreading(str, Enum):
    EQUIDISTANT = "equidistant"
    FIBONACCI = "fibonacci"
    REVERSE_FIBONACCI = "reverse_fibonacci"


def fibonacci(n: int) -> int:
    """Return F_n with F_1 = F_2 = 1 (and F_0 = 0)."""
    if n < 0:
        raise ValueError(f"Fibonacci index must be >= 0, got {n}")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def _fibonacci_distance(r: int, ring_count: int, max_distance: float) -> float:
    if r == 0:
        return 0.0
    if r == ring_count:
        return max_distance
    return fibonacci(r + 1) * max_distance / fibonacci(ring_count + 1)


def ring_distance(
    spreading: Spreading, r: int, ring_count: int, max_distance: float
) -> float:
    if ring_count < 1:
        raise ScenarioValidationError(f"ring count must be >= 1, got {ring_count}")
    if not 1 <= r <= ring_count:
        raise ScenarioValidationError(f"ring {r} outside 1..{ring_count}")
    if max_distance <= 0:
        raise ScenarioValidationError(f"max distance must be > 0, got {max_distance}")
    if r == ring_count:
        return float(max_distance)
    spreading = Spreading(spreading)
    if spreading is Spreading.EQUIDISTANT:
        return r * (max_distance / ring_count)
    if spreading is Spreading.FIBONACCI:
        return _fibonacci_distance(r, ring_count, max_distance)
    # Reverse Fibonacci: the Fibonacci gaps, outermost first.
    distance = 0.0
    for k in range(1, r + 1):
        distance += _fibonacci_distance(
            ring_count - k + 1, ring_count, max_distance
        ) - _fibonacci_distance(ring_count - k, ring_count, max_distance)
    return distance


@dataclass(frozen=True, slots=True)
class RingNetwork:
    max_distance: float
    ring_count: int
    children_ratio: int
    branch_count: int
    spreading: Spreading
    distances: tuple[float, ...]

    @property
    def branch_load(self) -> int:
        return sum(self.children_ratio ** (r - 1) for r in self.rings)

    @property
    def station_count(self) -> int:
        return self.branch_count * self.branch_load

    @property
    def rings(self) -> range:
        return range(1, self.ring_count + 1)

    def distance(self, r: int) -> float:
        """Distance of ring ``r`` to the gateway; ring 0 is the gateway itself."""
        if r == 0:
            return 0.0
        self._check_ring(r)
        return self.distances[r - 1]

    def hop_distance(self, r: int, destination: int) -> float:
        """Radial distance between ring ``r`` and a lower ring (or the gateway)."""
        if not 0 <= destination < r:
            raise ScenarioValidationError(
                f"ring {r} cannot transmit to ring {destination}"
            )
        return self.distance(r) - self.distance(destination)

    def _check_ring(self, r: int) -> None:
        if not 1 <= r <= self.ring_count:
            raise ScenarioValidationError(f"ring {r} outside 1..{self.ring_count}")


def build_network(
    max_distance: float,
    ring_count: int,
    children_ratio: int,
    branch_count: int = 1,
    spreading: Spreading = Spreading.EQUIDISTANT,
) -> RingNetwork:
    if max_distance <= 0:
        raise ScenarioValidationError(
            f"must be > 0, got {max_distance}", field_path="max_distance"
        )
    for name, value in (
        ("ring_count", ring_count),
        ("children_ratio", children_ratio),
        ("branch_count", branch_count),
    ):
        if int(value) != value or value < 1:
            raise ScenarioValidationError(
                f"must be an integer >= 1, got {value}", field_path=name
            )
    spreading = Spreading(spreading)
    distances = tuple(
        ring_distance(spreading, r, ring_count, max_distance)
        for r in range(1, ring_count + 1)
    )
    return RingNetwork(
        max_distance=float(max_distance),
        ring_count=int(ring_count),
        children_ratio=int(children_ratio),
        branch_count=int(branch_count),
        spreading=spreading,
        distances=distances,
    )


def stations_in_ring(net: RingNetwork, r: int) -> int:
    net._check_ring(r)
    return net.branch_count * net.children_ratio ** (r - 1)
