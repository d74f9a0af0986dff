"""
Hop vectors, connectivity matrices and per-station payload accounting.

Ring ``r`` transmits to ring ``r - delta[r]`` (0 is the gateway). A station
aggregates its own payload with everything its topology children send, and
packs up to ``n_p^max`` payloads per fixed-size packet, padding the last one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .models import ScenarioValidationError, SearchGuardError

MAX_ENUMERATED_RINGS = 10


@dataclass(frozen=True, slots=True)
class HopVector:
    delta: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.delta:
            raise ScenarioValidationError("hop vector must cover at least one ring")
        for r, hop in enumerate(self.delta, start=1):
            if not 1 <= hop <= r:
                raise ScenarioValidationError(
                    f"hop length {hop} for ring {r} outside 1..{r}", field_path="delta"
                )

    @classmethod
    def of(cls, values: Sequence[int]) -> "HopVector":
        return cls(tuple(int(v) for v in values))

    @classmethod
    def single_hop(cls, ring_count: int) -> "HopVector":
        return cls(tuple(range(1, ring_count + 1)))

    @classmethod
    def next_ring_hop(cls, ring_count: int) -> "HopVector":
        return cls((1,) * ring_count)

    @property
    def ring_count(self) -> int:
        return len(self.delta)

    def hop(self, r: int) -> int:
        return self.delta[r - 1]

    def destination(self, r: int) -> int:
        return r - self.delta[r - 1]

    def label(self) -> str:
        return "-".join(str(v) for v in self.delta)

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.delta) + ")"


@dataclass(frozen=True, slots=True)
class ConnectivityMatrix:
    """R x R 0/1 matrix; entry (r, i) marks ring-i payloads aggregated in ring r (1-based)."""

    matrix: np.ndarray

    @property
    def ring_count(self) -> int:
        return int(self.matrix.shape[0])

    def entry(self, r: int, i: int) -> int:
        return int(self.matrix[r - 1, i - 1])

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.matrix]


@dataclass(frozen=True, slots=True)
class PacketConfig:
    payload_bytes: int = 15
    header_bytes: int = 2
    packet_bytes: int = 65
    aggregate: bool = True

    def __post_init__(self) -> None:
        if self.payload_bytes < 1 or self.header_bytes < 0:
            raise ScenarioValidationError(
                "payload must be >= 1 byte and header >= 0 bytes", field_path="packet"
            )
        if self.packet_bytes < self.header_bytes + self.payload_bytes:
            raise ScenarioValidationError(
                f"packet size {self.packet_bytes} B cannot hold a "
                f"{self.header_bytes} B header and a {self.payload_bytes} B payload",
                field_path="packet.packet_bytes",
            )

    @property
    def packet_bits(self) -> int:
        return self.packet_bytes * 8

    @property
    def max_payloads(self) -> int:
        if not self.aggregate:
            return 1
        return (self.packet_bytes - self.header_bytes) // self.payload_bytes


def hop_combination_count(ring_count: int) -> int:
    return math.factorial(ring_count)


def check_combination_guard(
    ring_count: int, override: bool = False, max_rings: int = MAX_ENUMERATED_RINGS
) -> None:
    if ring_count < 1:
        raise ScenarioValidationError(f"ring count must be >= 1, got {ring_count}")
    if ring_count > max_rings and not override:
        raise SearchGuardError(
            f"R={ring_count} means {hop_combination_count(ring_count):,} hop "
            f"combinations; the guard stops at R={max_rings} (pass --override-guards)"
        )


def enumerate_hop_combinations(
    ring_count: int,
    *,
    override: bool = False,
    max_rings: int = MAX_ENUMERATED_RINGS,
) -> Iterator[HopVector]:
    """Yield all R! hop vectors in lexicographic order, last ring varying fastest."""
    check_combination_guard(ring_count, override, max_rings)
    choices = [range(1, r + 1) for r in range(1, ring_count + 1)]
    for combo in itertools.product(*choices):
        yield HopVector(combo)


def decode_hop_index(ring_count: int, index: int) -> tuple[int, ...]:
    """Mixed-radix decode of a position in the lexicographic hop order."""
    values = [0] * ring_count
    for r in range(ring_count, 0, -1):
        index, digit = divmod(index, r)
        values[r - 1] = digit + 1
    return tuple(values)


def connectivity_matrix(delta: HopVector) -> ConnectivityMatrix:
    size = delta.ring_count
    matrix = np.zeros((size, size), dtype=np.int8)
    for origin in range(1, size + 1):
        ring = origin
        while ring > 0:
            matrix[ring - 1, origin - 1] = 1
            ring = delta.destination(ring)
    matrix.setflags(write=False)
    return ConnectivityMatrix(matrix)


def _descendant_weights(size: int, children_ratio: int) -> np.ndarray:
    # weights[r, i] = c^(i - r) on and above the diagonal
    offsets = np.arange(size)[None, :] - np.arange(size)[:, None]
    weights = np.where(
        offsets >= 0,
        np.power(np.int64(children_ratio), np.clip(offsets, 0, None), dtype=np.int64),
        0,
    )
    return weights


def payloads_aggregated(lam: ConnectivityMatrix, children_ratio: int, r: int) -> int:
    """Payloads one station of ring ``r`` sends: its own plus all routed through it."""
    size = lam.ring_count
    if not 1 <= r <= size:
        raise ScenarioValidationError(f"ring {r} outside 1..{size}")
    row = lam.matrix[r - 1, r - 1 :].astype(np.int64)
    weights = np.power(np.int64(children_ratio), np.arange(size - r + 1, dtype=np.int64))
    return int(np.dot(row, weights))


def payload_vector(lam: ConnectivityMatrix, children_ratio: int) -> tuple[int, ...]:
    weights = _descendant_weights(lam.ring_count, children_ratio)
    totals = (lam.matrix.astype(np.int64) * weights).sum(axis=1)
    return tuple(int(v) for v in totals)


def packets_tx(payloads: int, max_payloads: int) -> int:
    if max_payloads < 1:
        raise ValueError(f"max payloads per packet must be >= 1, got {max_payloads}")
    if payloads < 0:
        raise ValueError(f"payload count must be >= 0, got {payloads}")
    return -(-payloads // max_payloads)


def direct_child_rings(
    delta: HopVector, r: int, children_ratio: int
) -> list[tuple[int, int]]:
    """Rings transmitting straight to ring ``r``, with their per-parent station count."""
    if not 0 <= r <= delta.ring_count:
        raise ScenarioValidationError(f"ring {r} outside 0..{delta.ring_count}")
    return [
        (j, children_ratio ** (j - r))
        for j in range(r + 1, delta.ring_count + 1)
        if delta.destination(j) == r
    ]
