from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .models import ScenarioValidationError
from .transceivers import TransceiverModel

# Links closing within this many dB of the sensitivity count as feasible, so a
# ring placed exactly at the computed coverage range stays reachable.
LINK_MARGIN_TOLERANCE_DB = 1e-9


@dataclass(frozen=True, slots=True)
class RadioEnvironment:
    """Carrier, antenna gains, supply voltage and the outdoor pico-zone path-loss constants."""

    carrier_frequency_hz: float = 868e6
    tx_antenna_gain_dbi: float = 0.0
    rx_antenna_gain_dbi: float = 3.0
    nominal_voltage_v: float = 3.0
    path_loss_intercept_db: float = 23.3
    path_loss_distance_slope: float = 37.6
    path_loss_frequency_slope: float = 21.0
    path_loss_reference_hz: float = 900e6

    def __post_init__(self) -> None:
        if self.carrier_frequency_hz <= 0:
            raise ScenarioValidationError(
                f"must be > 0, got {self.carrier_frequency_hz}",
                field_path="environment.carrier_frequency_hz",
            )
        if self.nominal_voltage_v <= 0:
            raise ScenarioValidationError(
                f"must be > 0, got {self.nominal_voltage_v}",
                field_path="environment.nominal_voltage_v",
            )

    @property
    def antenna_gain_db(self) -> float:
        return self.tx_antenna_gain_dbi + self.rx_antenna_gain_dbi

    def frequency_term_db(self, f: Optional[float] = None) -> float:
        f = self.carrier_frequency_hz if f is None else f
        return self.path_loss_frequency_slope * math.log10(f / self.path_loss_reference_hz)


DEFAULT_ENVIRONMENT = RadioEnvironment()


def path_loss(
    d: float, f: float, env: RadioEnvironment = DEFAULT_ENVIRONMENT
) -> float:
    if d <= 0:
        raise ValueError(f"distance must be > 0, got {d}")
    return (
        env.path_loss_intercept_db
        + env.path_loss_distance_slope * math.log10(d)
        + env.frequency_term_db(f)
    )


def link_margin(
    tx: TransceiverModel, env: RadioEnvironment, p: int, s: int, d: float
) -> float:
    """Received power minus sensitivity, in dB."""
    received = (
        tx.power(p).output_dbm
        + env.antenna_gain_db
        - path_loss(d, env.carrier_frequency_hz, env)
    )
    return received - tx.rate(s).sensitivity_dbm


def is_feasible(
    tx: TransceiverModel, env: RadioEnvironment, p: int, s: int, d: float
) -> bool:
    return link_margin(tx, env, p, s, d) >= -LINK_MARGIN_TOLERANCE_DB


def min_power_for(
    tx: TransceiverModel, env: RadioEnvironment, s: int, d: float
) -> Optional[int]:
    """Highest power level index (lowest output) that still closes the link."""
    required = (
        tx.rate(s).sensitivity_dbm
        + path_loss(d, env.carrier_frequency_hz, env)
        - env.antenna_gain_db
    )
    best: Optional[int] = None
    for level in tx.power_levels:
        if level.output_dbm - required >= -LINK_MARGIN_TOLERANCE_DB:
            best = level.level
    return best


def max_range(tx: TransceiverModel, env: RadioEnvironment = DEFAULT_ENVIRONMENT) -> float:
    """Distance at which maximum power and the slowest rate exactly meet the sensitivity."""
    budget = (
        tx.power(1).output_dbm + env.antenna_gain_db - tx.slowest_rate.sensitivity_dbm
    )
    exponent = (
        budget - env.path_loss_intercept_db - env.frequency_term_db()
    ) / env.path_loss_distance_slope
    return 10.0**exponent
