"""
Transceiver catalogs.

Power levels follow datasheet numbering: level 1 is the maximum output power.
Rate levels start at the fastest rate. The four built-in models carry the
published output power, current, rate and sensitivity tables unchanged.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

from pydantic import BaseModel, Field, ValidationError

from .models import InvalidLevelError, ScenarioParseError, ScenarioValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class PowerLevel:
    level: int
    output_dbm: float
    current_ma: float


@dataclass(frozen=True, slots=True)
class RateLevel:
    level: int
    rate_bps: float
    sensitivity_dbm: float


@dataclass(frozen=True, slots=True)
class TransceiverModel:
    name: str
    power_levels: tuple[PowerLevel, ...]
    rate_levels: tuple[RateLevel, ...]
    rx_current_ma: float

    def power(self, p: int) -> PowerLevel:
        if not 1 <= p <= len(self.power_levels):
            raise InvalidLevelError(
                f"{self.name}: power level {p} outside 1..{len(self.power_levels)}"
            )
        return self.power_levels[p - 1]

    def rate(self, s: int) -> RateLevel:
        if not 1 <= s <= len(self.rate_levels):
            raise InvalidLevelError(
                f"{self.name}: rate level {s} outside 1..{len(self.rate_levels)}"
            )
        return self.rate_levels[s - 1]

    @property
    def slowest_rate(self) -> RateLevel:
        return min(self.rate_levels, key=lambda lvl: (lvl.rate_bps, lvl.sensitivity_dbm))

    def to_record(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "power_levels": [
                {"level": p.level, "output_dbm": p.output_dbm, "current_ma": p.current_ma}
                for p in self.power_levels
            ],
            "rate_levels": [
                {
                    "level": s.level,
                    "rate_bps": s.rate_bps,
                    "sensitivity_dbm": s.sensitivity_dbm,
                }
                for s in self.rate_levels
            ],
            "rx_current_ma": self.rx_current_ma,
        }


class PowerLevelSpec(BaseModel):
    level: int = Field(ge=1)
    output_dbm: float
    current_ma: float = Field(ge=0)


class RateLevelSpec(BaseModel):
    level: int = Field(ge=1)
    rate_bps: float = Field(gt=0)
    sensitivity_dbm: float


class TransceiverSpec(BaseModel):
    """JSON schema of a transceiver catalog entry."""

    name: str
    power_levels: list[PowerLevelSpec] = Field(min_length=1)
    rate_levels: list[RateLevelSpec] = Field(min_length=1)
    rx_current_ma: float = Field(ge=0)

    def build(self) -> TransceiverModel:
        model = TransceiverModel(
            name=self.name,
            power_levels=tuple(
                PowerLevel(p.level, p.output_dbm, p.current_ma)
                for p in sorted(self.power_levels, key=lambda p: p.level)
            ),
            rate_levels=tuple(
                RateLevel(s.level, s.rate_bps, s.sensitivity_dbm)
                for s in sorted(self.rate_levels, key=lambda s: s.level)
            ),
            rx_current_ma=self.rx_current_ma,
        )
        validate_transceiver(model)
        return model


def validate_transceiver(model: TransceiverModel) -> list[str]:
    """Check ordering invariants; return non-fatal anomalies (also logged)."""
    for idx, p in enumerate(model.power_levels, start=1):
        if p.level != idx:
            raise ScenarioValidationError(
                f"power levels must be numbered 1..n, found {p.level} at position {idx}",
                field_path=f"{model.name}.power_levels",
            )
    for idx, s in enumerate(model.rate_levels, start=1):
        if s.level != idx:
            raise ScenarioValidationError(
                f"rate levels must be numbered 1..n, found {s.level} at position {idx}",
                field_path=f"{model.name}.rate_levels",
            )
    for prev, cur in zip(model.power_levels, model.power_levels[1:]):
        if cur.output_dbm > prev.output_dbm:
            raise ScenarioValidationError(
                f"output power must not increase with level ({prev.level} -> {cur.level})",
                field_path=f"{model.name}.power_levels",
            )
    for prev, cur in zip(model.rate_levels, model.rate_levels[1:]):
        if cur.sensitivity_dbm > prev.sensitivity_dbm:
            raise ScenarioValidationError(
                f"sensitivity must not rise with level ({prev.level} -> {cur.level})",
                field_path=f"{model.name}.rate_levels",
            )
    anomalies: list[str] = []
    for prev, cur in zip(model.rate_levels, model.rate_levels[1:]):
        if cur.rate_bps >= prev.rate_bps:
            anomalies.append(
                f"{model.name}: rate level {cur.level} ({cur.rate_bps:g} bps) is not "
                f"slower than level {prev.level} ({prev.rate_bps:g} bps)"
            )
    for message in anomalies:
        logger.warning(message)
    return anomalies


def _model(
    name: str,
    powers: Iterable[tuple[float, float]],
    rates: Iterable[tuple[float, float]],
    rx_current_ma: float,
) -> TransceiverModel:
    return TransceiverModel(
        name=name,
        power_levels=tuple(
            PowerLevel(idx, dbm, ma) for idx, (dbm, ma) in enumerate(powers, start=1)
        ),
        rate_levels=tuple(
            RateLevel(idx, kbps * 1000.0, dbm)
            for idx, (kbps, dbm) in enumerate(rates, start=1)
        ),
        rx_current_ma=rx_current_ma,
    )


CC1100 = _model(
    "CC1100",
    powers=[
        (10.0, 31.1),
        (7.0, 25.8),
        (5.0, 20.0),
        (0.0, 16.9),
        (-5.0, 14.1),
        (-10.0, 14.5),
        (-15.0, 13.0),
        (-20.0, 12.4),
        (-30.0, 11.9),
    ],
    rates=[(500, -88), (250, -93), (38.4, -103), (1.2, -110)],
    rx_current_ma=14.4,
)

CC1200 = _model(
    "CC1200",
    powers=[
        (14.0, 45.0),
        (12.0, 42.0),
        (10.0, 34.0),
        (9.0, 33.5),
        (7.5, 31.0),
        (5.0, 29.0),
        (4.0, 27.0),
        (2.0, 26.0),
        (0.0, 25.0),
        (-1.5, 24.0),
        (-3.0, 23.0),
        (-5.0, 22.5),
        (-6.5, 22.0),
        (-8.0, 21.7),
        (-10.0, 21.5),
        (-11.5, 21.0),
    ],
    rates=[
        (1000, -97),
        (500, -97),
        (100, -107),
        (50, -109),
        (38.4, -110),
        (4.8, -113),
        (1.2, -122),
    ],
    rx_current_ma=19.0,
)

SI4644 = _model(
    "Si4644",
    powers=[(20.0, 85.0), (16.0, 43.0), (14.0, 37.0), (13.0, 29.0), (10.0, 18.0)],
    rates=[
        (1000, -88),
        (500, -97),
        (125, -105),
        (100, -106),
        (40, -110),
        (0.5, -126),
    ],
    rx_current_ma=10.7,
)

# Rate level 3 is published as 3.750 kbps, slower than level 4.
SX1272 = _model(
    "SX1272",
    powers=[(20.0, 125.0), (17.0, 90.0), (13.0, 28.0), (7.0, 18.0)],
    rates=[
        (250, -97),
        (38.4, -110),
        (3.750, -116),
        (18.75, -119),
        (9.380, -122),
        (1.172, -131),
        (0.586, -134),
        (0.293, -137),
    ],
    rx_current_ma=10.5,
)

BUILTIN_TRANSCEIVERS: tuple[TransceiverModel, ...] = (CC1100, CC1200, SI4644, SX1272)


class TransceiverCatalog(Mapping[str, TransceiverModel]):
    """Name-indexed registry; lookups are case-insensitive."""

    def __init__(self, models: Iterable[TransceiverModel] = BUILTIN_TRANSCEIVERS) -> None:
        self._models: dict[str, TransceiverModel] = {}
        for model in models:
            self.register(model)

    def register(self, model: TransceiverModel) -> None:
        key = model.name.lower()
        if key in self._models and self._models[key] != model:
            logger.info("Replacing transceiver %s with a new definition", model.name)
        self._models[key] = model

    def load_file(self, path: Path) -> list[TransceiverModel]:
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ScenarioParseError(f"cannot read catalog {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ScenarioParseError(f"invalid JSON in catalog {path}: {exc}") from exc
        entries = raw if isinstance(raw, list) else [raw]
        loaded: list[TransceiverModel] = []
        for idx, entry in enumerate(entries):
            try:
                spec = TransceiverSpec.model_validate(entry)
            except ValidationError as exc:
                first = exc.errors()[0]
                loc = ".".join(str(part) for part in first["loc"])
                raise ScenarioValidationError(
                    first["msg"], field_path=f"{path.name}[{idx}].{loc}"
                ) from exc
            model = spec.build()
            self.register(model)
            loaded.append(model)
        logger.debug("Loaded %d transceiver(s) from %s", len(loaded), path)
        return loaded

    def __getitem__(self, name: str) -> TransceiverModel:
        try:
            return self._models[name.lower()]
        except KeyError:
            known = ", ".join(sorted(m.name for m in self._models.values()))
            raise KeyError(f"unknown transceiver {name!r} (known: {known})") from None

    def __iter__(self) -> Iterator[str]:
        return iter(model.name for model in self._models.values())

    def __len__(self) -> int:
        return len(self._models)
