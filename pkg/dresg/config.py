from __future__ import annotations

import os
from pathlib import Path
from typing import Any, List, Literal, Optional

import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from .aggregation import MAX_ENUMERATED_RINGS, PacketConfig
from .models import ScenarioParseError, ScenarioValidationError
from .radio import RadioEnvironment
from .routing import DEFAULT_MAX_JOINT_ASSIGNMENTS, RoutingModel
from .topology import Spreading
from .transceivers import TransceiverSpec

THREADS_ENV = "DRESG_THREADS"


class SearchSettings(BaseModel):
    threads: int = Field(default=1, ge=1)
    max_rings: int = Field(default=MAX_ENUMERATED_RINGS, ge=1)
    max_joint_assignments: int = Field(default=DEFAULT_MAX_JOINT_ASSIGNMENTS, ge=1)
    exhaustive: bool = False


class CatalogSettings(BaseModel):
    files: List[Path] = Field(default_factory=list)

    @field_validator("files", mode="before")
    @classmethod
    def _expand_files(cls, values: Optional[List[str]]) -> List[Path]:
        return [Path(v).expanduser().resolve() for v in values or []]


class OutputSettings(BaseModel):
    format: Literal["csv", "json"] = "csv"
    significant_digits: int = Field(default=6, ge=1, le=17)


class LoggingSettings(BaseModel):
    warning_log: Optional[Path] = None

    @field_validator("warning_log", mode="before")
    @classmethod
    def _expand_log(cls, value: Optional[str | Path]) -> Optional[Path]:
        if value is None:
            return None
        return Path(value).expanduser().resolve()


class Settings(BaseModel):
    search: SearchSettings = SearchSettings()
    catalog: CatalogSettings = CatalogSettings()
    output: OutputSettings = OutputSettings()
    logging: LoggingSettings = LoggingSettings()

    @classmethod
    def load(cls, path: Optional[Path]) -> "Settings":
        """Read ``config.yaml`` (None gives the defaults); ``DRESG_THREADS`` wins."""
        raw: Any = {}
        if path is not None:
            raw = _read_yaml(path) or {}
        settings = _validate(cls, raw, path)
        env_threads = os.environ.get(THREADS_ENV)
        if env_threads:
            try:
                threads = int(env_threads)
            except ValueError:
                raise ScenarioValidationError(
                    f"expected an integer, got {env_threads!r}", field_path=THREADS_ENV
                ) from None
            if threads < 1:
                raise ScenarioValidationError(
                    f"must be >= 1, got {threads}", field_path=THREADS_ENV
                )
            settings.search.threads = threads
        return settings


def find_config(explicit_path: Optional[Path]) -> Optional[Path]:
    if explicit_path:
        return explicit_path
    cwd = Path.cwd()
    for candidate in (cwd / "config.yaml", cwd / "config.yml"):
        if candidate.exists():
            return candidate
    return None


def _read_yaml(path: Path) -> Any:
    try:
        with path.open("r", encoding="utf-8") as fh:
            return yaml.safe_load(fh)
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ScenarioParseError(f"cannot parse {path}: {exc}") from exc


def _validate(model: type[BaseModel], raw: Any, path: Optional[Path]) -> Any:
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"]) or None
        where = f"{path.name}: " if path is not None else ""
        raise ScenarioValidationError(f"{where}{first['msg']}", field_path=loc) from exc


# Scenario and sweep files ---------------------------------------------------

_FLAT_NETWORK_KEYS = ("R", "c", "B", "D", "spreading")


class NetworkSpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    rings: int = Field(alias="R", ge=1)
    children_ratio: int = Field(alias="c", ge=1)
    branches: int = Field(default=1, alias="B", ge=1)
    max_distance: Optional[float] = Field(default=None, alias="D", gt=0)
    spreading: Spreading = Spreading.EQUIDISTANT


class EnvironmentSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    carrier_frequency_hz: float = Field(default=868e6, gt=0)
    tx_antenna_gain_dbi: float = 0.0
    rx_antenna_gain_dbi: float = 3.0
    nominal_voltage_v: float = Field(default=3.0, gt=0)

    def build(self) -> RadioEnvironment:
        return RadioEnvironment(
            carrier_frequency_hz=self.carrier_frequency_hz,
            tx_antenna_gain_dbi=self.tx_antenna_gain_dbi,
            rx_antenna_gain_dbi=self.rx_antenna_gain_dbi,
            nominal_voltage_v=self.nominal_voltage_v,
        )


class PacketSpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    payload_bytes: int = Field(default=15, alias="L_d", ge=1)
    header_bytes: int = Field(default=2, alias="L_h", ge=0)
    packet_bytes: int = Field(default=65, alias="L_DP", ge=1)

    @model_validator(mode="after")
    def _fits(self) -> "PacketSpec":
        if self.packet_bytes < self.header_bytes + self.payload_bytes:
            raise ValueError(
                f"packet_bytes {self.packet_bytes} < header_bytes {self.header_bytes}"
                f" + payload_bytes {self.payload_bytes}"
            )
        return self

    def build(self, aggregate: bool) -> PacketConfig:
        return PacketConfig(
            payload_bytes=self.payload_bytes,
            header_bytes=self.header_bytes,
            packet_bytes=self.packet_bytes,
            aggregate=aggregate,
        )


def _lift_flat_network(data: Any) -> Any:
    if not isinstance(data, dict):
        return data
    flat = {key: data[key] for key in _FLAT_NETWORK_KEYS if key in data}
    if not flat:
        return data
    data = {key: value for key, value in data.items() if key not in flat}
    network = dict(data.get("network") or {})
    network.update(flat)
    data["network"] = network
    return data


class ScenarioFile(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    scenario_id: str = Field(default="scenario", alias="id")
    description: str = ""
    network: NetworkSpec
    transceiver: str | TransceiverSpec
    catalog: List[TransceiverSpec] = Field(default_factory=list)
    environment: EnvironmentSpec = EnvironmentSpec()
    packet: PacketSpec = PacketSpec()
    aggregation: bool = True
    models: List[RoutingModel] = Field(default_factory=lambda: list(RoutingModel))

    @model_validator(mode="before")
    @classmethod
    def _lift_flat_keys(cls, data: Any) -> Any:
        return _lift_flat_network(data)

    @field_validator("models")
    @classmethod
    def _unique_models(cls, values: List[RoutingModel]) -> List[RoutingModel]:
        if not values:
            raise ValueError("at least one routing model is required")
        return list(dict.fromkeys(values))

    @classmethod
    def load(cls, path: Path) -> "ScenarioFile":
        raw = _read_yaml(path)
        if not isinstance(raw, dict):
            raise ScenarioParseError(f"{path}: expected a mapping at the top level")
        return _validate(cls, raw, path)


class SweepFile(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    sweep_id: str = Field(default="sweep", alias="id")
    description: str = ""
    variable: Literal["R", "c"]
    bounds: tuple[int, int] = Field(alias="range")
    transceivers: List[str] = Field(min_length=1)
    catalog: List[TransceiverSpec] = Field(default_factory=list)
    template: dict[str, Any] = Field(default_factory=dict)

    @field_validator("bounds")
    @classmethod
    def _ordered(cls, value: tuple[int, int]) -> tuple[int, int]:
        low, high = value
        if low < 1 or high < low:
            raise ValueError(f"range must satisfy 1 <= start <= stop, got {list(value)}")
        return value

    @property
    def values(self) -> range:
        return range(self.bounds[0], self.bounds[1] + 1)

    def point(self, value: int, transceiver: str) -> ScenarioFile:
        """Scenario for one grid point: the template with the swept variable and transceiver set."""
        raw = _lift_flat_network(dict(self.template))
        network = dict(raw.get("network") or {})
        network.pop("rings" if self.variable == "R" else "children_ratio", None)
        network[self.variable] = value
        raw["network"] = network
        raw["transceiver"] = transceiver
        raw.pop("scenario_id", None)
        raw["id"] = f"{self.sweep_id}-{self.variable}{value}-{transceiver}"
        return _validate(ScenarioFile, raw, None)

    @classmethod
    def load(cls, path: Path) -> "SweepFile":
        raw = _read_yaml(path)
        if not isinstance(raw, dict):
            raise ScenarioParseError(f"{path}: expected a mapping at the top level")
        spec = _validate(cls, raw, path)
        # fail early on a broken template rather than on every row
        spec.point(spec.bounds[0], spec.transceivers[0])
        return spec
