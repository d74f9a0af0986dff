from __future__ import annotations

import json
from typing import Optional, Sequence

from ..app import DresgApp
from ..models import ScenarioValidationError
from ..radio import DEFAULT_ENVIRONMENT, max_range
from ..transceivers import TransceiverModel, validate_transceiver
from .output import ok, warning


def _table(model: TransceiverModel) -> list[str]:
    lines = [f"  {'level':>5}  {'P_tx dBm':>9}  {'I_tx mA':>8}"]
    for p in model.power_levels:
        lines.append(f"  {p.level:>5}  {p.output_dbm:>9.1f}  {p.current_ma:>8.1f}")
    lines.append(f"  {'level':>5}  {'rate kbps':>9}  {'S dBm':>8}")
    for s in model.rate_levels:
        lines.append(
            f"  {s.level:>5}  {s.rate_bps / 1000:>9.3f}  {s.sensitivity_dbm:>8.1f}"
        )
    lines.append(f"  I_rx = {model.rx_current_ma:g} mA")
    return lines


def run(
    app: DresgApp, names: Sequence[str] = (), *, fmt: Optional[str] = None
) -> list[str]:
    try:
        models = [app.catalog[name] for name in names] or list(app.catalog.values())
    except KeyError as exc:
        raise ScenarioValidationError(exc.args[0], field_path="catalog") from None
    if fmt == "json":
        text = json.dumps([model.to_record() for model in models], indent=2)
        print(text)
        return [text]
    lines: list[str] = []
    for model in models:
        anomalies = validate_transceiver(model)
        detail = (
            f"{len(model.power_levels)} power levels, {len(model.rate_levels)} rates, "
            f"range {max_range(model, DEFAULT_ENVIRONMENT):.1f} m"
        )
        if anomalies:
            lines.append(warning(model.name, f"{detail}; {'; '.join(anomalies)}"))
        else:
            lines.append(ok(model.name, detail))
        lines.extend(_table(model))
    for line in lines:
        print(line)
    return lines
