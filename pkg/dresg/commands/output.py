from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from ..models import OutputError
from ..scenario import ResultBundle, SweepTable, bundle_record

BUNDLE_COLUMNS = (
    "scenario_id",
    "model",
    "ring",
    "delta",
    "power_level",
    "rate_level",
    "n_p",
    "n_dp_tx",
    "e_tx_mJ",
    "e_rx_mJ",
    "e_mJ",
    "e_bt_mJ",
    "e_N_mJ",
)

SWEEP_COLUMNS = (
    "sweep_id",
    "variable",
    "value",
    "transceiver",
    "rho_SH",
    "rho_NRH",
    "e_bt_SH_mJ",
    "e_bt_NRH_mJ",
    "e_bt_OH_mJ",
    "delta_OH",
    "error",
)

SUMMARY_RING = "summary"


@dataclass(frozen=True, slots=True)
class CheckLine:
    label: str
    status: str
    detail: Optional[str] = None

    def render(self) -> str:
        if self.detail:
            return f"{self.label}: {self.status} ({self.detail})"
        return f"{self.label}: {self.status}"


def ok(label: str, detail: Optional[str] = None) -> str:
    return CheckLine(label, "OK", detail).render()


def warning(label: str, detail: Optional[str] = None) -> str:
    return CheckLine(label, "WARNING", detail).render()


def number(value: Optional[float], digits: int = 6) -> str:
    if value is None:
        return ""
    return f"{value:.{digits}g}"


def millijoules(value: Optional[float], digits: int = 6) -> str:
    return number(None if value is None else value * 1e3, digits)


def bundle_rows(bundle: ResultBundle, digits: int = 6) -> list[list[str]]:
    rows: list[list[str]] = []
    for result in bundle.results:
        model = result.model.value
        for ring in result.report.rings:
            rows.append(
                [
                    bundle.scenario_id,
                    model,
                    str(ring.ring),
                    str(result.delta_star.hop(ring.ring)),
                    str(ring.power_level),
                    str(ring.rate_level),
                    str(ring.payloads),
                    str(ring.packets),
                    millijoules(ring.e_tx, digits),
                    millijoules(ring.e_rx, digits),
                    millijoules(ring.e, digits),
                    "",
                    "",
                ]
            )
        rows.append(
            [
                bundle.scenario_id,
                model,
                SUMMARY_RING,
                result.delta_star.label(),
                "",
                "",
                "",
                "",
                "",
                "",
                "",
                millijoules(result.report.e_bt, digits),
                millijoules(result.report.e_n, digits),
            ]
        )
    return rows


def sweep_rows(table: SweepTable, digits: int = 6) -> list[list[str]]:
    return [
        [
            row.sweep_id,
            row.variable,
            str(row.value),
            row.transceiver,
            number(row.rho_sh, digits),
            number(row.rho_nrh, digits),
            millijoules(row.e_bt_sh, digits),
            millijoules(row.e_bt_nrh, digits),
            millijoules(row.e_bt_oh, digits),
            row.delta_oh or "",
            row.error or "",
        ]
        for row in table.rows
    ]


def render_csv(columns: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def sweep_record(table: SweepTable) -> dict[str, object]:
    return {
        "sweep_id": table.sweep_id,
        "variable": table.variable,
        "rows": [
            {
                "value": row.value,
                "transceiver": row.transceiver,
                "rho_sh": row.rho_sh,
                "rho_nrh": row.rho_nrh,
                "e_bt_sh_j": row.e_bt_sh,
                "e_bt_nrh_j": row.e_bt_nrh,
                "e_bt_oh_j": row.e_bt_oh,
                "delta_oh": row.delta_oh,
                "error": row.error,
            }
            for row in table.rows
        ],
    }


def render(
    item: ResultBundle | SweepTable | Sequence[ResultBundle],
    fmt: str,
    digits: int = 6,
) -> str:
    bundles: Sequence[ResultBundle] = ()
    if isinstance(item, ResultBundle):
        bundles = (item,)
    elif not isinstance(item, SweepTable):
        bundles = item
    if fmt == "json":
        if isinstance(item, SweepTable):
            payload: object = sweep_record(item)
        elif isinstance(item, ResultBundle):
            payload = bundle_record(item)
        else:
            payload = [bundle_record(bundle) for bundle in bundles]
        return json.dumps(payload, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown output format {fmt!r}")
    if isinstance(item, SweepTable):
        return render_csv(SWEEP_COLUMNS, sweep_rows(item, digits))
    rows = [row for bundle in bundles for row in bundle_rows(bundle, digits)]
    return render_csv(BUNDLE_COLUMNS, rows)


def emit(
    item: ResultBundle | SweepTable | Sequence[ResultBundle],
    fmt: str = "csv",
    path: Optional[Path] = None,
    *,
    digits: int = 6,
) -> str:
    """Write ``item`` as CSV or JSON to ``path`` (stdout when None) and return the text."""
    text = render(item, fmt, digits)
    if path is None:
        sys.stdout.write(text)
        return text
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return text
