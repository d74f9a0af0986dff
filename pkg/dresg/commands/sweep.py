from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from ..app import DresgApp
from ..config import SweepFile
from ..scenario import SweepTable, sweep as run_sweep
from .output import emit

logger = logging.getLogger(__name__)


def run(
    app: DresgApp,
    spec_path: Path,
    *,
    fmt: Optional[str] = None,
    out: Optional[Path] = None,
    no_aggregation: bool = False,
    exhaustive: bool = False,
    threads: Optional[int] = None,
    override_guards: bool = False,
) -> SweepTable:
    spec = SweepFile.load(spec_path)
    options = app.run_options(
        threads=threads, exhaustive=exhaustive, override_guards=override_guards
    )
    table = run_sweep(spec, app.catalog, options, no_aggregation=no_aggregation)
    failed = sum(1 for row in table.rows if row.error)
    if failed:
        logger.warning("%s: %d of %d row(s) failed", spec.sweep_id, failed, len(table.rows))
    emit(table, app.output_format(fmt), out, digits=app.digits)
    if out is not None:
        logger.info("Wrote %s", out)
    return table
