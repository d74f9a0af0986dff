from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from ..app import DresgApp
from ..scenario import ResultBundle, load_scenario, run as run_scenario
from .output import emit

logger = logging.getLogger(__name__)


def run(
    app: DresgApp,
    scenario_path: Path,
    *,
    fmt: Optional[str] = None,
    out: Optional[Path] = None,
    no_aggregation: bool = False,
    exhaustive: bool = False,
    threads: Optional[int] = None,
    override_guards: bool = False,
) -> ResultBundle:
    scenario = load_scenario(scenario_path, app.catalog)
    if no_aggregation:
        scenario = scenario.without_aggregation()
    options = app.run_options(
        threads=threads, exhaustive=exhaustive, override_guards=override_guards
    )
    bundle = run_scenario(scenario, options)
    if bundle.ratios is not None:
        logger.info(
            "%s: rho_SH = %.4f, rho_NRH = %.4f",
            bundle.scenario_id,
            bundle.ratios.rho_sh,
            bundle.ratios.rho_nrh,
        )
    emit(bundle, app.output_format(fmt), out, digits=app.digits)
    if out is not None:
        logger.info("Wrote %s", out)
    return bundle
