from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from .config import Settings
from .scenario import RunOptions
from .transceivers import TransceiverCatalog

logger = logging.getLogger(__name__)


@dataclass
class DresgApp:
    settings: Settings
    catalog: TransceiverCatalog

    @classmethod
    def create(cls, settings: Settings) -> "DresgApp":
        catalog = TransceiverCatalog()
        for path in settings.catalog.files:
            loaded = catalog.load_file(path)
            logger.info(
                "Registered %s from %s", ", ".join(m.name for m in loaded), path
            )
        return cls(settings=settings, catalog=catalog)

    def run_options(
        self,
        *,
        threads: Optional[int] = None,
        exhaustive: bool = False,
        override_guards: bool = False,
    ) -> RunOptions:
        search = self.settings.search
        return RunOptions(
            threads=threads if threads is not None else search.threads,
            exhaustive=exhaustive or search.exhaustive,
            override_guards=override_guards,
            max_rings=search.max_rings,
            max_joint_assignments=search.max_joint_assignments,
        )

    def output_format(self, requested: Optional[str]) -> str:
        return requested or self.settings.output.format

    @property
    def digits(self) -> int:
        return self.settings.output.significant_digits
