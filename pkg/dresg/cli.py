from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .app import DresgApp
from .commands import catalog as cmd_catalog
from .commands import optimize as cmd_optimize
from .commands import sweep as cmd_sweep
from .commands import reference as cmd_reference
from .config import Settings, find_config
from .models import DresgError

LOG_FORMAT = "%(levelname).1s | %(name)s | %(message)s"

C_RESET = "\033[0m"
LEVEL_COLORS = {
    logging.DEBUG: "\033[36m",  # Cyan
    logging.INFO: "\033[37m",  # Light gray
    logging.WARNING: "\033[33m",  # Yellow
    logging.ERROR: "\033[31m",  # Red
    logging.CRITICAL: "\033[35m",  # Magenta
}


class ShortPathFormatter(logging.Formatter):
    def __init__(self, fmt: str, roots: list[Path]) -> None:
        super().__init__(fmt)
        self.roots = [str(root) for root in roots if root]

    def _shorten(self, message: str) -> str:
        for root in self.roots:
            if not message:
                break
            message = message.replace(f"{root}/", "")
        return message

    def format(self, record: logging.LogRecord) -> str:
        return self._shorten(super().format(record))


class ColorFormatter(ShortPathFormatter):
    def format(self, record: logging.LogRecord) -> str:
        message = super().format(record)
        color = LEVEL_COLORS.get(record.levelno)
        if not color or not sys.stderr.isatty():
            return message
        return f"{color}{message}{C_RESET}"


class WarningBufferHandler(logging.Handler):
    def __init__(self) -> None:
        super().__init__(level=logging.WARNING)
        self.records: list[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        try:
            msg = self.format(record)
        except Exception:  # pragma: no cover
            msg = record.getMessage()
        self.records.append(msg)


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {number}")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Energy model and optimal-hop routing for ring-structured LPWANs"
    )
    parser.add_argument("--config", type=Path, help="Path to config.yaml")
    parser.add_argument("--log-level", default="INFO", help="Python logging level")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument(
        "--format", choices=("csv", "json"), default=None, help="Output format"
    )
    search.add_argument(
        "--out", type=Path, default=None, help="Write output here instead of stdout"
    )
    search.add_argument(
        "--no-aggregation",
        action="store_true",
        help="One payload per packet (n_p^max = 1)",
    )
    search.add_argument(
        "--exhaustive",
        action="store_true",
        help="Try every feasible power x rate pair instead of the undominated ones",
    )
    search.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="Worker processes for the hop search (default: config or DRESG_THREADS)",
    )
    search.add_argument(
        "--override-guards",
        action="store_true",
        help="Allow searches beyond the configured ring guard",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)
    optimize_parser = subparsers.add_parser(
        "optimize", parents=[search], help="Run every routing model of a scenario file"
    )
    optimize_parser.add_argument("scenario", type=Path, help="Scenario JSON/YAML file")
    sweep_parser = subparsers.add_parser(
        "sweep", parents=[search], help="Vary R or c over a range and compare models"
    )
    sweep_parser.add_argument("spec", type=Path, help="Sweep JSON/YAML file")
    catalog_parser = subparsers.add_parser(
        "catalog", help="Print the registered transceiver tables"
    )
    catalog_parser.add_argument("names", nargs="*", help="Transceivers to show")
    catalog_parser.add_argument("--json", action="store_true", help="Emit JSON")
    reference_parser = subparsers.add_parser(
        "table8", help="Reproduce the optimal configurations of the reference networks"
    )
    reference_parser.add_argument("--threads", type=_positive_int, default=None)
    return parser


def _configure_logging(
    level_name: str, warning_log: Optional[Path]
) -> WarningBufferHandler:
    log_level = getattr(logging, level_name.upper(), logging.INFO)
    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.setLevel(log_level)

    display_roots = [Path.cwd()]

    color_handler = logging.StreamHandler(sys.stderr)
    color_handler.setFormatter(ColorFormatter(LOG_FORMAT, display_roots))
    root_logger.addHandler(color_handler)

    warn_buffer = WarningBufferHandler()
    warn_buffer.setFormatter(ShortPathFormatter(LOG_FORMAT, display_roots))
    root_logger.addHandler(warn_buffer)

    if warning_log is not None:
        file_handler = logging.FileHandler(warning_log, mode="w", encoding="utf-8")
        file_handler.setLevel(logging.WARNING)
        file_handler.setFormatter(ShortPathFormatter(LOG_FORMAT, display_roots))
        root_logger.addHandler(file_handler)
    return warn_buffer


def main(argv: Optional[Sequence[str]] = None) -> None:
    parser = build_parser()
    args = parser.parse_args(argv)
    logger = logging.getLogger("dresg")

    warn_buffer = _configure_logging(args.log_level, None)
    try:
        settings = Settings.load(find_config(args.config))
        if settings.logging.warning_log is not None:
            warn_buffer = _configure_logging(args.log_level, settings.logging.warning_log)
        app = DresgApp.create(settings)
        match args.command:
            case "optimize":
                cmd_optimize.run(
                    app,
                    args.scenario,
                    fmt=args.format,
                    out=args.out,
                    no_aggregation=args.no_aggregation,
                    exhaustive=args.exhaustive,
                    threads=args.threads,
                    override_guards=args.override_guards,
                )
            case "sweep":
                cmd_sweep.run(
                    app,
                    args.spec,
                    fmt=args.format,
                    out=args.out,
                    no_aggregation=args.no_aggregation,
                    exhaustive=args.exhaustive,
                    threads=args.threads,
                    override_guards=args.override_guards,
                )
            case "catalog":
                cmd_catalog.run(app, args.names, fmt="json" if args.json else None)
            case "table8":
                cmd_reference.run(app, threads=args.threads)
            case _:
                parser.error("Unknown command")
    except DresgError as exc:
        logger.error("%s", exc)
        raise SystemExit(exc.exit_code) from None
    finally:
        if warn_buffer.records:
            print("\n\033[33mWarnings/Errors summary:\033[0m", file=sys.stderr)
            for line in warn_buffer.records:
                print(f" - {line}", file=sys.stderr)
