from __future__ import annotations

from typing import Optional


class DresgError(Exception):
    """Base class for errors the CLI reports with a dedicated exit code."""

    exit_code = 1


class ScenarioParseError(DresgError):
    """Raised when a scenario or sweep file cannot be parsed at all."""

    exit_code = 2


class ScenarioValidationError(DresgError):
    exit_code = 3

    def __init__(self, message: str, field_path: Optional[str] = None) -> None:
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)


class SearchGuardError(DresgError):
    """Raised when a search would exceed a configured size guard."""

    exit_code = 3


class OutputError(DresgError):
    exit_code = 4


class InfeasibleScenarioError(DresgError):
    """Raised when no hop vector admits a feasible set of configurations."""

    exit_code = 5


class InvalidLevelError(DresgError, ValueError):
    exit_code = 3


class InfeasibleConfigError(DresgError, ValueError):
    """Raised when a (power, rate) pair cannot close the link of its ring."""

    exit_code = 5
