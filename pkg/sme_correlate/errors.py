"""
Exception hierarchy shared by the services and the command-line layer.

Services raise these; the CLI converts them into structured error records
and process exit codes.
"""

from __future__ import annotations

from typing import Any


class SmeCorrelateError(Exception):
    """Base exception for every failure the package reports on purpose."""

    module = "sme_correlate"

    def __init__(self, message: str, exit_code: int = 1, **detail: Any):
        super().__init__(message)
        self.exit_code = exit_code
        self.detail = detail

    def to_record(self) -> dict[str, Any]:
        """
        Machine-readable form written to stderr by the CLI.
        """
        record: dict[str, Any] = {
            "error": type(self).__name__,
            "module": self.module,
            "message": str(self),
        }
        if self.detail:
            record["detail"] = self.detail
        return record


class LinalgError(SmeCorrelateError):
    module = "linalg"


class KrylovConvergenceError(LinalgError):
    """Raised when expm_action cannot meet its tolerance within the configured budget."""


class ModelError(SmeCorrelateError):
    module = "model"


class SuperoperatorError(SmeCorrelateError):
    module = "superops"


class TrajectoryError(SmeCorrelateError):
    module = "trajectories"


class AnalyticError(SmeCorrelateError):
    module = "analytic"


class EstimatorError(SmeCorrelateError):
    module = "estimator"


class OutputError(SmeCorrelateError):
    """A result file or directory could not be written."""

    module = "output"


class UsageError(SmeCorrelateError):
    """Bad command-line input; reported with exit code 2."""

    module = "cli"

    def __init__(self, message: str, exit_code: int = 2, **detail: Any):
        super().__init__(message, exit_code=exit_code, **detail)
