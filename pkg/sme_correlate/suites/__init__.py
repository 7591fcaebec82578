"""
Preset comparison suites.

Each module exposes a CONFIG dict: description, n_traj, dt, seed and a list
of entries, one per zoo model, each with its horizon and requests written
in the CLI window syntax.
"""

from __future__ import annotations

import importlib
from typing import Any

from sme_correlate.errors import UsageError

SUITES = ("smoke", "zoo", "three_point")


def load_suite(name: str) -> dict[str, Any]:
    """
    Return the CONFIG dict of a preset suite.

    Raises:
        UsageError: unknown suite name
    """
    if name not in SUITES:
        raise UsageError(f"unknown suite '{name}'", known=list(SUITES))
    return importlib.import_module(f"sme_correlate.suites.{name}").CONFIG
