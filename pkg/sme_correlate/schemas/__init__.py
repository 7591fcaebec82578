"""
Pydantic schemas package.
Exports request, response and file schemas.
"""

from sme_correlate.schemas.correlation import (
    CorrelationMethod,
    CorrelationResult,
    Diagnostics,
    MonteCarloEstimate,
    Rect,
    Sampled,
    SharpPoint,
    WindowFilter,
)
from sme_correlate.schemas.ensemble import ComparisonReport, ComparisonSummary, RequestOutcome, SuiteReport, z_score
from sme_correlate.schemas.grid import TimeGrid
from sme_correlate.schemas.model_file import ModelFile, dump_model_file, load_model_file
from sme_correlate.schemas.run_config import Command, GridSpec, Normalization, RequestSpec, RunConfig

__all__ = [
    "CorrelationMethod",
    "CorrelationResult",
    "Diagnostics",
    "MonteCarloEstimate",
    "Rect",
    "Sampled",
    "SharpPoint",
    "WindowFilter",
    "ComparisonReport",
    "ComparisonSummary",
    "RequestOutcome",
    "SuiteReport",
    "z_score",
    "TimeGrid",
    "ModelFile",
    "dump_model_file",
    "load_model_file",
    "Command",
    "GridSpec",
    "Normalization",
    "RequestSpec",
    "RunConfig",
]
