"""
Pydantic schemas for Monte Carlo comparison reports.
"""

from __future__ import annotations

import math
from typing import Optional

from pydantic import BaseModel, Field, computed_field

from sme_correlate.schemas.correlation import CorrelationMethod


class RequestOutcome(BaseModel):
    """
    Analytic value against its Monte Carlo estimate for one windows-set.
    """

    id: str = Field(..., description="Request identifier")
    order: int = Field(..., ge=1)
    analytic: float = Field(..., description="filtered_correlation value")
    method: CorrelationMethod
    estimate: float = Field(..., description="Monte Carlo sample mean")
    stderr: float = Field(..., ge=0, description="Monte Carlo standard error")
    z: float = Field(..., description="(estimate − analytic) / stderr")
    passed: bool = Field(..., description="|z| within the threshold")
    snap_distance: float = Field(0.0, ge=0, description="Largest Rect-bound shift to the grid")


class ComparisonSummary(BaseModel):
    n_requests: int
    n_passed: int
    max_abs_z: float
    elapsed_seconds: float


class ComparisonReport(BaseModel):
    model_ref: str = Field(..., description="Model file path or zoo name")
    scheme: str
    n_traj: int
    master_seed: int
    dt: float
    t_end: float
    z_threshold: float
    outcomes: list[RequestOutcome] = Field(default_factory=list)
    summary: Optional[ComparisonSummary] = None

    @computed_field
    @property
    def all_passed(self) -> bool:
        return bool(self.outcomes) and all(o.passed for o in self.outcomes)


def z_score(estimate: float, analytic: float, stderr: float) -> float:
    """
    Standardized deviation; a zero stderr gives 0 for an exact match and ±inf otherwise.
    """
    diff = estimate - analytic
    if stderr > 0:
        return diff / stderr
    if abs(diff) <= 1e-12 * max(1.0, abs(analytic)):
        return 0.0
    return math.copysign(math.inf, diff)


class SuiteReport(BaseModel):
    suite: str = Field(..., description="Preset suite name")
    reports: list[ComparisonReport] = Field(default_factory=list, description="One report per zoo entry")

    @computed_field
    @property
    def all_passed(self) -> bool:
        return bool(self.reports) and all(r.all_passed for r in self.reports)
