"""
RunConfig - the fully parsed command line of one CLI invocation.

`--dump-config` prints this model as JSON; `--config FILE` loads it back and
reproduces the identical run.
"""

from __future__ import annotations

from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from sme_correlate.schemas.correlation import SharpPoint, WindowFilter


class Command(str, Enum):
    CORRELATE = "correlate"
    SIMULATE = "simulate"
    COMPARE = "compare"


class Normalization(str, Enum):
    STANDARD = "standard"
    UNIT = "unit"


class RequestSpec(BaseModel):
    id: str = Field(..., min_length=1, description="Request identifier")
    windows: list[WindowFilter] = Field(..., min_length=1, description="One filter per leg")


class GridSpec(BaseModel):
    dt: float = Field(..., gt=0)
    t_end: float = Field(..., gt=0)


class RunConfig(BaseModel):
    command: Command
    model: Optional[str] = Field(None, description="Model file path")
    zoo: Optional[str] = Field(None, description="Zoo model name")
    sharp: list[SharpPoint] = Field(default_factory=list, description="Sharp legs in flag order")
    windows: list[WindowFilter] = Field(default_factory=list, description="Filtered legs in flag order")
    requests: list[RequestSpec] = Field(default_factory=list, description="Comparison requests")
    suite: Optional[str] = Field(None, description="Preset comparison suite")
    grid: Optional[GridSpec] = None
    horizon: Optional[float] = Field(None, gt=0, description="Integration horizon T for filtered correlations")
    seed: int = Field(0, ge=0)
    n_traj: Optional[int] = Field(None, description="Trajectory count")
    scheme: Literal["kraus", "euler"] = Field("kraus", description="Trajectory discretization")
    tol: Optional[float] = Field(None, gt=0, description="Krylov tolerance")
    workers: Optional[int] = Field(None, ge=1)
    z_threshold: Optional[float] = Field(None, gt=0)
    normalization: Normalization = Normalization.STANDARD
    out: Optional[str] = Field(None, description="Output file or directory")
    corrupt_analytic_eta: Optional[float] = Field(None, gt=0, description="Test hook: scale analytic-side efficiencies")

    @model_validator(mode="after")
    def _one_model_source(self):
        if self.suite is not None:
            if self.model is not None or self.zoo is not None:
                raise ValueError("--suite brings its own models; drop --model and --zoo")
        elif (self.model is None) == (self.zoo is None):
            raise ValueError("exactly one of --model or --zoo is required")
        return self
