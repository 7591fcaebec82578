"""
Pydantic schemas for correlation requests and results.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SharpPoint(BaseModel):
    """
    One leg of a sharp-signal correlation: detector signal I_t at time t.
    """

    model_config = ConfigDict(frozen=True)

    detector: str = Field(..., min_length=1, description="Detector label")
    time: float = Field(..., ge=0, description="Insertion time")

    @field_validator("time")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("time must be finite")
        return v


class Rect(BaseModel):
    """
    Indicator of [start, end). A zero-width window is allowed and integrates to 0.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["rect"] = "rect"
    start: float = Field(..., ge=0, description="Window start")
    end: float = Field(..., description="Window end")

    @model_validator(mode="after")
    def _ordered(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise ValueError("window bounds must be finite")
        if self.end < self.start:
            raise ValueError(f"window end {self.end} is before its start {self.start}")
        return self

    @property
    def support(self) -> tuple[float, float]:
        return self.start, self.end

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return ((t >= self.start) & (t < self.end)).astype(float)


class Sampled(BaseModel):
    """
    General filter sampled on a uniform grid, linearly interpolated in
    between and zero outside [t0, t0 + (len(values) − 1)·dt].
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["sampled"] = "sampled"
    t0: float = Field(0.0, ge=0, description="Time of the first sample")
    dt: float = Field(..., gt=0, description="Sample spacing")
    values: tuple[float, ...] = Field(..., min_length=2, description="Filter samples")

    @field_validator("values")
    @classmethod
    def _finite(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not all(math.isfinite(x) for x in v):
            raise ValueError("filter samples must be finite")
        return v

    @property
    def support(self) -> tuple[float, float]:
        return self.t0, self.t0 + (len(self.values) - 1) * self.dt

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        knots = self.t0 + self.dt * np.arange(len(self.values))
        return np.interp(np.asarray(t, dtype=float), knots, np.asarray(self.values), left=0.0, right=0.0)

    @property
    def breakpoints(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.values))


WindowShape = Annotated[Union[Rect, Sampled], Field(discriminator="kind")]


class WindowFilter(BaseModel):
    """
    Test function f for one leg of a filtered correlation: I_f = ∫ f_t dY_t.
    """

    model_config = ConfigDict(frozen=True)

    detector: str = Field(..., min_length=1, description="Detector label")
    shape: WindowShape = Field(..., description="Rect window or sampled filter")

    @classmethod
    def rect(cls, detector: str, start: float, end: float) -> "WindowFilter":
        return cls(detector=detector, shape=Rect(start=start, end=end))

    @classmethod
    def sampled(cls, detector: str, t0: float, dt: float, values) -> "WindowFilter":
        return cls(detector=detector, shape=Sampled(t0=t0, dt=dt, values=tuple(float(v) for v in values)))

    @property
    def is_rect(self) -> bool:
        return isinstance(self.shape, Rect)

    @property
    def support(self) -> tuple[float, float]:
        return self.shape.support

    def evaluate(self, t) -> np.ndarray:
        """
        Filter values at the given times.
        """
        return self.shape.evaluate(t)


class CorrelationMethod(str, Enum):
    SHARP_INSERTION = "SharpInsertion"
    ODE_PIECEWISE = "OdePiecewise"
    ODE_RUNGE_KUTTA = "OdeRungeKutta"
    QUADRATURE = "Quadrature"


class Diagnostics(BaseModel):
    segments: Optional[int] = Field(None, description="Piecewise-constant segments exponentiated")
    steps: Optional[int] = Field(None, description="Accepted Runge-Kutta steps or propagations")
    tolerance: float = Field(..., description="Tolerance used")
    unconditioned_trace: Optional[float] = Field(
        None, description="Trace of the unconditioned block at the end of integration"
    )


class CorrelationResult(BaseModel):
    value: float = Field(..., description="Correlation value")
    order: int = Field(..., ge=1, description="Number of legs n")
    method: CorrelationMethod
    diagnostics: Diagnostics

    @field_validator("value")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("correlation value is not finite")
        return v


class MonteCarloEstimate(BaseModel):
    estimate: float = Field(..., description="Sample mean of the product of window integrals")
    stderr: float = Field(..., ge=0, description="Standard error of the mean")
    n_samples: int = Field(..., ge=2)
    snap_distance: float = Field(0.0, ge=0, description="Largest distance a Rect bound moved to hit the grid")
