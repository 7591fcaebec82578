"""
Pydantic schema for the uniform simulation grid.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class TimeGrid(BaseModel):
    """
    Uniform grid: step k covers [t0 + k·dt, t0 + (k+1)·dt).
    """

    model_config = ConfigDict(frozen=True)

    t0: float = Field(0.0, description="Start time")
    dt: float = Field(..., gt=0, description="Step")
    n_steps: int = Field(..., ge=1, description="Number of steps")

    @classmethod
    def spanning(cls, dt: float, t_end: float, t0: float = 0.0) -> "TimeGrid":
        """
        Grid from t0 to t_end with the step count rounded to the nearest integer.
        """
        return cls(t0=t0, dt=dt, n_steps=max(1, int(round((t_end - t0) / dt))))

    @property
    def t_end(self) -> float:
        return self.t0 + self.n_steps * self.dt

    def times(self) -> np.ndarray:
        """
        Left edge of every step.
        """
        return self.t0 + self.dt * np.arange(self.n_steps)
