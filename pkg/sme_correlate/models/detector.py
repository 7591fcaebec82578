"""
Detector model - one measurement channel of the continuously monitored system.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class DetectorKind(str, Enum):
    """
    JUMP detectors count clicks (dY = dN), DIFFUSIVE detectors record a
    Wiener-noise current (dY = √η Tr[(L+L†)ρ]dt + dW).
    """

    JUMP = "jump"
    DIFFUSIVE = "diffusive"


@dataclass(frozen=True, eq=False)
class Detector:
    """
    Detector attached to a quantum model.

    Attributes:
        label: Unique identifier used by correlation requests and record columns
        kind: JUMP or DIFFUSIVE
        operator: d×d measurement operator (V for jump, L for diffusive)
        eta: Detection efficiency, 0 < eta <= 1
        theta: Dark count rate (jump detectors only, >= 0)
    """

    label: str
    kind: DetectorKind
    operator: np.ndarray
    eta: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DetectorKind(self.kind))
        object.__setattr__(self, "operator", np.asarray(self.operator, dtype=np.complex128))

    @property
    def is_jump(self) -> bool:
        return self.kind is DetectorKind.JUMP

    def with_eta(self, eta: float) -> "Detector":
        return Detector(self.label, self.kind, self.operator, eta=eta, theta=self.theta)

    def __repr__(self):
        return f"<Detector(label={self.label}, kind={self.kind.value}, eta={self.eta}, theta={self.theta})>"
