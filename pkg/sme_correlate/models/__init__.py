"""
Physical model package.
Exports the system description types, validation and builders.
"""

from sme_correlate.models.detector import Detector, DetectorKind
from sme_correlate.models.quantum_model import (
    DensityMatrix,
    QuantumModel,
    Violation,
    check_state,
    ensure_valid,
    validate_model,
)
from sme_correlate.models.operators import build_operator
from sme_correlate.models.zoo import ZOO, model_zoo

__all__ = [
    "Detector",
    "DetectorKind",
    "DensityMatrix",
    "QuantumModel",
    "Violation",
    "check_state",
    "ensure_valid",
    "validate_model",
    "build_operator",
    "ZOO",
    "model_zoo",
]
