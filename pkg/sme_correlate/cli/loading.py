"""
Model resolution shared by the commands.
"""

from __future__ import annotations

from sme_correlate.models.quantum_model import DensityMatrix, QuantumModel
from sme_correlate.models.zoo import model_zoo
from sme_correlate.schemas.model_file import load_model_file
from sme_correlate.schemas.run_config import RunConfig


def resolve_model(config: RunConfig) -> tuple[QuantumModel, DensityMatrix, str]:
    """
    Load the model named by --model or --zoo.

    Returns:
        (model, initial state, reference string for reports)
    """
    if config.model is not None:
        model, rho0 = load_model_file(config.model)
        return model, rho0, config.model
    model, rho0 = model_zoo(config.zoo)
    return model, rho0, config.zoo
