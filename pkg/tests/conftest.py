"""
Shared fixtures: zoo models, random states and settings overrides.
"""

import numpy as np
import pytest

from sme_correlate.config import settings
from sme_correlate.models import DensityMatrix, Detector, DetectorKind, QuantumModel, model_zoo
from sme_correlate.models.operators import annihilation


def random_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    """
    Full-rank random density matrix.
    """
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_model(dim: int, rng: np.random.Generator, theta: float = 0.1) -> QuantumModel:
    """
    Random Hamiltonian with one jump and one diffusive detector.
    """
    h = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    v = 0.5 * (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    l = 0.5 * (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    return QuantumModel(
        dim=dim,
        hamiltonian=0.5 * (h + h.conj().T),
        detectors=(
            Detector("j", DetectorKind.JUMP, v, eta=0.7, theta=theta),
            Detector("w", DetectorKind.DIFFUSIVE, l, eta=0.6),
        ),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def decay():
    return model_zoo("decay_photodetect")


@pytest.fixture
def decay_no_dark():
    return model_zoo("decay_photodetect", eta=1.0, theta=0.0)


@pytest.fixture
def homodyne():
    return model_zoo("qubit_homodyne_z")


@pytest.fixture
def noise():
    return model_zoo("pure_noise")


@pytest.fixture
def fluorescence():
    return model_zoo("driven_qubit_fluorescence")


@pytest.fixture
def mixed():
    return model_zoo("mixed_two_detector")


@pytest.fixture
def cavity():
    return model_zoo("cavity_heterodyne", dim=4)


@pytest.fixture
def dark_counts_only():
    # a detector that sees nothing of the system: clicks are Poisson(θ)
    model = QuantumModel(
        dim=2,
        hamiltonian=np.zeros((2, 2)),
        detectors=(Detector("d0", DetectorKind.JUMP, np.zeros((2, 2)), eta=1.0, theta=0.7),),
    )
    return model, DensityMatrix.basis(0, 2)


@pytest.fixture
def damped_oscillator():
    a = annihilation(5)
    model = QuantumModel(
        dim=5,
        hamiltonian=0.3 * (a + a.conj().T),
        detectors=(Detector("d0", DetectorKind.JUMP, 0.8 * a, eta=0.9, theta=0.0),),
    )
    return model, DensityMatrix.basis(2, 5)


@pytest.fixture
def override_settings():
    """
    Temporarily set attributes of the global settings object.
    """
    saved = {}

    def _set(**values):
        for key, value in values.items():
            saved.setdefault(key, getattr(settings, key))
            setattr(settings, key, value)

    yield _set
    for key, value in saved.items():
        setattr(settings, key, value)
