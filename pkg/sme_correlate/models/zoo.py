"""
Model zoo - validated reference systems used by tests, suites and the CLI.

Times are in units of 1/γ (qubit fixtures) or 1/κ (cavity fixture).
Two-level fixtures put the excited state at index 0, so σz|g⟩ = −|g⟩ and
σ₋ = |1⟩⟨0|.
"""

from __future__ import annotations

from typing import Any, Callable

import numpy as np

from sme_correlate.errors import ModelError
from sme_correlate.models.detector import Detector, DetectorKind
from sme_correlate.models.operators import annihilation, identity, pauli_x, pauli_z, sigma_minus
from sme_correlate.models.quantum_model import DensityMatrix, QuantumModel, ensure_valid

EXCITED = 0
GROUND = 1


def decay_photodetect(gamma: float = 1.0, eta: float = 0.8, theta: float = 0.05):
    """
    Spontaneous emission counted by an imperfect photodetector.

    H = 0, one jump detector V = √γ σ₋, ρ0 = |e⟩⟨e|.
    """
    model = QuantumModel(
        dim=2,
        hamiltonian=np.zeros((2, 2)),
        detectors=(Detector("d0", DetectorKind.JUMP, np.sqrt(gamma) * sigma_minus(), eta=eta, theta=theta),),
    )
    return model, DensityMatrix.basis(EXCITED, 2)


def qubit_homodyne_z(eta: float = 1.0, strength: float = 1.0):
    """
    Dispersive (σz) homodyne measurement of a qubit in its ground state.

    H = 0, one diffusive detector L = √strength σz, ρ0 = |g⟩⟨g|.
    """
    model = QuantumModel(
        dim=2,
        hamiltonian=np.zeros((2, 2)),
        detectors=(Detector("d0", DetectorKind.DIFFUSIVE, np.sqrt(strength) * pauli_z(), eta=eta),),
    )
    return model, DensityMatrix.basis(GROUND, 2)


def driven_qubit_fluorescence(
    omega: float = 2.0, gamma: float = 1.0, eta: float = 0.9, theta: float = 0.01
):
    """
    Resonantly driven two-level emitter under photodetection (resonance fluorescence).

    H = (Ω/2) σx, one jump detector V = √γ σ₋, ρ0 = |g⟩⟨g|.
    """
    model = QuantumModel(
        dim=2,
        hamiltonian=0.5 * omega * pauli_x(),
        detectors=(Detector("d0", DetectorKind.JUMP, np.sqrt(gamma) * sigma_minus(), eta=eta, theta=theta),),
    )
    return model, DensityMatrix.basis(GROUND, 2)


def cavity_heterodyne(
    dim: int = 6, kappa: float = 1.0, drive: float = 0.5, detuning: float = 0.0, eta: float = 0.7
):
    """
    Driven leaky cavity read out by heterodyne detection.

    H = Δ a†a + ε (a + a†); the output field is split between two diffusive
    detectors L₁ = √(κ/2) a (d0, in-phase) and L₂ = i√(κ/2) a (d1, quadrature).
    ρ0 = vacuum.
    """
    a = annihilation(dim)
    ham = detuning * (a.conj().T @ a) + drive * (a + a.conj().T)
    model = QuantumModel(
        dim=dim,
        hamiltonian=ham,
        detectors=(
            Detector("d0", DetectorKind.DIFFUSIVE, np.sqrt(kappa / 2) * a, eta=eta),
            Detector("d1", DetectorKind.DIFFUSIVE, 1j * np.sqrt(kappa / 2) * a, eta=eta),
        ),
    )
    return model, DensityMatrix.basis(0, dim)


def mixed_two_detector(
    omega: float = 1.0,
    gamma: float = 1.0,
    eta_jump: float = 0.7,
    theta: float = 0.02,
    kappa: float = 0.25,
    eta_diff: float = 0.8,
):
    """
    Driven qubit watched by a photodetector (jump, d0) and a σz homodyne channel (diffusive, d1).

    H = (Ω/2) σx, V = √γ σ₋, L = √κ σz, ρ0 = |e⟩⟨e|.
    """
    model = QuantumModel(
        dim=2,
        hamiltonian=0.5 * omega * pauli_x(),
        detectors=(
            Detector("d0", DetectorKind.JUMP, np.sqrt(gamma) * sigma_minus(), eta=eta_jump, theta=theta),
            Detector("d1", DetectorKind.DIFFUSIVE, np.sqrt(kappa) * pauli_z(), eta=eta_diff),
        ),
    )
    return model, DensityMatrix.basis(EXCITED, 2)


def pure_noise(dim: int = 2):
    """
    Diffusive detector with L = 0: the record is pure Wiener noise.
    """
    model = QuantumModel(
        dim=dim,
        hamiltonian=np.zeros((dim, dim)),
        detectors=(Detector("d0", DetectorKind.DIFFUSIVE, 0.0 * identity(dim), eta=1.0),),
    )
    return model, DensityMatrix.maximally_mixed(dim)


ZOO: dict[str, Callable[..., tuple[QuantumModel, DensityMatrix]]] = {
    "decay_photodetect": decay_photodetect,
    "qubit_homodyne_z": qubit_homodyne_z,
    "driven_qubit_fluorescence": driven_qubit_fluorescence,
    "cavity_heterodyne": cavity_heterodyne,
    "mixed_two_detector": mixed_two_detector,
    "pure_noise": pure_noise,
}


def model_zoo(name: str, **params: Any) -> tuple[QuantumModel, DensityMatrix]:
    """
    Build a validated zoo model and its initial state.

    Args:
        name: Fixture name (see ZOO)
        **params: Overrides of the fixture's documented parameters

    Raises:
        ModelError: unknown name or an override that breaks an invariant
    """
    try:
        factory = ZOO[name]
    except KeyError:
        raise ModelError(f"unknown zoo model '{name}'", known=sorted(ZOO)) from None
    try:
        model, rho0 = factory(**params)
    except TypeError as exc:
        raise ModelError(f"bad parameters for zoo model '{name}': {exc}") from exc
    return ensure_valid(model), rho0.validated()
