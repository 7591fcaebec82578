"""
Quantum model and density matrix - the physical system and its state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from sme_correlate.errors import ModelError
from sme_correlate.models.detector import Detector, DetectorKind

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10


@dataclass(frozen=True)
class Violation:
    """
    One failed model or state invariant.

    Attributes:
        field: Dotted path of the offending field (e.g. "detectors[0].eta")
        message: Human-readable description
        defect: Measured size of the defect, if numeric
    """

    field: str
    message: str
    defect: Optional[float] = None

    def __str__(self):
        suffix = f" (defect={self.defect:.3e})" if self.defect is not None else ""
        return f"{self.field}: {self.message}{suffix}"


@dataclass(frozen=True, eq=False)
class QuantumModel:
    """
    Hilbert dimension, Hamiltonian and detectors of one monitored system.

    Attributes:
        dim: Hilbert space dimension d
        hamiltonian: d×d Hermitian matrix H
        detectors: Ordered detectors; jump ones contribute D[V] and counting
            signals, diffusive ones D[L] and homodyne-type currents
    """

    dim: int
    hamiltonian: np.ndarray
    detectors: tuple[Detector, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "hamiltonian", np.asarray(self.hamiltonian, dtype=np.complex128))
        object.__setattr__(self, "detectors", tuple(self.detectors))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(det.label for det in self.detectors)

    def detector(self, label: str) -> Detector:
        for det in self.detectors:
            if det.label == label:
                return det
        raise ModelError(f"unknown detector '{label}'", known=list(self.labels))

    def index_of(self, label: str) -> int:
        return self.labels.index(self.detector(label).label)

    @property
    def jump_detectors(self) -> tuple[Detector, ...]:
        return tuple(d for d in self.detectors if d.kind is DetectorKind.JUMP)

    @property
    def diffusive_detectors(self) -> tuple[Detector, ...]:
        return tuple(d for d in self.detectors if d.kind is DetectorKind.DIFFUSIVE)

    def replace_detectors(self, detectors: Sequence[Detector]) -> "QuantumModel":
        return QuantumModel(self.dim, self.hamiltonian, tuple(detectors))

    def __repr__(self):
        return f"<QuantumModel(dim={self.dim}, detectors={list(self.labels)})>"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    d×d Hermitian, positive semidefinite, unit-trace state.
    """

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, ket: Sequence[complex]) -> "DensityMatrix":
        """
        Promote a (not necessarily normalized) pure state to its projector.
        """
        psi = np.asarray(ket, dtype=np.complex128).ravel()
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ModelError("initial ket has zero norm")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def basis(cls, index: int, dim: int) -> "DensityMatrix":
        if not 0 <= index < dim:
            raise ModelError(f"basis index {index} out of range for dimension {dim}")
        ket = np.zeros(dim, dtype=np.complex128)
        ket[index] = 1.0
        return cls.from_ket(ket)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    def population(self, index: int) -> float:
        return float(self.matrix[index, index].real)

    def validated(self) -> "DensityMatrix":
        """
        Return self, or raise ModelError listing every violated invariant.
        """
        violations = check_state(self)
        if violations:
            raise ModelError(
                "invalid density matrix: " + "; ".join(str(v) for v in violations),
                violations=[str(v) for v in violations],
            )
        return self

    def __repr__(self):
        return f"<DensityMatrix(dim={self.dim})>"


def _hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_state(rho: DensityMatrix, dim: Optional[int] = None, prefix: str = "state") -> list[Violation]:
    """
    Check DensityMatrix invariants.

    Args:
        rho: State to check
        dim: Expected dimension (skipped when None)
        prefix: Field name used in violations

    Returns:
        List of violations; empty when the state is valid
    """
    m = rho.matrix
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return [Violation(prefix, f"must be a square matrix, got shape {m.shape}")]
    violations: list[Violation] = []
    if dim is not None and m.shape[0] != dim:
        violations.append(Violation(prefix, f"dimension {m.shape[0]} does not match model dimension {dim}"))
        return violations
    if not np.all(np.isfinite(m)):
        return [Violation(prefix, "has non-finite entries")]
    herm = _hermiticity_defect(m)
    if herm > HERMITIAN_TOL:
        violations.append(Violation(prefix, "is not Hermitian", herm))
    trace_defect = abs(np.trace(m) - 1.0)
    if trace_defect > TRACE_TOL:
        violations.append(Violation(prefix, "trace differs from 1", float(trace_defect)))
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))
    if min_eig < PSD_TOL:
        violations.append(Violation(prefix, "has a negative eigenvalue", min_eig))
    return violations


def validate_model(model: QuantumModel) -> list[Violation]:
    """
    Check every QuantumModel and Detector invariant.

    Violations are data: this never raises.

    Returns:
        Empty list iff the model is valid; otherwise one entry per defect,
        naming the field and the measured defect.
    """
    violations: list[Violation] = []
    d = model.dim
    if not isinstance(d, (int, np.integer)) or d < 1:
        return [Violation("dim", f"must be a positive integer, got {d!r}")]

    h = model.hamiltonian
    if h.shape != (d, d):
        violations.append(Violation("hamiltonian", f"shape {h.shape} does not match dimension {d}"))
    elif not np.all(np.isfinite(h)):
        violations.append(Violation("hamiltonian", "has non-finite entries"))
    else:
        scale = max(float(np.linalg.norm(h)), 1.0)
        defect = float(np.linalg.norm(h - h.conj().T))
        if defect > HERMITIAN_TOL * scale:
            violations.append(Violation("hamiltonian", "is not Hermitian (‖H − H†‖ too large)", defect))

    if not model.detectors:
        violations.append(Violation("detectors", "at least one detector is required"))

    seen: set[str] = set()
    for i, det in enumerate(model.detectors):
        where = f"detectors[{i}]"
        if not det.label:
            violations.append(Violation(f"{where}.label", "must be a non-empty identifier"))
        elif det.label in seen:
            violations.append(Violation(f"{where}.label", f"duplicate label '{det.label}'"))
        seen.add(det.label)
        if det.operator.shape != (d, d):
            violations.append(
                Violation(f"{where}.operator", f"shape {det.operator.shape} does not match dimension {d}")
            )
        elif not np.all(np.isfinite(det.operator)):
            violations.append(Violation(f"{where}.operator", "has non-finite entries"))
        if not (0.0 < det.eta <= 1.0):
            violations.append(Violation(f"{where}.eta", "efficiency must satisfy 0 < eta <= 1", float(det.eta)))
        if det.theta < 0.0:
            violations.append(Violation(f"{where}.theta", "dark count rate must be >= 0", float(det.theta)))
        if det.kind is DetectorKind.DIFFUSIVE and det.theta != 0.0:
            violations.append(
                Violation(f"{where}.theta", "dark count rate is only defined for jump detectors", float(det.theta))
            )
    return violations


def ensure_valid(model: QuantumModel) -> QuantumModel:
    """
    Return the model, or raise ModelError carrying its violations.
    """
    violations = validate_model(model)
    if violations:
        raise ModelError(
            "invalid model: " + "; ".join(str(v) for v in violations),
            violations=[str(v) for v in violations],
        )
    return model
