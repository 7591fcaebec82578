"""
Superoperator construction.

Every map is stored as a list of (A, B) factor pairs meaning ρ ↦ Σ A ρ B.
The d²×d² matrix (column-stacking convention, vec(AρB) = (Bᵀ⊗A)vec(ρ)) is
derived from the pairs on demand and used for small Hilbert dimensions;
larger systems act matrix-free.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Optional, Sequence, Union

import numpy as np
from scipy.sparse.linalg import LinearOperator

from sme_correlate.config import settings
from sme_correlate.core.linalg import devectorize_stack, vectorize, vectorize_stack
from sme_correlate.errors import SuperoperatorError
from sme_correlate.models.detector import Detector, DetectorKind
from sme_correlate.models.quantum_model import QuantumModel

logger = logging.getLogger(__name__)

Term = tuple[np.ndarray, np.ndarray]


def _dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


@dataclass(frozen=True, eq=False)
class Superoperator:
    """
    Linear map on d×d matrices.

    Attributes:
        dim: Hilbert dimension d
        terms: (A, B) pairs; the map is ρ ↦ Σ A ρ B
        label: Short name used in logs and reprs
    """

    dim: int
    terms: tuple[Term, ...]
    label: str = ""

    @property
    def liouville_dim(self) -> int:
        return self.dim * self.dim

    @property
    def materialized(self) -> bool:
        """
        True when the d²×d² matrix form is used for vector actions.
        """
        return self.dim < settings.matrix_free_min_dim

    @cached_property
    def matrix(self) -> np.ndarray:
        """
        Dense d²×d² form Σ Bᵀ⊗A.
        """
        n = self.liouville_dim
        out = np.zeros((n, n), dtype=np.complex128)
        for a, b in self.terms:
            out += np.kron(b.T, a)
        return out

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """
        Matrix-free action on one d×d matrix or a (k, d, d) stack.
        """
        rho = np.asarray(rho, dtype=np.complex128)
        out = np.zeros(rho.shape, dtype=np.complex128)
        for a, b in self.terms:
            out += a @ rho @ b
        return out

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.complex128).ravel()
        if self.materialized:
            return self.matrix @ v
        return vectorize_stack(self.apply(devectorize_stack(v[None, :], self.dim)))[0]

    def apply_vectors(self, rows: np.ndarray) -> np.ndarray:
        """
        Act on a (k, d²) stack of vectorized matrices.
        """
        rows = np.asarray(rows, dtype=np.complex128)
        if self.materialized:
            return rows @ self.matrix.T
        return vectorize_stack(self.apply(devectorize_stack(rows, self.dim)))

    def as_linear_operator(self) -> LinearOperator:
        n = self.liouville_dim
        return LinearOperator((n, n), matvec=self.matvec, dtype=np.complex128)

    def scaled(self, c: complex, label: Optional[str] = None) -> "Superoperator":
        return Superoperator(self.dim, tuple((c * a, b) for a, b in self.terms), label or f"{c}*{self.label}")

    def __add__(self, other: "Superoperator") -> "Superoperator":
        if not isinstance(other, Superoperator):
            return NotImplemented
        if other.dim != self.dim:
            raise SuperoperatorError(f"cannot add superoperators of dimension {self.dim} and {other.dim}")
        return Superoperator(self.dim, self.terms + other.terms, f"{self.label}+{other.label}")

    def trace_after(self, rho: np.ndarray) -> complex:
        return complex(np.trace(self.apply(rho)))

    def verify(self, n_samples: int = 20, tol: float = 1e-12, seed: int = 0) -> float:
        """
        Cross-check the matrix and factor-pair forms on random inputs.

        Returns:
            Largest relative disagreement

        Raises:
            SuperoperatorError: disagreement above tol
        """
        rng = np.random.default_rng(seed)
        d = self.dim
        worst = 0.0
        for _ in range(n_samples):
            x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            direct = vectorize(self.apply(x))
            via_matrix = self.matrix @ vectorize(x)
            scale = max(1.0, float(np.linalg.norm(direct)))
            worst = max(worst, float(np.linalg.norm(direct - via_matrix)) / scale)
        if worst > tol:
            raise SuperoperatorError(
                f"materialized and matrix-free forms of '{self.label}' disagree",
                defect=worst,
                tol=tol,
            )
        return worst

    def __repr__(self):
        form = "materialized" if self.materialized else "matrix-free"
        return f"<Superoperator({self.label}, dim={self.dim}, terms={len(self.terms)}, {form})>"


def _finalize(op: Superoperator) -> Superoperator:
    if op.dim <= settings.verify_max_dim:
        op.verify()
    return op


def _identity_term(dim: int, c: complex) -> Term:
    eye = np.eye(dim, dtype=np.complex128)
    return c * eye, eye


def _square(m: np.ndarray, name: str, dim: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise SuperoperatorError(f"{name} must be square, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise SuperoperatorError(f"{name} has dimension {arr.shape[0]}, expected {dim}")
    return arr


def identity_map(dim: int) -> Superoperator:
    return _finalize(Superoperator(dim, (_identity_term(dim, 1.0),), "I"))


def dissipator(op: np.ndarray, dim: Optional[int] = None) -> Superoperator:
    """
    𝒟[L](ρ) = LρL† − ½L†Lρ − ½ρL†L.

    Raises:
        SuperoperatorError: non-square L or dimension mismatch
    """
    L = _square(op, "dissipator operator", dim)
    d = L.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    half = -0.5 * (_dagger(L) @ L)
    return _finalize(Superoperator(d, ((L, _dagger(L)), (half, eye), (eye, half)), "D"))


def _lindbladian_terms(model: QuantumModel) -> list[Term]:
    d = model.dim
    eye = np.eye(d, dtype=np.complex128)
    k = -1j * model.hamiltonian
    for det in model.detectors:
        k = k - 0.5 * (_dagger(det.operator) @ det.operator)
    terms: list[Term] = [(k, eye), (eye, _dagger(k))]
    terms.extend((det.operator, _dagger(det.operator)) for det in model.detectors)
    return terms


def lindbladian(model: QuantumModel) -> Superoperator:
    """
    𝓛(ρ) = −i[H, ρ] + Σ 𝒟[V_μ](ρ) + Σ 𝒟[L_ν](ρ) over every detector.

    Coherent and anticommutator parts share one effective generator
    K = −iH − ½ Σ O†O, so the factor list is (K, I), (I, K†), (O, O†)...
    """
    return _finalize(Superoperator(model.dim, tuple(_lindbladian_terms(model)), "L"))


def _jump_insertion_terms(det: Detector) -> list[Term]:
    d = det.operator.shape[0]
    return [_identity_term(d, det.theta), (det.eta * det.operator, _dagger(det.operator))]


def _diff_insertion_terms(det: Detector) -> list[Term]:
    d = det.operator.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    s = np.sqrt(det.eta)
    return [(s * det.operator, eye), (eye, s * _dagger(det.operator))]


def jump_insertion(det: Detector) -> Superoperator:
    """
    θρ + ηVρV†, placed at each click time in the jump correlation formulas.

    Raises:
        SuperoperatorError: detector is not a jump detector
    """
    if det.kind is not DetectorKind.JUMP:
        raise SuperoperatorError(f"jump_insertion needs a jump detector, '{det.label}' is {det.kind.value}")
    return _finalize(Superoperator(det.operator.shape[0], tuple(_jump_insertion_terms(det)), f"J[{det.label}]"))


def diff_insertion(det: Detector) -> Superoperator:
    """
    √η(Lρ + ρL†), placed at each time in the diffusive correlation formulas.

    Raises:
        SuperoperatorError: detector is not a diffusive detector
    """
    if det.kind is not DetectorKind.DIFFUSIVE:
        raise SuperoperatorError(f"diff_insertion needs a diffusive detector, '{det.label}' is {det.kind.value}")
    return _finalize(Superoperator(det.operator.shape[0], tuple(_diff_insertion_terms(det)), f"P[{det.label}]"))


def insertion(det: Detector) -> Superoperator:
    return jump_insertion(det) if det.is_jump else diff_insertion(det)


def no_click_operator(det: Detector, hamiltonian: np.ndarray, dt: float) -> np.ndarray:
    """
    M₀ = I − iH dt − ½O†O dt for a single detector operator O.
    """
    op = det.operator
    d = op.shape[0]
    return np.eye(d, dtype=np.complex128) - 1j * np.asarray(hamiltonian) * dt - 0.5 * (_dagger(op) @ op) * dt


def kraus_maps_jump(det: Detector, hamiltonian: np.ndarray, dt: float) -> tuple[Superoperator, Superoperator]:
    """
    Partial Kraus maps of one photodetection step.

    K₀(ρ) = (1−θdt)M₀ρM₀† + (1−η)M₁ρM₁†   (no click)
    K₁(ρ) = θdt·M₀ρM₀† + η·M₁ρM₁†          (click)

    with M₀ = I − iH dt − ½V†V dt and M₁ = √dt V.
    """
    if det.kind is not DetectorKind.JUMP:
        raise SuperoperatorError(f"kraus_maps_jump needs a jump detector, '{det.label}' is {det.kind.value}")
    if not dt > 0:
        raise SuperoperatorError(f"dt must be positive, got {dt}")
    ham = _square(hamiltonian, "hamiltonian", det.operator.shape[0])
    d = ham.shape[0]
    m0 = no_click_operator(det, ham, dt)
    m1 = np.sqrt(dt) * det.operator
    k0 = Superoperator(
        d, (((1.0 - det.theta * dt) * m0, _dagger(m0)), ((1.0 - det.eta) * m1, _dagger(m1))), f"K0[{det.label}]"
    )
    k1 = Superoperator(d, ((det.theta * dt * m0, _dagger(m0)), (det.eta * m1, _dagger(m1))), f"K1[{det.label}]")
    return _finalize(k0), _finalize(k1)


def kraus_map_diffusive(det: Detector, hamiltonian: np.ndarray, dt: float, r: float) -> Superoperator:
    """
    K_r(ρ) = M_r ρ M_r† + (1−η)LρL†dt with M_r = I − iH dt − ½L†L dt + √η L r.
    """
    if det.kind is not DetectorKind.DIFFUSIVE:
        raise SuperoperatorError(f"kraus_map_diffusive needs a diffusive detector, '{det.label}' is {det.kind.value}")
    if not dt > 0:
        raise SuperoperatorError(f"dt must be positive, got {dt}")
    ham = _square(hamiltonian, "hamiltonian", det.operator.shape[0])
    mr = no_click_operator(det, ham, dt) + np.sqrt(det.eta) * r * det.operator
    terms = ((mr, _dagger(mr)), ((1.0 - det.eta) * dt * det.operator, _dagger(det.operator)))
    return _finalize(Superoperator(ham.shape[0], terms, f"Kr[{det.label}]"))


def _j_values(model: QuantumModel, j: Union[Sequence[float], Mapping[str, float]]) -> list[float]:
    if isinstance(j, Mapping):
        unknown = set(j) - set(model.labels)
        if unknown:
            raise SuperoperatorError(f"test-function values for unknown detectors {sorted(unknown)}")
        return [float(j.get(label, 0.0)) for label in model.labels]
    values = [float(x) for x in j]
    if len(values) != len(model.detectors):
        raise SuperoperatorError(f"expected {len(model.detectors)} test-function values, got {len(values)}")
    return values


def deformed_generator(model: QuantumModel, j: Union[Sequence[float], Mapping[str, float]]) -> Superoperator:
    """
    Generator of the j-tilted evolution whose trace gives the generating functional.

    𝓛_j = 𝓛 + Σ_μ (e^{j_μ}−1)(θ_μ I + η_μ V_μ×) + Σ_ν (√η_ν j_ν L_ν+ + j_ν²/2 I)

    Args:
        model: Validated model
        j: One value per detector, in detector order or keyed by label

    Returns:
        The Lindbladian itself when every j is zero
    """
    values = _j_values(model, j)
    if not any(values):
        return lindbladian(model)
    terms = _lindbladian_terms(model)
    d = model.dim
    for det, jv in zip(model.detectors, values):
        if jv == 0.0:
            continue
        if det.is_jump:
            c = np.expm1(jv)
            terms.extend((c * a, b) for a, b in _jump_insertion_terms(det))
        else:
            terms.extend((jv * a, b) for a, b in _diff_insertion_terms(det))
            terms.append(_identity_term(d, 0.5 * jv * jv))
    return _finalize(Superoperator(d, tuple(terms), "Lj"))


def jump_backaction(det: Detector, rho: np.ndarray, floor: float = 1e-300) -> tuple[np.ndarray, np.ndarray]:
    """
    Back-action of a click on a (k, d, d) stack.

    𝒢[V](ρ) = (θρ + ηVρV†)/(θ + ηTr[VρV†]) − ρ, set to zero where the click
    rate vanishes.

    Returns:
        (𝒢[V](ρ), click rate θ + ηTr[VρV†] per stack entry)
    """
    op = det.operator
    inserted = det.theta * rho + det.eta * (op @ rho @ _dagger(op))
    rate = np.real(np.trace(inserted, axis1=-2, axis2=-1))
    live = rate > floor
    safe = np.where(live, rate, 1.0)
    out = inserted / safe[..., None, None] - rho
    return np.where(live[..., None, None], out, 0.0), rate


def diffusive_backaction(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """
    ℳ[L](ρ) = Lρ + ρL† − Tr[(L+L†)ρ]ρ on a (k, d, d) stack.
    """
    lr = op @ rho
    plus = lr + np.conj(np.swapaxes(lr, -1, -2))
    mean = np.real(np.trace(plus, axis1=-2, axis2=-1))
    return plus - mean[..., None, None] * rho
