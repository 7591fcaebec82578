"""
Pydantic schemas for model files.

Matrices are nested arrays of [re, im] pairs (plain reals are accepted on
input). Operators may instead be given as operator expressions.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from sme_correlate.errors import ModelError
from sme_correlate.models.detector import Detector, DetectorKind
from sme_correlate.models.operators import build_operator, parse_complex
from sme_correlate.models.quantum_model import DensityMatrix, QuantumModel, ensure_valid

MatrixData = list[list[Any]]
OperatorData = Union[MatrixData, dict[str, Any]]


def matrix_from_data(data: OperatorData, dim: int, field: str) -> np.ndarray:
    """
    Decode a dense matrix or an operator expression and check its shape.
    """
    if isinstance(data, dict):
        m = build_operator(data)
    else:
        try:
            m = np.array([[parse_complex(x) for x in row] for row in data], dtype=np.complex128)
        except (TypeError, ValueError, ModelError) as exc:
            raise ModelError(f"{field}: {exc}") from exc
    if m.shape != (dim, dim):
        raise ModelError(f"{field}: shape {m.shape} does not match dimension {dim}")
    return m


def matrix_to_data(m: np.ndarray) -> MatrixData:
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m)]


class DetectorFile(BaseModel):
    label: str = Field(..., min_length=1, description="Unique detector identifier")
    kind: DetectorKind = Field(..., description="jump or diffusive")
    operator: OperatorData = Field(..., description="V (jump) or L (diffusive)")
    eta: float = Field(1.0, description="Detection efficiency in (0, 1]")
    theta: float = Field(0.0, description="Dark count rate (jump only)")


class InitialStateFile(BaseModel):
    """
    Exactly one of ket, matrix or basis.
    """

    ket: Optional[list[Any]] = Field(None, description="Pure state amplitudes (promoted to a projector)")
    matrix: Optional[MatrixData] = Field(None, description="Full density matrix")
    basis: Optional[int] = Field(None, description="Index of a basis state")

    @model_validator(mode="after")
    def _exactly_one(self):
        given = [name for name in ("ket", "matrix", "basis") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"initial_state needs exactly one of ket, matrix, basis (got {given or 'none'})")
        return self


class ModelFile(BaseModel):
    dim: int = Field(..., ge=1, description="Hilbert space dimension")
    hamiltonian: OperatorData = Field(..., description="Hamiltonian as matrix or operator expression")
    detectors: list[DetectorFile] = Field(..., description="Ordered detector list")
    initial_state: InitialStateFile = Field(..., description="Initial state ρ0")
    description: Optional[str] = Field(None, description="Free-text note, e.g. parameters and units")

    def to_model(self) -> tuple[QuantumModel, DensityMatrix]:
        """
        Build and validate the in-memory model and state.
        """
        d = self.dim
        ham = matrix_from_data(self.hamiltonian, d, "hamiltonian")
        detectors = tuple(
            Detector(
                label=df.label,
                kind=df.kind,
                operator=matrix_from_data(df.operator, d, f"detectors[{i}].operator"),
                eta=df.eta,
                theta=df.theta,
            )
            for i, df in enumerate(self.detectors)
        )
        model = ensure_valid(QuantumModel(d, ham, detectors))
        init = self.initial_state
        if init.ket is not None:
            amplitudes = [parse_complex(x) for x in init.ket]
            if len(amplitudes) != d:
                raise ModelError(f"initial_state.ket has {len(amplitudes)} amplitudes, expected {d}")
            rho0 = DensityMatrix.from_ket(amplitudes)
        elif init.matrix is not None:
            rho0 = DensityMatrix(matrix_from_data(init.matrix, d, "initial_state.matrix"))
        else:
            rho0 = DensityMatrix.basis(init.basis, d)
        return model, rho0.validated()

    @classmethod
    def from_model(cls, model: QuantumModel, rho0: DensityMatrix, description: Optional[str] = None) -> "ModelFile":
        return cls(
            dim=model.dim,
            hamiltonian=matrix_to_data(model.hamiltonian),
            detectors=[
                DetectorFile(
                    label=d.label,
                    kind=d.kind,
                    operator=matrix_to_data(d.operator),
                    eta=d.eta,
                    theta=d.theta,
                )
                for d in model.detectors
            ],
            initial_state=InitialStateFile(matrix=matrix_to_data(rho0.matrix)),
            description=description,
        )


def load_model_file(path: Union[str, Path]) -> tuple[QuantumModel, DensityMatrix]:
    """
    Read a model JSON file.

    Raises:
        ModelError: missing file, malformed JSON, schema errors or invariant violations
    """
    p = Path(path)
    if not p.is_file():
        raise ModelError(f"model file not found: {p}", path=str(p))
    try:
        raw = json.loads(p.read_text())
        return ModelFile.model_validate(raw).to_model()
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file {p} is not valid JSON: {exc}", path=str(p)) from exc
    except ValidationError as exc:
        raise ModelError(f"model file {p} does not match the schema: {exc}", path=str(p)) from exc


def dump_model_file(
    path: Union[str, Path], model: QuantumModel, rho0: DensityMatrix, description: Optional[str] = None
) -> Path:
    p = Path(path)
    p.write_text(ModelFile.from_model(model, rho0, description).model_dump_json(indent=2, exclude_none=True))
    return p
