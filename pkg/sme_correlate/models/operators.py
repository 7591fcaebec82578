"""
Canonical single-system operators and the operator-expression builder.

Expressions are plain JSON-compatible values so that model files can carry
them verbatim:

    {"op": "annihilation", "dim": 3}
    {"op": "projector", "i": 1, "j": 0, "dim": 2}
    {"op": "pauli_z"}
    {"adjoint": expr}
    {"product": [expr, expr, ...]}
    {"sum": [expr, expr, ...]}
    {"scale": 0.5, "of": expr}            # scale may also be [re, im]
"""

from __future__ import annotations

from typing import Any, Callable, Mapping

import numpy as np

from sme_correlate.errors import ModelError


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def annihilation(dim: int) -> np.ndarray:
    """
    Truncated ladder operator: a|n⟩ = √n |n−1⟩.
    """
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(np.complex128)


def pauli_x() -> np.ndarray:
    return np.array([[0, 1], [1, 0]], dtype=np.complex128)


def pauli_y() -> np.ndarray:
    return np.array([[0, -1j], [1j, 0]], dtype=np.complex128)


def pauli_z() -> np.ndarray:
    return np.array([[1, 0], [0, -1]], dtype=np.complex128)


def projector(i: int, j: int, dim: int) -> np.ndarray:
    """
    |i⟩⟨j| in a dim-dimensional space.
    """
    if not (0 <= i < dim and 0 <= j < dim):
        raise ModelError(f"projector indices ({i}, {j}) out of range for dimension {dim}")
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[i, j] = 1.0
    return m


def sigma_minus() -> np.ndarray:
    """
    Two-level lowering operator (σx − iσy)/2 = |1⟩⟨0|; index 0 is the excited state.
    """
    return 0.5 * (pauli_x() - 1j * pauli_y())


_DIMENSIONED: dict[str, Callable[[int], np.ndarray]] = {
    "identity": identity,
    "annihilation": annihilation,
}
_QUBIT: dict[str, Callable[[], np.ndarray]] = {
    "pauli_x": pauli_x,
    "pauli_y": pauli_y,
    "pauli_z": pauli_z,
    "sigma_minus": sigma_minus,
}


def parse_complex(value: Any) -> complex:
    """
    Accept a real number or an [re, im] pair.
    """
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ModelError(f"complex values are [re, im] pairs, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float, complex, np.number)):
        return complex(value)
    raise ModelError(f"cannot read a complex number from {value!r}")


def _primitive(expr: Mapping[str, Any]) -> np.ndarray:
    name = expr["op"]
    if name in _DIMENSIONED:
        if "dim" not in expr:
            raise ModelError(f"primitive '{name}' needs a 'dim' field")
        return _DIMENSIONED[name](int(expr["dim"]))
    if name in _QUBIT:
        return _QUBIT[name]()
    if name == "projector":
        try:
            return projector(int(expr["i"]), int(expr["j"]), int(expr["dim"]))
        except KeyError as exc:
            raise ModelError(f"primitive 'projector' is missing field {exc}") from exc
    raise ModelError(f"unknown operator primitive '{name}'")


def _operands(expr: Mapping, key: str) -> list[np.ndarray]:
    items = expr[key]
    if not isinstance(items, (list, tuple)):
        raise ModelError(f"{key} expects a list of expressions, got {type(items).__name__}")
    if not items:
        raise ModelError(f"empty {key}")
    parts = [build_operator(e) for e in items]
    _same_shape(parts, key)
    return parts


def _same_shape(parts: list[np.ndarray], what: str) -> None:
    shapes = {p.shape for p in parts}
    if len(shapes) != 1:
        raise ModelError(f"dimension mismatch in {what}: shapes {sorted(shapes)}")


def build_operator(expr: Any) -> np.ndarray:
    """
    Evaluate an operator expression into a dense matrix.

    Args:
        expr: Expression dict (see module docstring)

    Returns:
        The d×d complex matrix

    Raises:
        ModelError: unknown primitive, malformed expression or dimension mismatch
    """
    if not isinstance(expr, Mapping):
        raise ModelError(f"operator expression must be an object, got {type(expr).__name__}")
    if "op" in expr:
        return _primitive(expr)
    if "adjoint" in expr:
        return build_operator(expr["adjoint"]).conj().T
    if "product" in expr:
        parts = _operands(expr, "product")
        out = parts[0]
        for p in parts[1:]:
            out = out @ p
        return out
    if "sum" in expr:
        parts = _operands(expr, "sum")
        return np.sum(parts, axis=0)
    if "scale" in expr:
        if "of" not in expr:
            raise ModelError("scale expression needs an 'of' operand")
        return parse_complex(expr["scale"]) * build_operator(expr["of"])
    raise ModelError(f"unrecognised operator expression with keys {sorted(expr)}")
