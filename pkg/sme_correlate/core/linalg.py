"""
Dense linear algebra primitives used by every service.

Density matrices are vectorized by column stacking, fixed project-wide:
data[i + d*j] = m[i, j], so that vec(A rho B) = (B^T kron A) vec(rho).
"""

from __future__ import annotations

import logging
import math
from typing import Any, Optional

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from sme_correlate.config import settings
from sme_correlate.errors import KrylovConvergenceError, LinalgError

logger = logging.getLogger(__name__)


def as_complex_matrix(m: Any, name: str = "matrix") -> np.ndarray:
    """
    Coerce input to a 2-D complex128 array with at least one row and column.
    """
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise LinalgError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    return arr


def vectorize(m: Any) -> np.ndarray:
    """
    Column-stack a square matrix into a vector of length d².

    Args:
        m: d×d matrix

    Returns:
        complex vector v with v[i + d*j] = m[i, j]
    """
    arr = as_complex_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise LinalgError(f"vectorize expects a square matrix, got shape {arr.shape}")
    return arr.reshape(-1, order="F")


def devectorize(v: Any) -> np.ndarray:
    """
    Inverse of vectorize.
    """
    vec = np.asarray(v, dtype=np.complex128).ravel()
    dim = math.isqrt(vec.size)
    if dim < 1 or dim * dim != vec.size:
        raise LinalgError(f"vector of length {vec.size} is not a vectorized square matrix")
    return vec.reshape((dim, dim), order="F")


def vectorize_stack(ms: np.ndarray) -> np.ndarray:
    """
    Vectorize a stack of matrices of shape (k, d, d) into rows of shape (k, d²).
    """
    k, d, _ = ms.shape
    return np.ascontiguousarray(ms.transpose(0, 2, 1)).reshape(k, d * d)


def devectorize_stack(rows: np.ndarray, dim: int) -> np.ndarray:
    """
    Inverse of vectorize_stack.
    """
    k = rows.shape[0]
    return rows.reshape(k, dim, dim).transpose(0, 2, 1)


def hermitize(m: np.ndarray) -> np.ndarray:
    """
    Hermitian part (m + m†)/2; works on stacks of matrices.
    """
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))


def expm_dense(a: Any, cutoff: Optional[int] = None) -> np.ndarray:
    """
    Materialized matrix exponential (scaling and squaring with Padé approximation).

    Args:
        a: n×n matrix
        cutoff: Largest n accepted (default: settings.dense_cutoff)

    Returns:
        e^a as an n×n complex array

    Raises:
        LinalgError: non-square input, size above the cutoff, or non-finite entries
    """
    arr = as_complex_matrix(a)
    cutoff = cutoff or settings.dense_cutoff
    if arr.shape[0] != arr.shape[1]:
        raise LinalgError(f"expm_dense expects a square matrix, got shape {arr.shape}")
    if arr.shape[0] > cutoff:
        raise LinalgError(
            f"matrix of size {arr.shape[0]} exceeds the dense cutoff {cutoff}; use expm_action",
            size=arr.shape[0],
            cutoff=cutoff,
        )
    if not np.all(np.isfinite(arr)):
        raise LinalgError("expm_dense input has non-finite entries")
    return scipy.linalg.expm(arr)


def as_operator(gen: Any) -> LinearOperator:
    """
    View a generator as a LinearOperator.

    Accepts anything exposing as_linear_operator() (superoperators, block
    generators), a dense array, or an existing LinearOperator.
    """
    if hasattr(gen, "as_linear_operator"):
        return gen.as_linear_operator()
    if isinstance(gen, LinearOperator):
        return gen
    return aslinearoperator(as_complex_matrix(gen, name="generator"))


def _norm_estimate(op: LinearOperator, n: int) -> float:
    # Cheap lower estimate of the operator 2-norm from a few fixed probe vectors
    rng = np.random.default_rng(12345)
    best = 0.0
    for _ in range(3):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x /= np.linalg.norm(x)
        best = max(best, float(np.linalg.norm(op.matvec(x))))
    return best


def _arnoldi(op: LinearOperator, v1: np.ndarray, m_max: int, breakdown: float):
    """
    Arnoldi process with modified Gram-Schmidt.

    Returns (V, H, m, happy, avnorm): V has m (+1 unless happy) orthonormal
    columns, H is the (m+2)×(m+2) Hessenberg work matrix.
    """
    n = v1.size
    V = np.zeros((n, m_max + 1), dtype=np.complex128)
    H = np.zeros((m_max + 2, m_max + 2), dtype=np.complex128)
    V[:, 0] = v1
    for j in range(m_max):
        w = op.matvec(V[:, j])
        for i in range(j + 1):
            H[i, j] = np.vdot(V[:, i], w)
            w = w - H[i, j] * V[:, i]
        h = float(np.linalg.norm(w))
        if h <= breakdown:
            return V, H, j + 1, True, 0.0
        H[j + 1, j] = h
        V[:, j + 1] = w / h
    avnorm = float(np.linalg.norm(op.matvec(V[:, m_max])))
    return V, H, m_max, False, avnorm


def expm_action(
    gen: Any,
    v: Any,
    t: float,
    tol: Optional[float] = None,
    *,
    max_dim: Optional[int] = None,
    max_substeps: Optional[int] = None,
) -> np.ndarray:
    """
    Approximate e^{t·gen} v without materializing the exponential.

    Arnoldi projection with adaptive sub-stepping: each sub-step builds one
    Krylov basis and halves the step until the a-posteriori error estimate
    fits the share tol·‖v‖·tau/t of the error budget.

    Args:
        gen: Superoperator, block generator, dense matrix or LinearOperator
        v: Input vector
        t: Duration (t >= 0)
        tol: Absolute 2-norm tolerance relative to ‖v‖ (default: settings.krylov_tol)
        max_dim: Maximum Krylov dimension (default: settings.krylov_max_dim)
        max_substeps: Sub-step budget (default: settings.krylov_max_substeps)

    Returns:
        The propagated vector

    Raises:
        LinalgError: invalid arguments
        KrylovConvergenceError: tolerance not met within the sub-step budget
    """
    tol = settings.krylov_tol if tol is None else tol
    max_dim = max_dim or settings.krylov_max_dim
    max_substeps = max_substeps or settings.krylov_max_substeps
    if not t >= 0 or not math.isfinite(t):
        raise LinalgError(f"expm_action needs a finite t >= 0, got {t}")
    if not tol > 0:
        raise LinalgError(f"expm_action needs tol > 0, got {tol}")

    vec = np.array(v, dtype=np.complex128).ravel()
    if t == 0:
        return vec
    op = as_operator(gen)
    n = op.shape[0]
    if op.shape[1] != n or vec.size != n:
        raise LinalgError(f"generator of shape {op.shape} cannot act on a vector of length {vec.size}")

    beta0 = float(np.linalg.norm(vec))
    if beta0 == 0.0:
        return vec
    anorm = _norm_estimate(op, n)
    if anorm == 0.0:
        return vec
    breakdown = 1e-12 * anorm
    m_max = min(max_dim, n)

    w = vec
    t_done = 0.0
    tau = t
    substeps = 0
    while t - t_done > 1e-14 * t:
        beta = float(np.linalg.norm(w))
        if beta == 0.0:
            return w
        V, H, m, happy, avnorm = _arnoldi(op, w / beta, m_max, breakdown)
        # an invariant subspace makes the projection exact for any step
        tau = t - t_done if happy else min(tau, t - t_done)
        while True:
            substeps += 1
            if substeps > max_substeps:
                raise KrylovConvergenceError(
                    f"expm_action did not converge within {max_substeps} sub-steps",
                    t=t,
                    reached=t_done,
                    tol=tol,
                )
            if happy:
                F = scipy.linalg.expm(tau * H[:m, :m])
                w_next = beta * (V[:, :m] @ F[:, 0])
                err = 0.0
            else:
                Hbar = H[: m + 2, : m + 2].copy()
                Hbar[m + 1, m] = 1.0
                F = scipy.linalg.expm(tau * Hbar)
                err1 = abs(beta * F[m, 0])
                err2 = abs(beta * F[m + 1, 0]) * avnorm
                if err1 > 10.0 * err2:
                    err = err2
                elif err1 > err2:
                    err = err1 * err2 / (err1 - err2)
                else:
                    err = err1
                w_next = beta * (V[:, : m + 1] @ F[: m + 1, 0])
            budget = tol * beta0 * tau / t
            if err <= budget and np.all(np.isfinite(w_next)):
                break
            logger.debug("krylov sub-step rejected: tau=%.3e err=%.3e budget=%.3e", tau, err, budget)
            tau *= 0.5
            if tau <= 1e-14 * t:
                raise KrylovConvergenceError(
                    "expm_action step size underflow",
                    t=t,
                    reached=t_done,
                    tol=tol,
                )
        w = w_next
        t_done += tau
        if err < 0.01 * budget:
            tau *= 2.0
    return w
