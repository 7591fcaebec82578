"""
Quantum trajectory simulation for jump, diffusive and mixed multi-detector models.

Two discretizations of the same SME are available:
- KrausMap: at each step apply the quantum instrument of the step and
  renormalize; click probabilities are traces of the partial maps.
- EulerIto: explicit Euler step of the Itô SME, driven by dN and dW.

Noise for trajectory i is drawn from its own Philox stream keyed by
(master_seed, i), in a fixed order (all jump uniforms, then all Gaussian
increments), so a trajectory does not depend on which batch or worker ran it.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from sme_correlate.config import settings
from sme_correlate.core.linalg import devectorize, expm_action, hermitize, vectorize
from sme_correlate.errors import TrajectoryError
from sme_correlate.models.detector import Detector, DetectorKind
from sme_correlate.models.quantum_model import DensityMatrix, QuantumModel, check_state
from sme_correlate.schemas.grid import TimeGrid
from sme_correlate.services.superops import diffusive_backaction, jump_backaction, lindbladian

logger = logging.getLogger(__name__)


class Scheme(str, Enum):
    KRAUS_MAP = "kraus"
    EULER_ITO = "euler"


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """
    Signal increments dY per detector and grid step.

    Attributes:
        grid: Uniform time grid
        labels: Detector labels, one per row of increments
        kinds: Detector kinds, one per row of increments
        increments: Array of shape (n_detectors, n_steps); jump rows hold 0/1 clicks
    """

    grid: TimeGrid
    labels: tuple[str, ...]
    kinds: tuple[DetectorKind, ...]
    increments: np.ndarray

    def __post_init__(self):
        inc = np.asarray(self.increments, dtype=float)
        object.__setattr__(self, "increments", inc)
        object.__setattr__(self, "kinds", tuple(DetectorKind(k) for k in self.kinds))
        if inc.shape != (len(self.labels), self.grid.n_steps) or len(self.kinds) != len(self.labels):
            raise TrajectoryError(
                f"record of shape {inc.shape} does not match {len(self.labels)} detectors "
                f"and {self.grid.n_steps} steps"
            )
        for row, kind, label in zip(inc, self.kinds, self.labels):
            if kind is DetectorKind.JUMP and not np.all((row == 0.0) | (row == 1.0)):
                raise TrajectoryError(f"jump detector '{label}' has increments other than 0 and 1")

    def row(self, label: str) -> np.ndarray:
        try:
            return self.increments[self.labels.index(label)]
        except ValueError:
            raise TrajectoryError(f"record has no detector '{label}'", known=list(self.labels)) from None

    def clicks(self, label: str) -> int:
        return int(self.row(label).sum())

    def __repr__(self):
        return f"<MeasurementRecord(detectors={list(self.labels)}, n_steps={self.grid.n_steps})>"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    One realization: the record plus optional decimated state snapshots.
    """

    grid: TimeGrid
    record: MeasurementRecord
    seed: int
    index: int = 0
    states: Optional[np.ndarray] = None
    state_times: Optional[np.ndarray] = None

    def __repr__(self):
        stored = 0 if self.states is None else len(self.states)
        return f"<Trajectory(seed={self.seed}, index={self.index}, states={stored})>"


@dataclass(frozen=True, eq=False)
class BatchResult:
    """
    Output of simulate_batch.

    Attributes:
        indices: Trajectory indices in batch order
        increments: (batch, n_detectors, n_steps)
        states: (batch, n_stored, d, d) snapshots, or None
        state_times: Times of the snapshots, or None
    """

    indices: tuple[int, ...]
    increments: np.ndarray
    states: Optional[np.ndarray] = None
    state_times: Optional[np.ndarray] = None


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """
    Independent counter-based stream for trajectory `index` of an ensemble.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(index,))))


def _dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def _real_trace(m: np.ndarray) -> np.ndarray:
    return np.real(np.trace(m, axis1=-2, axis2=-1))


class _Stepper:
    """
    Precomputed per-step operators for one (model, dt) pair.
    """

    def __init__(self, model: QuantumModel, dt: float):
        self.model = model
        self.dt = dt
        self.dim = model.dim
        self.jump = [(i, d) for i, d in enumerate(model.detectors) if d.is_jump]
        self.diff = [(i, d) for i, d in enumerate(model.detectors) if not d.is_jump]
        eye = np.eye(model.dim, dtype=np.complex128)
        k = -1j * model.hamiltonian
        for det in model.detectors:
            k = k - 0.5 * (_dag(det.operator) @ det.operator)
        self.m0 = eye + k * dt
        self.no_click_factor = math.prod(1.0 - d.theta * dt for _, d in self.jump)
        self._lindbladian = None
        self.cap = settings.jump_probability_cap
        self.cap_warned = False

    @property
    def lindbladian(self):
        if self._lindbladian is None:
            self._lindbladian = lindbladian(self.model)
        return self._lindbladian

    def warn_cap(self, p: np.ndarray) -> None:
        if not self.cap_warned and p.size and float(np.max(p)) > self.cap:
            self.cap_warned = True
            logger.warning(
                "per-step jump probability %.3g exceeds %.3g; reduce dt for an accurate discretization",
                float(np.max(p)),
                self.cap,
            )

    def diffusive_means(self, rho: np.ndarray) -> np.ndarray:
        """
        √η Tr[(L+L†)ρ] per diffusive detector, shape (batch, n_diff).
        """
        out = np.empty((rho.shape[0], len(self.diff)))
        for k, (_, det) in enumerate(self.diff):
            out[:, k] = 2.0 * np.sqrt(det.eta) * np.real(np.trace(det.operator @ rho, axis1=-2, axis2=-1))
        return out

    def instrument(self, rho: np.ndarray, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """
        Unnormalized post-measurement states for one step.

        Args:
            rho: (batch, d, d) states
            r: (batch, n_diff) diffusive results

        Returns:
            (no-click state (batch, d, d), click states (n_jump, batch, d, d))
        """
        dt = self.dt
        m = np.broadcast_to(self.m0, rho.shape).copy()
        for k, (_, det) in enumerate(self.diff):
            m += (np.sqrt(det.eta) * r[:, k])[:, None, None] * det.operator
        base = m @ rho @ _dag(m)
        no_click = self.no_click_factor * base
        for _, det in self.diff:
            if det.eta < 1.0:
                no_click = no_click + (1.0 - det.eta) * dt * (det.operator @ rho @ _dag(det.operator))
        clicks = np.empty((len(self.jump),) + rho.shape, dtype=np.complex128)
        for k, (_, det) in enumerate(self.jump):
            vrv = dt * (det.operator @ rho @ _dag(det.operator))
            no_click = no_click + (1.0 - det.eta) * vrv
            clicks[k] = det.theta * dt * base + det.eta * vrv
        return no_click, clicks

    def further_click(self, det: Detector, state: np.ndarray) -> np.ndarray:
        # additional click of another detector within the same step
        dt = self.dt
        return det.theta * dt * (self.m0 @ state @ _dag(self.m0)) + det.eta * dt * (
            det.operator @ state @ _dag(det.operator)
        )

    def resolve(self, no_click: np.ndarray, clicks: np.ndarray, fired: np.ndarray) -> np.ndarray:
        """
        Pick the unnormalized state matching the click pattern `fired` (batch, n_jump).
        """
        out = no_click.copy()
        if not self.jump:
            return out
        n_fired = fired.sum(axis=1)
        first = np.argmax(fired, axis=1)
        single = n_fired >= 1
        if np.any(single):
            rows = np.nonzero(single)[0]
            out[rows] = clicks[first[rows], rows]
        for b in np.nonzero(n_fired > 1)[0]:
            state = out[b]
            for k in np.nonzero(fired[b])[0][1:]:
                state = self.further_click(self.jump[k][1], state)
            out[b] = state
        return out

    def kraus_step(self, rho: np.ndarray, u: np.ndarray, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        b = rho.shape[0]
        incr = np.empty((b, len(self.model.detectors)))
        r = self.diffusive_means(rho) * self.dt + np.sqrt(self.dt) * xi
        for k, (i, _) in enumerate(self.diff):
            incr[:, i] = r[:, k]
        no_click, clicks = self.instrument(rho, r)
        p = _real_trace(clicks).T if self.jump else np.zeros((b, 0))
        self.warn_cap(p)
        fired = u < p
        for k, (i, _) in enumerate(self.jump):
            incr[:, i] = fired[:, k]
        return self.resolve(no_click, clicks, fired), incr

    def euler_step(self, rho: np.ndarray, u: np.ndarray, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dt = self.dt
        b = rho.shape[0]
        incr = np.empty((b, len(self.model.detectors)))
        new = rho + self.lindbladian.apply(rho) * dt
        probs = np.empty((b, len(self.jump)))
        for k, (i, det) in enumerate(self.jump):
            back, rate = jump_backaction(det, rho)
            p = rate * dt
            probs[:, k] = p
            dn = (u[:, k] < p).astype(float)
            incr[:, i] = dn
            new = new + back * (dn - p)[:, None, None]
        self.warn_cap(probs)
        means = self.diffusive_means(rho)
        for k, (i, det) in enumerate(self.diff):
            dw = np.sqrt(dt) * xi[:, k]
            incr[:, i] = means[:, k] * dt + dw
            new = new + np.sqrt(det.eta) * diffusive_backaction(det.operator, rho) * dw[:, None, None]
        return new, incr


def _draw_noise(
    master_seed: int, indices: Sequence[int], n_steps: int, n_jump: int, n_diff: int
) -> tuple[np.ndarray, np.ndarray]:
    uniforms = np.empty((len(indices), n_steps, n_jump))
    normals = np.empty((len(indices), n_steps, n_diff))
    for b, index in enumerate(indices):
        rng = trajectory_rng(master_seed, index)
        uniforms[b] = rng.random((n_steps, n_jump))
        normals[b] = rng.standard_normal((n_steps, n_diff))
    return uniforms, normals


def _renormalize(rho: np.ndarray, indices: Sequence[int], step: int) -> np.ndarray:
    rho = hermitize(rho)
    tr = _real_trace(rho)
    bad = ~np.isfinite(tr) | (tr <= 0) | ~np.all(np.isfinite(rho), axis=(1, 2))
    if np.any(bad):
        b = int(np.nonzero(bad)[0][0])
        raise TrajectoryError(
            f"trajectory {indices[b]} became non-finite or lost its trace at step {step}",
            index=int(indices[b]),
            step=step,
        )
    return rho / tr[:, None, None]


def _check_eigenvalues(rho: np.ndarray, indices: Sequence[int], step: int) -> None:
    floor = settings.negative_eigenvalue_abort
    lowest = np.linalg.eigvalsh(rho)[:, 0]
    if np.any(lowest < floor):
        b = int(np.argmin(lowest))
        raise TrajectoryError(
            f"trajectory {indices[b]} has eigenvalue {lowest[b]:.3e} below {floor:g} at step {step}; reduce dt",
            index=int(indices[b]),
            step=step,
            eigenvalue=float(lowest[b]),
        )


def _clip(rho: np.ndarray) -> np.ndarray:
    """
    Project snapshots onto the PSD cone and renormalize.
    """
    w, v = np.linalg.eigh(rho)
    if np.all(w >= 0):
        return rho
    logger.debug("clipping snapshot eigenvalues down to %.3e", float(w.min()))
    w = np.clip(w, 0.0, None)
    out = (v * w[..., None, :]) @ _dag(v)
    return out / _real_trace(out)[..., None, None]


def simulate_batch(
    model: QuantumModel,
    rho0: DensityMatrix,
    grid: TimeGrid,
    master_seed: int,
    indices: Iterable[int],
    scheme: Union[Scheme, str] = Scheme.KRAUS_MAP,
    store_stride: Optional[int] = None,
) -> BatchResult:
    """
    Simulate several trajectories at once, vectorized over the batch.

    Args:
        model: Validated model
        rho0: Initial state
        grid: Time grid
        master_seed: Ensemble seed
        indices: Trajectory indices; index i always uses the stream (master_seed, i)
        scheme: KrausMap or EulerIto
        store_stride: Keep every k-th state (including the initial one); None stores nothing

    Returns:
        BatchResult with increments of shape (batch, n_detectors, n_steps)

    Raises:
        TrajectoryError: NaN, lost trace or a negative eigenvalue below the abort threshold
    """
    scheme = Scheme(scheme)
    indices = tuple(int(i) for i in indices)
    if not indices:
        raise TrajectoryError("simulate_batch needs at least one trajectory index")
    if rho0.dim != model.dim:
        raise TrajectoryError(f"initial state dimension {rho0.dim} does not match model dimension {model.dim}")
    if store_stride is not None and store_stride < 1:
        raise TrajectoryError(f"store_stride must be >= 1, got {store_stride}")

    stepper = _Stepper(model, grid.dt)
    n_steps = grid.n_steps
    uniforms, normals = _draw_noise(master_seed, indices, n_steps, len(stepper.jump), len(stepper.diff))
    step_fn = stepper.kraus_step if scheme is Scheme.KRAUS_MAP else stepper.euler_step

    b = len(indices)
    rho = np.broadcast_to(rho0.matrix, (b, model.dim, model.dim)).copy()
    increments = np.empty((b, len(model.detectors), n_steps))
    snapshots = [rho.copy()] if store_stride else None
    stride = settings.eigen_check_stride

    for k in range(n_steps):
        rho, incr = step_fn(rho, uniforms[:, k, :], normals[:, k, :])
        increments[:, :, k] = incr
        rho = _renormalize(rho, indices, k + 1)
        if (k + 1) % stride == 0 or k + 1 == n_steps:
            _check_eigenvalues(rho, indices, k + 1)
        if store_stride and (k + 1) % store_stride == 0:
            snapshots.append(rho.copy())

    states = state_times = None
    if store_stride:
        states = _clip(np.stack(snapshots, axis=1))
        state_times = grid.t0 + grid.dt * np.arange(0, n_steps + 1, store_stride)
    return BatchResult(indices=indices, increments=increments, states=states, state_times=state_times)


def simulate(
    model: QuantumModel,
    rho0: DensityMatrix,
    grid: TimeGrid,
    seed: int,
    scheme: Union[Scheme, str] = Scheme.KRAUS_MAP,
    index: int = 0,
    store_stride: Optional[int] = None,
) -> Trajectory:
    """
    Simulate one trajectory.

    Identical (model, rho0, grid, seed, scheme, index) inputs give a bit-identical Trajectory.
    """
    batch = simulate_batch(model, rho0, grid, seed, [index], scheme, store_stride)
    record = MeasurementRecord(
        grid=grid,
        labels=model.labels,
        kinds=tuple(d.kind for d in model.detectors),
        increments=batch.increments[0],
    )
    states = None if batch.states is None else batch.states[0]
    return Trajectory(grid, record, seed, index, states, batch.state_times)


def records_from_batch(model: QuantumModel, grid: TimeGrid, batch: BatchResult) -> list[MeasurementRecord]:
    kinds = tuple(d.kind for d in model.detectors)
    return [MeasurementRecord(grid, model.labels, kinds, inc) for inc in batch.increments]


def jump_probabilities(model: QuantumModel, rho: DensityMatrix, dt: float) -> np.ndarray:
    """
    Click probability of each jump detector for one KrausMap step from rho
    (diffusive results set to zero).
    """
    stepper = _Stepper(model, dt)
    _, clicks = stepper.instrument(rho.matrix[None], np.zeros((1, len(stepper.diff))))
    return _real_trace(clicks)[:, 0]


def unconditioned_evolve(
    model: QuantumModel, rho0: DensityMatrix, t: float, tol: Optional[float] = None
) -> DensityMatrix:
    """
    Average state e^{t𝓛}(ρ0), propagated with expm_action.

    Raises:
        TrajectoryError: negative t
        KrylovConvergenceError: propagation did not converge
    """
    if not t >= 0:
        raise TrajectoryError(f"unconditioned_evolve needs t >= 0, got {t}")
    if t == 0:
        return DensityMatrix(rho0.matrix.copy())
    v = expm_action(lindbladian(model), vectorize(rho0.matrix), t, tol)
    rho = hermitize(devectorize(v))
    rho = rho / np.real(np.trace(rho))
    out = DensityMatrix(rho)
    violations = check_state(out, model.dim, prefix="unconditioned state")
    if violations:
        raise TrajectoryError("; ".join(str(v) for v in violations))
    return out


def record_log_likelihood(model: QuantumModel, rho0: DensityMatrix, record: MeasurementRecord) -> float:
    """
    Log-probability of a record under the KrausMap instrument of its grid.

    Jump detectors contribute log Pr[click pattern]; diffusive results
    contribute the log-density with respect to the Gaussian reference
    measure of variance dt. Accumulated as a sum of per-step log traces.

    Raises:
        TrajectoryError: detectors of the record do not match the model
    """
    if record.labels != model.labels:
        raise TrajectoryError(
            f"record detectors {list(record.labels)} do not match model detectors {list(model.labels)}"
        )
    stepper = _Stepper(model, record.grid.dt)
    jump_rows = np.array([i for i, _ in stepper.jump], dtype=int)
    diff_rows = np.array([i for i, _ in stepper.diff], dtype=int)
    rho = rho0.matrix[None].copy()
    total = 0.0
    for k in range(record.grid.n_steps):
        column = record.increments[:, k]
        r = column[diff_rows][None, :] if diff_rows.size else np.zeros((1, 0))
        fired = (column[jump_rows] == 1.0)[None, :] if jump_rows.size else np.zeros((1, 0), dtype=bool)
        no_click, clicks = stepper.instrument(rho, r)
        state = stepper.resolve(no_click, clicks, fired)
        tr = float(_real_trace(state)[0])
        if tr <= 0.0:
            return -math.inf
        total += math.log(tr)
        rho = hermitize(state) / tr
    return total


def write_record_csv(path: Union[str, Path], record: MeasurementRecord) -> Path:
    """
    Export a record as CSV with columns step, time, detector_label, increment.

    Floats are written with repr so that a fixed-seed run reproduces the file byte for byte.
    """
    p = Path(path)
    times = record.grid.times()
    with p.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "time", "detector_label", "increment"])
        for k in range(record.grid.n_steps):
            for j, label in enumerate(record.labels):
                writer.writerow([k, repr(float(times[k])), label, repr(float(record.increments[j, k]))])
    return p


def read_record_csv(path: Union[str, Path], model: QuantumModel, grid: TimeGrid) -> MeasurementRecord:
    """
    Load a record written by write_record_csv.
    """
    inc = np.zeros((len(model.detectors), grid.n_steps))
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            inc[model.index_of(row["detector_label"]), int(row["step"])] = float(row["increment"])
    return MeasurementRecord(grid, model.labels, tuple(d.kind for d in model.detectors), inc)
