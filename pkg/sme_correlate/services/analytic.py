"""
Exact correlation functions of the measurement signal.

Sharp correlations alternate Lindblad propagation with insertion
superoperators and take a trace. Filtered correlations integrate the
subset-indexed fictitious states ρ^(S), S ⊆ {1..n}:

    dρ^(S)/dt = 𝓛ρ^(S) + Σ_{∅≠T⊆S} c_T(t) 𝒜_T ρ^(S∖T),   ρ^(∅)(0) = ρ0,

whose full-set block has trace C_{f1..fn}. For a diffusive detector the
non-zero couplings are singletons (f_i·√η L₊) and same-detector pairs
(f_i f_k·I); for a jump detector every same-detector subset couples through
(Π f_i)(θI + ηV×). Legs on different detectors never couple directly.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.sparse.linalg import LinearOperator

from sme_correlate.config import settings
from sme_correlate.core.linalg import devectorize, expm_action, expm_dense, vectorize
from sme_correlate.errors import AnalyticError, ModelError
from sme_correlate.models.detector import Detector
from sme_correlate.models.quantum_model import DensityMatrix, QuantumModel
from sme_correlate.schemas.correlation import (
    CorrelationMethod,
    CorrelationResult,
    Diagnostics,
    MonteCarloEstimate,
    Rect,
    SharpPoint,
    WindowFilter,
)
from sme_correlate.schemas.grid import TimeGrid
from sme_correlate.services.superops import (
    Superoperator,
    deformed_generator,
    identity_map,
    insertion,
    lindbladian,
)
from sme_correlate.services.trajectories import MeasurementRecord

logger = logging.getLogger(__name__)

BOUNDARY_MERGE = 1e-14


def _detector(model: QuantumModel, label: str) -> Detector:
    try:
        return model.detector(label)
    except ModelError as exc:
        raise AnalyticError(str(exc), **exc.detail) from None


def _result(value: float, order: int, method: CorrelationMethod, diagnostics: Diagnostics) -> CorrelationResult:
    if not math.isfinite(value):
        raise AnalyticError(
            f"{method.value} correlation of order {order} is not finite (got {value!r})",
            method=method.value,
            order=order,
        )
    return CorrelationResult(value=value, order=order, method=method, diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# Sharp signal
# ---------------------------------------------------------------------------


def sharp_correlation(
    model: QuantumModel,
    rho0: DensityMatrix,
    points: Sequence[SharpPoint],
    tol: Optional[float] = None,
) -> CorrelationResult:
    """
    n-point correlation of the sharp signal I_t at distinct times.

    C = Tr[𝒜_n e^{(t_n−t_{n−1})𝓛} … 𝒜_1 e^{t_1𝓛}(ρ0)] with 𝒜 = θI + ηV× for
    jump detectors and √η L₊ for diffusive ones.

    Args:
        model: Validated model
        rho0: Initial state
        points: Legs in any order; sorted by time internally
        tol: Krylov tolerance (default: settings.krylov_tol)

    Raises:
        AnalyticError: no points, too many points, duplicate times, unknown detector or a non-finite value
    """
    tol = settings.krylov_tol if tol is None else tol
    n = len(points)
    if n == 0:
        raise AnalyticError("sharp_correlation needs at least one point")
    if n > settings.max_sharp_points:
        raise AnalyticError(
            f"{n} sharp points exceed the configured cap of {settings.max_sharp_points}",
            n=n,
            cap=settings.max_sharp_points,
        )
    ordered = sorted(points, key=lambda p: p.time)
    for a, b in zip(ordered, ordered[1:]):
        if a.time == b.time:
            raise AnalyticError(
                f"equal-time sharp correlation at t={a.time} is singular; use windows instead",
                time=a.time,
            )
    inserts = [insertion(_detector(model, p.detector)) for p in ordered]

    gen = lindbladian(model)
    v = vectorize(rho0.matrix)
    t_prev = 0.0
    for point, ins in zip(ordered, inserts):
        v = expm_action(gen, v, point.time - t_prev, tol)
        v = ins.matvec(v)
        t_prev = point.time
    value = float(np.real(np.trace(devectorize(v))))
    return _result(value, n, CorrelationMethod.SHARP_INSERTION, Diagnostics(steps=n, tolerance=tol))


# ---------------------------------------------------------------------------
# Fictitious-state block system
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Coupling:
    """
    Coupling of block S∖T into block S for every S ⊇ T.
    """

    mask: int
    legs: tuple[int, ...]
    op: Superoperator


def _couplings(model: QuantumModel, windows: Sequence[WindowFilter]) -> list[Coupling]:
    n = len(windows)
    dets = [_detector(model, w.detector) for w in windows]
    inserts: dict[str, Superoperator] = {}
    ident = identity_map(model.dim)
    out: list[Coupling] = []
    for mask in range(1, 1 << n):
        legs = tuple(i for i in range(n) if mask >> i & 1)
        labels = {dets[i].label for i in legs}
        if len(labels) != 1:
            continue
        det = dets[legs[0]]
        if det.is_jump:
            op = inserts.setdefault(det.label, insertion(det))
        elif len(legs) == 1:
            op = inserts.setdefault(det.label, insertion(det))
        elif len(legs) == 2:
            op = ident
        else:
            continue
        out.append(Coupling(mask, legs, op))
    return out


class FictitiousGenerator:
    """
    Block-lower-triangular generator acting on 2ⁿ stacked vectorized states.

    The coupling coefficients c_T = Π_{i∈T} f_i(t) are set per evaluation
    time through with_filter_values().
    """

    def __init__(self, gen: Superoperator, couplings: Sequence[Coupling], n_legs: int):
        self.gen = gen
        self.couplings = list(couplings)
        self.n_legs = n_legs
        self.n_blocks = 1 << n_legs
        self.block = gen.liouville_dim
        self.values = np.zeros(n_legs)
        # rows S ⊇ T and their sources S∖T, per coupling
        self._rows = []
        for c in self.couplings:
            rows = np.array([s for s in range(self.n_blocks) if s & c.mask == c.mask], dtype=int)
            self._rows.append((rows, rows ^ c.mask))

    def with_filter_values(self, values: Sequence[float]) -> "FictitiousGenerator":
        self.values = np.asarray(values, dtype=float)
        return self

    def coefficient(self, coupling: Coupling) -> float:
        return float(np.prod(self.values[list(coupling.legs)]))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128).reshape(self.n_blocks, self.block)
        out = self.gen.apply_vectors(x)
        for c, (rows, src) in zip(self.couplings, self._rows):
            coef = self.coefficient(c)
            if coef != 0.0:
                out[rows] += coef * c.op.apply_vectors(x[src])
        return out.ravel()

    def as_linear_operator(self) -> LinearOperator:
        n = self.n_blocks * self.block
        return LinearOperator((n, n), matvec=self.matvec, dtype=np.complex128)


def _check_windows(model: QuantumModel, windows: Sequence[WindowFilter], horizon: Optional[float]) -> float:
    n = len(windows)
    if n == 0:
        raise AnalyticError("filtered_correlation needs at least one window")
    if n > settings.max_filtered_legs:
        raise AnalyticError(
            f"{n} filtered legs exceed the configured cap of {settings.max_filtered_legs}",
            n=n,
            cap=settings.max_filtered_legs,
        )
    for w in windows:
        _detector(model, w.detector)
    last = max(w.support[1] for w in windows)
    if horizon is None:
        return last
    if not horizon >= last:
        raise AnalyticError(
            f"window support ends at {last}, beyond the horizon {horizon}",
            support_end=last,
            horizon=horizon,
        )
    return horizon


def _breakpoints(windows: Sequence[WindowFilter], t_end: float) -> list[float]:
    raw = {0.0, t_end}
    for w in windows:
        if isinstance(w.shape, Rect):
            raw.update(w.support)
        else:
            raw.update(float(t) for t in w.shape.breakpoints)
    pts: list[float] = []
    for t in sorted(raw):
        if 0.0 <= t <= t_end and (not pts or t - pts[-1] > BOUNDARY_MERGE):
            pts.append(t)
    if pts[-1] < t_end:
        pts[-1] = t_end
    return pts


@dataclass
class _BlockRun:
    state: np.ndarray
    segments: int
    steps: int
    method: CorrelationMethod


def _segment_value(w: WindowFilter, t: float, mid: float) -> float:
    # filters are continuous inside a segment; edges and knots are segment boundaries
    if not w.support[0] <= mid < w.support[1]:
        return 0.0
    return 1.0 if w.is_rect else float(w.evaluate(t))


def _integrate_blocks(
    model: QuantumModel,
    rho0: DensityMatrix,
    windows: Sequence[WindowFilter],
    t_end: float,
    tol: float,
    rtol: float,
    atol: float,
) -> _BlockRun:
    n = len(windows)
    gen = FictitiousGenerator(lindbladian(model), _couplings(model, windows), n)
    x = np.zeros((gen.n_blocks, gen.block), dtype=np.complex128)
    x[0] = vectorize(rho0.matrix)
    x = x.ravel()
    pts = _breakpoints(windows, t_end)
    all_rect = all(w.is_rect for w in windows)
    segments = steps = 0
    for a, b in zip(pts, pts[1:]):
        mid = 0.5 * (a + b)
        rect_values = np.array([_segment_value(w, mid, mid) if w.is_rect else 0.0 for w in windows], dtype=float)
        if all_rect:
            gen.with_filter_values(rect_values)
            x = expm_action(gen, x, b - a, tol)
            segments += 1
            continue
        sampled = [i for i, w in enumerate(windows) if not w.is_rect]

        def rhs(t, y, rect_values=rect_values, sampled=sampled, mid=mid):
            values = rect_values.copy()
            for i in sampled:
                values[i] = _segment_value(windows[i], t, mid)
            return gen.with_filter_values(values).matvec(y)

        sol = solve_ivp(rhs, (a, b), x, method="DOP853", rtol=rtol, atol=atol)
        if sol.status < 0:
            raise AnalyticError(f"Runge-Kutta integration failed on [{a}, {b}]: {sol.message}")
        x = sol.y[:, -1]
        segments += 1
        steps += len(sol.t) - 1
    method = CorrelationMethod.ODE_PIECEWISE if all_rect else CorrelationMethod.ODE_RUNGE_KUTTA
    return _BlockRun(x.reshape(gen.n_blocks, gen.block), segments, steps, method)


def fictitious_states(
    model: QuantumModel,
    rho0: DensityMatrix,
    windows: Sequence[WindowFilter],
    horizon: Optional[float] = None,
    tol: Optional[float] = None,
) -> np.ndarray:
    """
    All 2ⁿ fictitious states at the horizon, shape (2ⁿ, d, d), ordered by subset bitmask.

    Block 0 is the unconditioned state e^{T𝓛}(ρ0).
    """
    t_end = _check_windows(model, windows, horizon)
    run = _integrate_blocks(
        model,
        rho0,
        windows,
        t_end,
        settings.krylov_tol if tol is None else tol,
        settings.rk_rtol,
        settings.rk_atol,
    )
    return np.stack([devectorize(row) for row in run.state])


def filtered_correlation(
    model: QuantumModel,
    rho0: DensityMatrix,
    windows: Sequence[WindowFilter],
    horizon: Optional[float] = None,
    tol: Optional[float] = None,
    rtol: Optional[float] = None,
) -> CorrelationResult:
    """
    Correlation C_{f1..fn} = E[I_{f1} … I_{fn}] of filtered signals.

    Rect-only requests are integrated by exact exponentiation over the
    segments between window boundaries; Sampled filters fall back to an
    adaptive DOP853 Runge-Kutta integration split at their knots. Evolution
    after the last window support is trace preserving and is skipped, so
    the result does not depend on the horizon.

    Args:
        model: Validated model
        rho0: Initial state
        windows: One filter per leg, in any order
        horizon: Integration horizon T (default: end of the last support)
        tol: Krylov tolerance (default: settings.krylov_tol)
        rtol: Runge-Kutta relative tolerance (default: settings.rk_rtol)

    Returns:
        CorrelationResult with method OdePiecewise or OdeRungeKutta

    Raises:
        AnalyticError: support beyond the horizon, too many legs, unknown detector
        KrylovConvergenceError: a segment did not converge
    """
    _check_windows(model, windows, horizon)
    tol = settings.krylov_tol if tol is None else tol
    rtol = settings.rk_rtol if rtol is None else rtol
    t_last = max(w.support[1] for w in windows)
    run = _integrate_blocks(model, rho0, windows, t_last, tol, rtol, settings.rk_atol)
    value = float(np.real(np.trace(devectorize(run.state[-1]))))
    unconditioned = float(np.real(np.trace(devectorize(run.state[0]))))
    logger.debug("filtered correlation n=%d: %d segments, value=%.12g", len(windows), run.segments, value)
    return _result(
        value,
        len(windows),
        run.method,
        Diagnostics(
            segments=run.segments,
            steps=run.steps or None,
            tolerance=tol if run.method is CorrelationMethod.ODE_PIECEWISE else rtol,
            unconditioned_trace=unconditioned,
        ),
    )


# ---------------------------------------------------------------------------
# Quadrature oracle
# ---------------------------------------------------------------------------


class _DenseRoute:
    """
    Dense propagators and trace functionals for the quadrature oracle.
    """

    def __init__(self, model: QuantumModel, rho0: DensityMatrix):
        self.lmat = lindbladian(model).matrix
        self.v0 = vectorize(rho0.matrix)
        self.trace_row = vectorize(np.eye(model.dim))
        self.evaluations = 0
        # quadrature revisits the same outer nodes once per inner integral
        self.propagator = lru_cache(maxsize=settings.quad_propagator_cache)(self._propagator)

    def _propagator(self, t: float) -> np.ndarray:
        return expm_dense(t * self.lmat)

    def propagate(self, v: np.ndarray, t: float) -> np.ndarray:
        return self.propagator(t) @ v

    def pair(self, first: Superoperator, s: float, second: Superoperator, t: float) -> float:
        # s <= t
        self.evaluations += 1
        v = self.propagate(first.matrix @ self.propagate(self.v0, s), t - s)
        return float(np.real(self.trace_row @ (second.matrix @ v)))

    def single(self, ins: Superoperator, t: float) -> float:
        self.evaluations += 1
        return float(np.real(self.trace_row @ (ins.matrix @ self.propagate(self.v0, t))))


def _quad(fn, a: float, b: float, tol: float, points: Optional[list[float]] = None) -> float:
    if not b > a:
        return 0.0
    inner = [p for p in (points or []) if a < p < b] or None
    value, _ = quad(fn, a, b, epsabs=tol, epsrel=tol, limit=settings.quad_limit, points=inner)
    return value


def quadrature_correlation(
    model: QuantumModel,
    rho0: DensityMatrix,
    windows: Sequence[WindowFilter],
    tol: Optional[float] = None,
) -> CorrelationResult:
    """
    Two-point filtered correlation by nested adaptive quadrature.

    ∫_{Ω1}∫_{Ω2} C_{t1,t2} dt1 dt2 over both time orderings, plus the
    equal-time overlap term: |Ω1∩Ω2| for one diffusive detector,
    ∫_{Ω1∩Ω2}(θ + ηTr[Vρ̄_tV†])dt for one jump detector, zero across detectors.

    Raises:
        AnalyticError: n ≠ 2, non-Rect windows, or quadrature did not reach tol
    """
    tol = settings.quad_tol if tol is None else tol
    if len(windows) != 2:
        raise AnalyticError(f"quadrature_correlation supports exactly two windows, got {len(windows)}")
    if not all(w.is_rect for w in windows):
        raise AnalyticError("quadrature_correlation supports Rect windows only")
    w1, w2 = windows
    d1, d2 = _detector(model, w1.detector), _detector(model, w2.detector)
    ins1, ins2 = insertion(d1), insertion(d2)
    (a1, b1), (a2, b2) = w1.support, w2.support
    route = _DenseRoute(model, rho0)

    def inner(t1: float) -> float:
        total = _quad(lambda t2: route.pair(ins2, t2, ins1, t1), a2, min(b2, t1), tol)
        total += _quad(lambda t2: route.pair(ins1, t1, ins2, t2), max(a2, t1), b2, tol)
        return total

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value = _quad(inner, a1, b1, tol, points=[a2, b2])
            lo, hi = max(a1, a2), min(b1, b2)
            if d1.label == d2.label and hi > lo:
                if d1.is_jump:
                    value += _quad(lambda t: route.single(ins1, t), lo, hi, tol)
                else:
                    value += hi - lo
        except IntegrationWarning as exc:
            raise AnalyticError(f"quadrature did not reach tolerance {tol}: {exc}", tol=tol) from exc
    return _result(value, 2, CorrelationMethod.QUADRATURE, Diagnostics(steps=route.evaluations, tolerance=tol))


# ---------------------------------------------------------------------------
# Monte Carlo side
# ---------------------------------------------------------------------------


def window_weights(window: WindowFilter, grid: TimeGrid) -> tuple[np.ndarray, float]:
    """
    Per-step weights of a filter on a grid.

    Rect bounds snap to the nearest grid points; Sampled filters are
    evaluated at the left edge of each step.

    Returns:
        (weights of length n_steps, snap distance)
    """
    if isinstance(window.shape, Rect):
        start, end = window.support
        ks = int(np.clip(round((start - grid.t0) / grid.dt), 0, grid.n_steps))
        ke = int(np.clip(round((end - grid.t0) / grid.dt), 0, grid.n_steps))
        weights = np.zeros(grid.n_steps)
        weights[ks:ke] = 1.0
        snap = max(abs(start - (grid.t0 + ks * grid.dt)), abs(end - (grid.t0 + ke * grid.dt)))
        return weights, float(snap)
    return window.evaluate(grid.times()), 0.0


def window_products(
    increments: np.ndarray,
    grid: TimeGrid,
    labels: Sequence[str],
    windows: Sequence[WindowFilter],
) -> tuple[np.ndarray, float]:
    """
    Π_i I_{f_i} per trajectory for increments of shape (N, n_detectors, n_steps).

    Returns:
        (products of length N, largest snap distance)
    """
    labels = list(labels)
    prods = np.ones(increments.shape[0])
    snap = 0.0
    for w in windows:
        if w.detector not in labels:
            raise AnalyticError(f"records have no detector '{w.detector}'", known=labels)
        weights, s = window_weights(w, grid)
        snap = max(snap, s)
        prods = prods * (increments[:, labels.index(w.detector), :] @ weights)
    return prods, snap


def summarize_products(prods: np.ndarray, snap_distance: float = 0.0) -> MonteCarloEstimate:
    """
    Sample mean and standard error with exactly rounded sums, independent of sample order.
    """
    n = int(prods.size)
    if n < 2:
        raise AnalyticError(f"at least 2 samples are required, got {n}")
    values = [float(x) for x in prods]
    mean = math.fsum(values) / n
    var = math.fsum((x - mean) ** 2 for x in values) / (n - 1)
    return MonteCarloEstimate(estimate=mean, stderr=math.sqrt(var / n), n_samples=n, snap_distance=snap_distance)


def mean_trajectory_correlation(
    records: Sequence[MeasurementRecord], windows: Sequence[WindowFilter]
) -> MonteCarloEstimate:
    """
    Empirical E[I_{f1} … I_{fn}] from an ensemble of records.

    Raises:
        AnalyticError: fewer than 2 records, or records on different grids or detector sets
    """
    if len(records) < 2:
        raise AnalyticError(f"at least 2 records are required, got {len(records)}")
    first = records[0]
    for i, rec in enumerate(records[1:], start=1):
        if rec.grid != first.grid:
            raise AnalyticError(f"record {i} is on a different grid", index=i)
        if rec.labels != first.labels:
            raise AnalyticError(f"record {i} has different detectors", index=i)
    increments = np.stack([rec.increments for rec in records])
    prods, snap = window_products(increments, first.grid, first.labels, windows)
    return summarize_products(prods, snap)


# ---------------------------------------------------------------------------
# Generating functional, binned signals, normalization
# ---------------------------------------------------------------------------


def _tilts(model: QuantumModel, windows: Sequence[WindowFilter], alphas: np.ndarray, t: float, mid: float) -> dict[str, float]:
    j = {label: 0.0 for label in model.labels}
    for w, a in zip(windows, alphas):
        j[w.detector] += float(a) * _segment_value(w, t, mid)
    return j


def generating_functional(
    model: QuantumModel,
    rho0: DensityMatrix,
    windows: Sequence[WindowFilter],
    alphas: Sequence[float],
    tol: Optional[float] = None,
) -> float:
    """
    𝒵 = E[exp(Σ_i α_i I_{f_i})] = Tr[𝒯exp(∫𝓛_{j_u}du)(ρ0)] with j = Σ α_i f_i per detector.

    Mixed α-derivatives at 0 give filtered_correlation; 𝒵(0) = 1.

    Raises:
        AnalyticError: windows and alphas differ in length
    """
    if len(windows) != len(alphas):
        raise AnalyticError(f"{len(windows)} windows but {len(alphas)} alphas")
    t_end = _check_windows(model, windows, None)
    tol = settings.krylov_tol if tol is None else tol
    alphas = np.asarray(alphas, dtype=float)
    v = vectorize(rho0.matrix)
    pts = _breakpoints(windows, t_end)
    if all(w.is_rect for w in windows):
        for a, b in zip(pts, pts[1:]):
            gen = deformed_generator(model, _tilts(model, windows, alphas, 0.5 * (a + b), 0.5 * (a + b)))
            v = expm_action(gen, v, b - a, tol)
        return float(np.real(np.trace(devectorize(v))))

    base = lindbladian(model)
    inserts = {d.label: insertion(d) for d in model.detectors}
    jump = {d.label: d.is_jump for d in model.detectors}

    def rhs(t, y, mid):
        out = base.matvec(y)
        for label, jv in _tilts(model, windows, alphas, t, mid).items():
            if jv == 0.0:
                continue
            if jump[label]:
                out = out + np.expm1(jv) * inserts[label].matvec(y)
            else:
                out = out + jv * inserts[label].matvec(y) + 0.5 * jv * jv * y
        return out

    for a, b in zip(pts, pts[1:]):
        sol = solve_ivp(
            rhs, (a, b), v, method="DOP853", args=(0.5 * (a + b),), rtol=settings.rk_rtol, atol=settings.rk_atol
        )
        if sol.status < 0:
            raise AnalyticError(f"Runge-Kutta integration failed on [{a}, {b}]: {sol.message}")
        v = sol.y[:, -1]
    return float(np.real(np.trace(devectorize(v))))


def binned_correlation_matrix(
    model: QuantumModel,
    rho0: DensityMatrix,
    detector: str,
    bin_width: float,
    n_bins: int,
    t0: float = 0.0,
    tol: Optional[float] = None,
) -> np.ndarray:
    """
    Matrix of E[I_k I_l] for the binned signal I_k = ∫_{t0+kΔt}^{t0+(k+1)Δt} dY.

    Diagonal entries include the equal-time contribution.

    Raises:
        AnalyticError: non-positive bin width or fewer than one bin
    """
    if not bin_width > 0:
        raise AnalyticError(f"bin width must be positive, got {bin_width}")
    if n_bins < 1:
        raise AnalyticError(f"need at least one bin, got {n_bins}")
    _detector(model, detector)
    out = np.empty((n_bins, n_bins))
    edges = t0 + bin_width * np.arange(n_bins + 1)
    for k in range(n_bins):
        wk = WindowFilter.rect(detector, float(edges[k]), float(edges[k + 1]))
        for l in range(k, n_bins):
            wl = WindowFilter.rect(detector, float(edges[l]), float(edges[l + 1]))
            out[k, l] = out[l, k] = filtered_correlation(model, rho0, [wk, wl], tol=tol).value
    return out


def rescale_to_unit_normalization(value: float, etas: Sequence[float]) -> float:
    """
    Convert a correlation of dY to one of dY' = dY/(2√η).

    Args:
        value: Correlation in the standard normalization
        etas: Efficiencies of the diffusive legs (jump legs are left out)
    """
    scale = 1.0
    for eta in etas:
        if not 0 < eta <= 1:
            raise AnalyticError(f"efficiency must satisfy 0 < eta <= 1, got {eta}")
        scale *= 2.0 * math.sqrt(eta)
    return value / scale


def diffusive_leg_etas(model: QuantumModel, legs: Sequence[str]) -> list[float]:
    """
    Efficiencies of the diffusive detectors among the given leg labels.
    """
    return [d.eta for d in (_detector(model, label) for label in legs) if not d.is_jump]
