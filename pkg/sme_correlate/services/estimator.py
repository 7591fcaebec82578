"""
Monte Carlo ensembles and comparisons against the analytic engine.

Trajectories are generated in chunks on a thread pool keyed by trajectory
index; each chunk returns per-trajectory window products, and the collector
reduces them with exactly rounded sums so the report does not depend on
worker count or completion order.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from sme_correlate.config import settings
from sme_correlate.errors import EstimatorError, SmeCorrelateError
from sme_correlate.models.quantum_model import DensityMatrix, QuantumModel
from sme_correlate.schemas.correlation import WindowFilter
from sme_correlate.schemas.ensemble import ComparisonReport, ComparisonSummary, RequestOutcome, z_score
from sme_correlate.schemas.grid import TimeGrid
from sme_correlate.services.analytic import filtered_correlation, summarize_products, window_products
from sme_correlate.services.trajectories import MeasurementRecord, Scheme, simulate_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EnsembleSpec:
    """
    Everything needed to regenerate an ensemble.

    Attributes:
        model: Validated model
        rho0: Initial state
        grid: Simulation grid
        n_traj: Number of trajectories (>= 2)
        master_seed: Seed from which every trajectory stream is derived
        scheme: KrausMap or EulerIto
        model_ref: Model file path or zoo name, echoed in reports
    """

    model: QuantumModel
    rho0: DensityMatrix
    grid: TimeGrid
    n_traj: int
    master_seed: int = 0
    scheme: Scheme = Scheme.KRAUS_MAP
    model_ref: str = "<in-memory>"

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.n_traj < 2:
            raise EstimatorError(f"an ensemble needs n_traj >= 2, got {self.n_traj}")
        if self.rho0.dim != self.model.dim:
            raise EstimatorError(
                f"initial state dimension {self.rho0.dim} does not match model dimension {self.model.dim}"
            )


@dataclass(frozen=True)
class ComparisonRequest:
    id: str
    windows: tuple[WindowFilter, ...] = field(default_factory=tuple)

    @property
    def order(self) -> int:
        return len(self.windows)


def bin_record(record: MeasurementRecord, bin_width: float) -> dict[str, np.ndarray]:
    """
    Binned signal I_k = Σ of the increments falling into bin k, per detector.

    Args:
        record: Measurement record
        bin_width: Bin width Δt, an integer multiple of the grid step

    Returns:
        Mapping detector label -> array of bin sums

    Raises:
        EstimatorError: Δt smaller than the grid step or not an integer multiple of it
    """
    dt = record.grid.dt
    if bin_width < dt * (1 - 1e-9):
        raise EstimatorError(f"bin width {bin_width} is smaller than the grid step {dt}")
    ratio = bin_width / dt
    per_bin = int(round(ratio))
    if abs(ratio - per_bin) > 1e-9 * max(1.0, ratio):
        raise EstimatorError(f"bin width {bin_width} is not an integer multiple of the grid step {dt}")
    n_bins, remainder = divmod(record.grid.n_steps, per_bin)
    if remainder:
        logger.warning("dropping %d trailing steps that do not fill a bin of %d steps", remainder, per_bin)
    used = record.increments[:, : n_bins * per_bin]
    sums = used.reshape(len(record.labels), n_bins, per_bin).sum(axis=2)
    return {label: sums[i] for i, label in enumerate(record.labels)}


def empirical_binned_matrix(
    records: Sequence[MeasurementRecord], detector: str, bin_width: float
) -> tuple[np.ndarray, np.ndarray]:
    """
    Ensemble estimate of E[I_k I_l] for one detector's binned signal.

    Returns:
        (mean matrix, standard-error matrix)
    """
    if len(records) < 2:
        raise EstimatorError(f"at least 2 records are required, got {len(records)}")
    bins = np.stack([bin_record(rec, bin_width)[detector] for rec in records])
    n = bins.shape[0]
    prods = bins[:, :, None] * bins[:, None, :]
    mean = prods.mean(axis=0)
    stderr = prods.std(axis=0, ddof=1) / np.sqrt(n)
    return mean, stderr


def _chunks(n: int, size: int) -> list[range]:
    return [range(start, min(start + size, n)) for start in range(0, n, size)]


def _run_chunk(
    spec: EnsembleSpec, indices: range, requests: Sequence[ComparisonRequest]
) -> tuple[list[np.ndarray], list[float]]:
    batch = simulate_batch(spec.model, spec.rho0, spec.grid, spec.master_seed, indices, spec.scheme)
    prods, snaps = [], []
    for req in requests:
        p, s = window_products(batch.increments, spec.grid, spec.model.labels, req.windows)
        prods.append(p)
        snaps.append(s)
    logger.info("chunk %d-%d done", indices.start, indices.stop - 1)
    return prods, snaps


def run_comparison(
    spec: EnsembleSpec,
    requests: Sequence[ComparisonRequest],
    workers: Optional[int] = None,
    z_threshold: Optional[float] = None,
    chunk_size: Optional[int] = None,
    analytic_model: Optional[QuantumModel] = None,
) -> ComparisonReport:
    """
    Compare analytic filtered correlations against their Monte Carlo estimates.

    Args:
        spec: Ensemble to simulate
        requests: Windows-sets to evaluate on both sides
        workers: Thread pool size (default: settings.threads)
        z_threshold: Pass bound on |z| (default: settings.z_threshold)
        chunk_size: Trajectories per task (default: settings.chunk_size)
        analytic_model: Model for the analytic side, if it should differ from spec.model

    Returns:
        ComparisonReport; a request passes iff |z| <= z_threshold

    Raises:
        EstimatorError: empty request list, or any failure, tagged with the failing request id
    """
    if not requests:
        raise EstimatorError("run_comparison needs at least one request")
    workers = workers or settings.threads
    z_threshold = z_threshold or settings.z_threshold
    chunk_size = chunk_size or settings.chunk_size
    analytic_model = analytic_model or spec.model
    started = time.perf_counter()

    analytic = []
    for req in requests:
        try:
            analytic.append(filtered_correlation(analytic_model, spec.rho0, req.windows))
        except SmeCorrelateError as exc:
            raise EstimatorError(
                f"request '{req.id}': {exc}", request=req.id, cause=type(exc).__name__
            ) from exc

    chunks = _chunks(spec.n_traj, chunk_size)
    try:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda idx: _run_chunk(spec, idx, requests), chunks))
    except SmeCorrelateError as exc:
        raise EstimatorError(f"ensemble simulation failed: {exc}", cause=type(exc).__name__, **exc.detail) from exc

    outcomes = []
    for k, (req, res) in enumerate(zip(requests, analytic)):
        prods = np.concatenate([r[0][k] for r in results])
        snap = max(r[1][k] for r in results)
        est = summarize_products(prods, snap)
        z = z_score(est.estimate, res.value, est.stderr)
        outcomes.append(
            RequestOutcome(
                id=req.id,
                order=req.order,
                analytic=res.value,
                method=res.method,
                estimate=est.estimate,
                stderr=est.stderr,
                z=z,
                passed=abs(z) <= z_threshold,
                snap_distance=snap,
            )
        )

    report = ComparisonReport(
        model_ref=spec.model_ref,
        scheme=spec.scheme.value,
        n_traj=spec.n_traj,
        master_seed=spec.master_seed,
        dt=spec.grid.dt,
        t_end=spec.grid.t_end,
        z_threshold=z_threshold,
        outcomes=outcomes,
        summary=ComparisonSummary(
            n_requests=len(outcomes),
            n_passed=sum(o.passed for o in outcomes),
            max_abs_z=max(abs(o.z) for o in outcomes),
            elapsed_seconds=time.perf_counter() - started,
        ),
    )
    logger.info("Comparison summary: %s", report.summary.model_dump_json())
    return report


def format_table(report: ComparisonReport) -> str:
    """
    Human-readable comparison table.
    """
    header = f"{'Request':<16} | {'n':>2} | {'Analytic':>13} | {'Estimate':>13} | {'Stderr':>10} | {'z':>7} | Pass"
    rule = "-" * len(header)
    lines = [f"--- {report.model_ref} ({report.scheme}, {report.n_traj} trajectories) ---", header, rule]
    for o in report.outcomes:
        lines.append(
            f"{o.id:<16} | {o.order:>2} | {o.analytic:>13.6g} | {o.estimate:>13.6g} | "
            f"{o.stderr:>10.3g} | {o.z:>7.2f} | {'yes' if o.passed else 'NO'}"
        )
    lines.append(rule)
    if report.summary:
        s = report.summary
        lines.append(f"{s.n_passed}/{s.n_requests} passed, max |z| = {s.max_abs_z:.2f}")
    return "\n".join(lines)


def corrupt_efficiencies(model: QuantumModel, factor: float) -> QuantumModel:
    """
    Copy of the model with every efficiency scaled by factor (capped at 1).

    Only the analytic side of a comparison uses this, to check that a wrong model is detected.
    """
    return model.replace_detectors([d.with_eta(min(1.0, d.eta * factor)) for d in model.detectors])


RequestLike = Union[ComparisonRequest, tuple[str, Sequence[WindowFilter]]]


def as_requests(items: Sequence[RequestLike]) -> list[ComparisonRequest]:
    out = []
    for item in items:
        if isinstance(item, ComparisonRequest):
            out.append(item)
        else:
            rid, windows = item
            out.append(ComparisonRequest(rid, tuple(windows)))
    return out
