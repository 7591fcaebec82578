"""
compare command.
Runs Monte Carlo ensembles against the analytic engine and reports z-scores.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from typing import Union

from sme_correlate.cli.loading import resolve_model
from sme_correlate.cli.output import write_output
from sme_correlate.cli.parsing import parse_window
from sme_correlate.config import settings
from sme_correlate.errors import UsageError
from sme_correlate.models.zoo import model_zoo
from sme_correlate.schemas.ensemble import ComparisonReport, SuiteReport
from sme_correlate.schemas.grid import TimeGrid
from sme_correlate.schemas.run_config import RequestSpec, RunConfig
from sme_correlate.services.estimator import (
    ComparisonRequest,
    EnsembleSpec,
    corrupt_efficiencies,
    format_table,
    run_comparison,
)
from sme_correlate.suites import load_suite

logger = logging.getLogger(__name__)

FAILED_EXIT_CODE = 3


@dataclass
class _Job:
    spec: EnsembleSpec
    requests: list[ComparisonRequest]


def _requests(specs: list[RequestSpec]) -> list[ComparisonRequest]:
    return [ComparisonRequest(r.id, tuple(r.windows)) for r in specs]


def _n_traj(value: int) -> int:
    if value < 2:
        raise UsageError(f"--n-traj must be at least 2 for a comparison, got {value}")
    return value


def _single_job(config: RunConfig) -> _Job:
    specs = list(config.requests)
    if config.windows:
        specs.append(RequestSpec(id=f"req{len(specs)}", windows=config.windows))
    if not specs:
        raise UsageError("compare needs at least one request (--window, --request or --suite)")
    if config.grid is None:
        raise UsageError("compare needs --grid dt,T")
    model, rho0, ref = resolve_model(config)
    t_end = max([config.grid.t_end] + [w.support[1] for s in specs for w in s.windows])
    spec = EnsembleSpec(
        model=model,
        rho0=rho0,
        grid=TimeGrid.spanning(config.grid.dt, t_end),
        n_traj=_n_traj(config.n_traj or settings.n_traj),
        master_seed=config.seed,
        scheme=config.scheme,
        model_ref=ref,
    )
    return _Job(spec, _requests(specs))


def _suite_jobs(config: RunConfig) -> list[_Job]:
    suite = load_suite(config.suite)
    dt = config.grid.dt if config.grid else suite["dt"]
    n_traj = _n_traj(config.n_traj or suite["n_traj"])
    seed = config.seed or suite.get("seed", 0)
    jobs = []
    for entry in suite["entries"]:
        model, rho0 = model_zoo(entry["zoo"], **entry.get("params", {}))
        specs = [
            RequestSpec(id=r["id"], windows=[parse_window(w) for w in r["windows"]]) for r in entry["requests"]
        ]
        spec = EnsembleSpec(
            model=model,
            rho0=rho0,
            grid=TimeGrid.spanning(dt, entry["t_end"]),
            n_traj=n_traj,
            master_seed=seed,
            scheme=config.scheme,
            model_ref=entry["zoo"],
        )
        jobs.append(_Job(spec, _requests(specs)))
    return jobs


def run(config: RunConfig) -> int:
    """
    Exit 0 iff every request passes; FAILED_EXIT_CODE otherwise.
    """
    jobs = _suite_jobs(config) if config.suite else [_single_job(config)]

    reports: list[ComparisonReport] = []
    for job in jobs:
        analytic_model = None
        if config.corrupt_analytic_eta is not None:
            analytic_model = corrupt_efficiencies(job.spec.model, config.corrupt_analytic_eta)
            logger.warning("analytic efficiencies scaled by %g", config.corrupt_analytic_eta)
        report = run_comparison(
            job.spec,
            job.requests,
            workers=config.workers,
            z_threshold=config.z_threshold,
            analytic_model=analytic_model,
        )
        print(format_table(report), file=sys.stderr)
        reports.append(report)

    result: Union[ComparisonReport, SuiteReport] = (
        SuiteReport(suite=config.suite, reports=reports) if config.suite else reports[0]
    )
    text = result.model_dump_json(indent=2)
    if config.out:
        write_output(config.out, text + "\n")
    else:
        print(text)
    return 0 if result.all_passed else FAILED_EXIT_CODE
