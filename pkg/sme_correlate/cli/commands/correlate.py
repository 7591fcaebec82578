"""
correlate command.
Evaluates one sharp or filtered correlation and writes it as a CSV row.
"""

from __future__ import annotations

import csv
import io
import logging
from sme_correlate.cli.loading import resolve_model
from sme_correlate.cli.output import write_output
from sme_correlate.errors import UsageError
from sme_correlate.schemas.correlation import CorrelationResult
from sme_correlate.schemas.run_config import Normalization, RunConfig
from sme_correlate.services.analytic import (
    diffusive_leg_etas,
    filtered_correlation,
    rescale_to_unit_normalization,
    sharp_correlation,
)

logger = logging.getLogger(__name__)

COLUMNS = ["request_id", "method", "order", "value", "segments", "steps", "tolerance"]


def _row(request_id: str, result: CorrelationResult, value: float) -> list[str]:
    diag = result.diagnostics
    return [
        request_id,
        result.method.value,
        str(result.order),
        repr(value),
        "" if diag.segments is None else str(diag.segments),
        "" if diag.steps is None else str(diag.steps),
        repr(diag.tolerance),
    ]


def run(config: RunConfig) -> int:
    """
    Compute the requested correlation.

    Exactly one of --sharp or --window legs must be given. The CSV goes to
    --out when set (a one-line summary is echoed to stdout), else to stdout.
    """
    if bool(config.sharp) == bool(config.windows):
        raise UsageError("correlate needs either --sharp or --window legs (not both)")
    model, rho0, _ = resolve_model(config)

    if config.sharp:
        result = sharp_correlation(model, rho0, config.sharp, tol=config.tol)
        legs = [p.detector for p in config.sharp]
    else:
        result = filtered_correlation(model, rho0, config.windows, horizon=config.horizon, tol=config.tol)
        legs = [w.detector for w in config.windows]

    value = result.value
    if config.normalization is Normalization.UNIT:
        value = rescale_to_unit_normalization(value, diffusive_leg_etas(model, legs))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    writer.writerow(_row("r0", result, value))

    if config.out:
        write_output(config.out, buf.getvalue())
        print(f"{result.method.value} n={result.order}: {value!r} -> {config.out}")
    else:
        print(buf.getvalue(), end="")
    logger.info("correlate done: method=%s value=%r", result.method.value, value)
    return 0
