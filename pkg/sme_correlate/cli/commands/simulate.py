"""
simulate command.
Writes one record CSV per trajectory into the output directory.
"""

from __future__ import annotations

import logging
from sme_correlate.cli.loading import resolve_model
from sme_correlate.cli.output import prepare_dir, writing_to
from sme_correlate.config import settings
from sme_correlate.errors import UsageError
from sme_correlate.schemas.grid import TimeGrid
from sme_correlate.schemas.run_config import RunConfig
from sme_correlate.services.trajectories import records_from_batch, simulate_batch, write_record_csv

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> int:
    if config.grid is None:
        raise UsageError("simulate needs --grid dt,T")
    n_traj = 1 if config.n_traj is None else config.n_traj
    if n_traj < 1:
        raise UsageError(f"--n-traj must be at least 1, got {n_traj}")
    model, rho0, ref = resolve_model(config)
    grid = TimeGrid.spanning(config.grid.dt, config.grid.t_end)

    out_dir = prepare_dir(config.out or "records")
    clicks = {d.label: 0 for d in model.jump_detectors}
    for start in range(0, n_traj, settings.chunk_size):
        indices = range(start, min(start + settings.chunk_size, n_traj))
        batch = simulate_batch(model, rho0, grid, config.seed, indices, config.scheme)
        for index, record in zip(indices, records_from_batch(model, grid, batch)):
            with writing_to(out_dir / f"trajectory_{index:05d}.csv") as path:
                write_record_csv(path, record)
            for label in clicks:
                clicks[label] += record.clicks(label)

    logger.info("simulated %d trajectories of %s (%s, %d steps)", n_traj, ref, config.scheme, grid.n_steps)
    print(f"wrote {n_traj} record file(s) to {out_dir}" + "".join(f"; {k}: {v} clicks" for k, v in clicks.items()))
    return 0
