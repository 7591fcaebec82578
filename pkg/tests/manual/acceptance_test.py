import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

ROOT_DIR = Path(__file__).resolve().parent.parent.parent
if str(ROOT_DIR) not in sys.path:
    sys.path.append(str(ROOT_DIR))

from sme_correlate.cli.parsing import parse_window
from sme_correlate.models import model_zoo
from sme_correlate.schemas.ensemble import ComparisonReport
from sme_correlate.schemas.grid import TimeGrid
from sme_correlate.services.estimator import (
    ComparisonRequest,
    EnsembleSpec,
    corrupt_efficiencies,
    run_comparison,
)
from sme_correlate.suites import SUITES, load_suite

# Corrupted efficiencies must push at least one request of every model past this |z|
DETECTION_Z = 5.0


@dataclass
class ZooJob:
    name: str
    spec: EnsembleSpec
    requests: List[ComparisonRequest]


# --- Job construction ---

def build_jobs(suite_name: str, n_traj: Optional[int], seed: Optional[int]) -> List[ZooJob]:
    """Turns a preset suite into one ensemble per zoo entry."""
    suite = load_suite(suite_name)
    jobs = []
    for entry in suite["entries"]:
        model, rho0 = model_zoo(entry["zoo"], **entry.get("params", {}))
        requests = [
            ComparisonRequest(r["id"], tuple(parse_window(w) for w in r["windows"]))
            for r in entry["requests"]
        ]
        spec = EnsembleSpec(
            model=model,
            rho0=rho0,
            grid=TimeGrid.spanning(suite["dt"], entry["t_end"]),
            n_traj=n_traj or suite["n_traj"],
            master_seed=suite["seed"] if seed is None else seed,
            model_ref=entry["zoo"],
        )
        jobs.append(ZooJob(entry["zoo"], spec, requests))
    return jobs


def run_job(job: ZooJob, z_threshold: float, corrupt: Optional[float]) -> ComparisonReport:
    """Runs one zoo entry; with corrupt set, only the analytic side sees scaled efficiencies."""
    analytic_model = corrupt_efficiencies(job.spec.model, corrupt) if corrupt is not None else None
    return run_comparison(job.spec, job.requests, workers=1, z_threshold=z_threshold, analytic_model=analytic_model)


# --- Status printing ---

def print_reports(reports: Dict[str, ComparisonReport], title: str):
    """Prints every request outcome in one table."""
    print(f"\n--- 📊 {title} ---")
    print(f"{'Model':<26} | {'Request':<22} | {'Analytic':>11} | {'Estimate':>11} | {'z':>8} | Pass")
    print("-" * 96)
    for name in sorted(reports):
        for o in reports[name].outcomes:
            print(
                f"{name:<26} | {o.id:<22} | {o.analytic:>11.5g} | {o.estimate:>11.5g} | "
                f"{o.z:>8.2f} | {'yes' if o.passed else 'NO'}"
            )
    print("-" * 96)


# --- Assertions ---

def assert_all_pass(reports: Dict[str, ComparisonReport]):
    failed = [(name, o.id, o.z) for name, r in reports.items() for o in r.outcomes if not o.passed]
    assert not failed, f"🚨 **Assertion Failed**: requests outside the z threshold: {failed}"
    print(f"✅ All {sum(len(r.outcomes) for r in reports.values())} requests within the threshold.")


def assert_corruption_detected(faithful: Dict[str, ComparisonReport], corrupted: Dict[str, ComparisonReport]):
    """
    Every model whose analytic values move under the corruption must show |z| > DETECTION_Z somewhere.
    """
    sensitive = [
        name
        for name, r in corrupted.items()
        if any(o.analytic != f.analytic for o, f in zip(r.outcomes, faithful[name].outcomes))
    ]
    skipped = sorted(set(corrupted) - set(sensitive))
    if skipped:
        print(f"   - Skipping {skipped}: analytic values do not depend on the efficiencies.")
    missed = [name for name in sensitive if max(abs(o.z) for o in corrupted[name].outcomes) <= DETECTION_Z]
    assert not missed, f"🚨 **Assertion Failed**: corrupted efficiencies went unnoticed for {missed}"
    print(f"✅ Corrupted efficiencies detected for all {len(sensitive)} sensitive models (|z| > {DETECTION_Z}).")


# --- Main Logic ---

def run_scenario(jobs: List[ZooJob], z_threshold: float, corrupt: Optional[float], workers: int) -> Dict[str, ComparisonReport]:
    reports: Dict[str, ComparisonReport] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(run_job, job, z_threshold, corrupt): job.name for job in jobs}
        for fut in as_completed(futures):
            name = futures[fut]
            reports[name] = fut.result()
            s = reports[name].summary
            print(f"  - {name}: {s.n_passed}/{s.n_requests} passed in {s.elapsed_seconds:.1f}s")
    return reports


def main():
    parser = argparse.ArgumentParser(description="Assert-driven Monte Carlo acceptance run over a preset suite")
    parser.add_argument("--suite", default="zoo", choices=SUITES, help="Preset suite to run")
    parser.add_argument("--n-traj", type=int, help="Override the suite's trajectory count")
    parser.add_argument("--seed", type=int, help="Override the suite's master seed")
    parser.add_argument("--z-threshold", type=float, default=5.0, help="Pass bound on |z|")
    parser.add_argument(
        "--corrupt-eta",
        type=float,
        default=0.5,
        help="Efficiency scale for the detection run (0 skips it)",
    )
    parser.add_argument("--workers", type=int, default=4, help="Zoo models run in parallel")
    args = parser.parse_args()

    jobs = build_jobs(args.suite, args.n_traj, args.seed)
    print(f"--- Suite '{args.suite}': {len(jobs)} models ---")

    started = time.perf_counter()
    print("\n--- 1. Faithful analytic side ---")
    reports = run_scenario(jobs, args.z_threshold, None, args.workers)
    print_reports(reports, "Faithful comparison")
    assert_all_pass(reports)

    if args.corrupt_eta:
        print(f"\n--- 2. Analytic efficiencies scaled by {args.corrupt_eta} ---")
        corrupted = run_scenario(jobs, args.z_threshold, args.corrupt_eta, args.workers)
        print_reports(corrupted, "Corrupted comparison")
        assert_corruption_detected(reports, corrupted)

    print("\n#####################################################")
    print(f"**All acceptance assertions passed in {time.perf_counter() - started:.1f}s.**")
    print("#####################################################")


if __name__ == "__main__":
    try:
        main()
    except KeyboardInterrupt:
        sys.exit(1)
    except AssertionError as e:
        print("\n\n🛑 **TEST FAILED.**")
        print(e)
        sys.exit(1)
