"""
Command-line entry point.
Parses flags into a RunConfig, dispatches to the command modules and turns
SmeCorrelateError into a JSON error record on stderr plus an exit code.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, NoReturn, Optional, Sequence

from pydantic import ValidationError

from sme_correlate import __version__
from sme_correlate.cli.commands import compare, correlate, simulate
from sme_correlate.cli.parsing import parse_grid, parse_request, parse_sharp, parse_window
from sme_correlate.config import settings
from sme_correlate.errors import SmeCorrelateError, UsageError
from sme_correlate.schemas.run_config import Command, RunConfig

logger = logging.getLogger(__name__)

COMMANDS: dict[Command, Callable[[RunConfig], int]] = {
    Command.CORRELATE: correlate.run,
    Command.SIMULATE: simulate.run,
    Command.COMPARE: compare.run,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", help="Model JSON file")
    common.add_argument("--zoo", help="Built-in model name")
    common.add_argument("--config", help="Replay a config written by --dump-config")
    common.add_argument("--dump-config", action="store_true", help="Print the resolved config as JSON and exit")
    common.add_argument("--log-level", default=None, help="Logging level (default from settings)")
    common.add_argument("--out", help="Output file (or directory for simulate)")
    common.add_argument("--tol", type=float, help="Krylov tolerance")
    common.add_argument("--workers", type=int, help="Worker threads (env SME_CORRELATE_THREADS)")

    parser = _Parser(prog="sme_correlate", description="Signal correlation functions of monitored quantum systems")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser(Command.CORRELATE.value, parents=[common], help="Exact sharp or filtered correlation")
    p.add_argument("--sharp", action="append", default=[], metavar="DET@T", help="Sharp leg (repeatable)")
    p.add_argument("--window", action="append", default=[], metavar="DET:A,B", help="Rect window leg (repeatable)")
    p.add_argument("--horizon", type=float, help="Integration horizon T")
    p.add_argument("--normalization", choices=["standard", "unit"], default="standard")

    p = sub.add_parser(Command.SIMULATE.value, parents=[common], help="Simulate measurement records")
    _add_ensemble_flags(p)

    p = sub.add_parser(Command.COMPARE.value, parents=[common], help="Monte Carlo check of filtered correlations")
    _add_ensemble_flags(p)
    p.add_argument("--window", action="append", default=[], metavar="DET:A,B", help="Leg of one request (repeatable)")
    p.add_argument("--request", action="append", default=[], metavar="[ID=]LEGS", help="';'-separated legs")
    p.add_argument("--suite", help="Preset suite (smoke, zoo, three_point)")
    p.add_argument("--z-threshold", type=float, help="Pass threshold on |z|")
    p.add_argument("--corrupt-analytic-eta", type=float, help=argparse.SUPPRESS)
    return parser


def _add_ensemble_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid", metavar="DT,T", help="Step and end time")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-traj", type=int)
    p.add_argument("--scheme", choices=["kraus", "euler"], default="kraus")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Build the RunConfig for parsed arguments, or load it from --config.

    Raises:
        UsageError: invalid flag combination or unreadable config file
    """
    command = Command(args.command)
    if args.config:
        path = Path(args.config)
        try:
            config = RunConfig.model_validate_json(path.read_text())
        except FileNotFoundError:
            raise UsageError(f"config file not found: {path}", path=str(path)) from None
        except ValidationError as exc:
            raise UsageError(f"invalid config file {path}: {exc.errors()[0]['msg']}", path=str(path)) from None
        if config.command is not command:
            raise UsageError(f"config file is for '{config.command.value}', not '{command.value}'")
        return config

    fields: dict[str, Any] = {
        "command": command,
        "model": args.model,
        "zoo": args.zoo,
        "out": args.out,
        "tol": args.tol,
        "workers": args.workers,
    }
    if command is Command.CORRELATE:
        fields["sharp"] = [parse_sharp(s) for s in args.sharp]
        fields["windows"] = [parse_window(w) for w in args.window]
        fields["horizon"] = args.horizon
        fields["normalization"] = args.normalization
    else:
        fields["grid"] = parse_grid(args.grid) if args.grid else None
        fields["seed"] = args.seed
        fields["n_traj"] = args.n_traj
        fields["scheme"] = args.scheme
    if command is Command.COMPARE:
        fields["windows"] = [parse_window(w) for w in args.window]
        fields["requests"] = [parse_request(r, f"req{i}") for i, r in enumerate(args.request)]
        fields["suite"] = args.suite
        fields["z_threshold"] = args.z_threshold
        fields["corrupt_analytic_eta"] = args.corrupt_analytic_eta
    try:
        return RunConfig(**fields)
    except ValidationError as exc:
        err = exc.errors()[0]
        msg = err["msg"].removeprefix("Value error, ")
        raise UsageError(msg, field=".".join(str(x) for x in err["loc"])) from None


def main(argv: Optional[Sequence[str]] = None) -> int:
    log_level = settings.log_level
    try:
        args = build_parser().parse_args(argv)
        log_level = (args.log_level or log_level).upper()
        if not isinstance(logging.getLevelName(log_level), int):
            raise UsageError(f"unknown log level '{log_level}'", flag="--log-level")
        logging.basicConfig(
            level=log_level,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        config = config_from_args(args)
        if args.dump_config:
            print(config.model_dump_json(indent=2))
            return 0
        if config.workers is None:
            config = config.model_copy(update={"workers": settings.threads})
        return COMMANDS[config.command](config)
    except SmeCorrelateError as exc:
        print(json.dumps(exc.to_record()), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
