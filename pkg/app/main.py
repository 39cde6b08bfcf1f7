"""
Command-line front end: analyze a state, run a broadcasting pipeline, or
reproduce the published GHZ broadcasting numbers.

Exit codes: 0 success, 1 numerical violation, 2 usage or parse error.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, ValidationError, model_validator

from app.config import settings
from app.exceptions import ArgumentError, NumericalViolation, StateParseError
from app.services.cloning import Mode, broadcast
from app.services.entanglement import full_report
from app.services.rendering import render_broadcast, render_report, render_verification
from app.services.states import ThreeQubitState, ghz, load_state
from app.services.tensor_algebra import pure_density
from app.services.verification import run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


class RunConfig(BaseModel):
    """One CLI invocation."""

    command: Literal["analyze", "broadcast", "verify"]
    mode: Optional[Mode] = Field(None, description="Cloner for broadcast: local or nonlocal")
    state_path: Optional[Path] = Field(None, description="State file; None means the built-in GHZ state")
    format: Literal["table", "text"] = Field(settings.DEFAULT_FORMAT, description="table or structured text")
    tolerance: float = Field(settings.TOLERANCE, gt=0, description="Comparison tolerance")

    @model_validator(mode="after")
    def _check_mode(self):
        if self.command == "broadcast" and self.mode is None:
            raise ValueError("--mode is required for broadcast")
        if self.command != "broadcast" and self.mode is not None:
            raise ValueError("--mode only applies to broadcast")
        return self


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=["table", "text"],
        default=settings.DEFAULT_FORMAT,
        help="Output as a table or as structured text (JSON)",
    )
    common.add_argument(
        "--tolerance",
        type=float,
        default=settings.TOLERANCE,
        help="Absolute tolerance for comparisons against exact values",
    )

    source = argparse.ArgumentParser(add_help=False)
    group = source.add_mutually_exclusive_group(required=True)
    group.add_argument("--ghz", action="store_true", help="Use the built-in GHZ state")
    group.add_argument("--state", type=Path, help="Path to an 8-line amplitude file")

    parser = argparse.ArgumentParser(description=settings.APP_NAME)
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("analyze", parents=[common, source], help="Entanglement report of a three-qubit state")
    broadcast_parser = commands.add_parser(
        "broadcast", parents=[common, source], help="Clone a state and analyze both clones"
    )
    broadcast_parser.add_argument("--mode", choices=["local", "nonlocal"], required=True)
    commands.add_parser("verify", parents=[common], help="Compare simulation against published values")
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        mode=getattr(args, "mode", None),
        state_path=getattr(args, "state", None),
        format=args.format,
        tolerance=args.tolerance,
    )


def resolve_state(config: RunConfig) -> ThreeQubitState:
    if config.state_path is None:
        return ghz()
    return load_state(config.state_path)


def cmd_analyze(config: RunConfig) -> str:
    psi = resolve_state(config)
    logger.info(f"[ANALYZE] state source: {config.state_path or 'builtin-ghz'}")
    report = full_report(pure_density(psi))
    if config.format == "text":
        return report.model_dump_json()
    return render_report(report, tolerance=config.tolerance)


def cmd_broadcast(config: RunConfig) -> str:
    psi = resolve_state(config)
    logger.info(f"[BROADCAST] mode={config.mode} state source: {config.state_path or 'builtin-ghz'}")
    result = broadcast(psi, config.mode)
    if config.format == "text":
        return result.model_dump_json()
    return render_broadcast(result, tolerance=config.tolerance)


def cmd_verify(config: RunConfig) -> Tuple[str, int]:
    report = run_verification(config.tolerance)
    rendered = report.model_dump_json() if config.format == "text" else render_verification(report)
    return rendered, report.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    try:
        config = parse_config(argv)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if config.command == "analyze":
            output, code = cmd_analyze(config), EXIT_OK
        elif config.command == "broadcast":
            output, code = cmd_broadcast(config), EXIT_OK
        else:
            output, code = cmd_verify(config)
    except (StateParseError, ArgumentError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalViolation as e:
        logger.error(f"Numerical violation: {str(e)}", exc_info=True)
        print(f"error: numerical violation: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    print(output)
    return code
