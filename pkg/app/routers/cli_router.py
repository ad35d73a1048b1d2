"""
Command-line router for the `ddl` tool.

Parses argv with argparse, validates the options into a RunConfig and routes
each sub-command to its ReasoningController method. Reports go to stdout (or
the `-o` file), logs to stderr.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, TextIO

from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError

from app.controllers.reasoning_controller import EXIT_ERROR, ReasoningController
from app.schemas.config import RunConfig

logger = logging.getLogger(__name__)
load_dotenv()

COMMANDS = {
    "rank": ReasoningController.cmd_rank,
    "compile": ReasoningController.cmd_compile,
    "solve": ReasoningController.cmd_solve,
    "entail": ReasoningController.cmd_entail,
    "check-postulates": ReasoningController.cmd_check_postulates,
}


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Options accepted both before and after the sub-command name."""

    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--format", choices=("text", "json"), default=default("text"), help="report format")
    parser.add_argument("--oracle", default=default(None), help="external oracle command (env DDL_ORACLE)")
    parser.add_argument("--timeout", type=float, default=default(None), help="oracle timeout in seconds (env DDL_TIMEOUT)")
    parser.add_argument("-v", "--verbose", action="store_true", default=default(False), help="log pipeline milestones")
    parser.add_argument("--debug", action="store_true", default=default(False), help="log every oracle query")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddl",
        description="Rational closure for defeasible description logics via dl-programs.",
    )
    _global_options(parser, suppress=False)
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name: str, help_text: str, with_input: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        _global_options(sub, suppress=True)
        if with_input:
            sub.add_argument("input", type=Path, metavar="FILE", help="knowledge base file")
        sub.add_argument("-o", "--output", type=Path, default=None, help="write the report to this file")
        return sub

    command("rank", "print the rank of every defeasible axiom")
    command("compile", "compile the ranked KB into a dl-program")

    solve = command("solve", "strong answer sets of the compiled program")
    solve.add_argument("--query", default=None, help="ground literal such as c(a) or -c(a)")
    solve.add_argument("--mode", choices=("all", "cautious", "brave"), default="all")

    entail = command("entail", "decide a defeasible or strict inclusion")
    entail.add_argument("--query", required=True, help='"C ~[= D" or "C [= D"')

    postulates = command("check-postulates", "randomized postulate checks", with_input=False)
    postulates.add_argument("--seed", type=int, default=1)
    postulates.add_argument("--cases", type=int, default=100)
    postulates.add_argument("--artifacts", type=Path, default=None, help="directory for failing cases")
    return parser


def log_level(args: argparse.Namespace) -> int:
    if args.debug:
        return logging.DEBUG
    if args.verbose:
        return logging.INFO
    return getattr(logging, os.getenv("DDL_LOG_LEVEL", "WARNING").upper(), logging.WARNING)


def run_config(args: argparse.Namespace) -> RunConfig:
    """
    Validated RunConfig from parsed arguments and the environment.

    Raises:
        ValidationError: On invalid option values such as `--cases 0`
    """
    timeout = args.timeout if args.timeout is not None else float(os.getenv("DDL_TIMEOUT", 30))
    return RunConfig(
        input_path=getattr(args, "input", None),
        output_path=args.output,
        format=args.format,
        oracle=args.oracle or os.getenv("DDL_ORACLE") or None,
        timeout=timeout,
        seed=getattr(args, "seed", 1),
        cases=getattr(args, "cases", 100),
        mode=getattr(args, "mode", "all"),
        query=getattr(args, "query", None),
        artifacts_dir=getattr(args, "artifacts", None),
    )


def emit(report: BaseModel, cfg: RunConfig, stream: TextIO) -> None:
    """Write a report as text or JSON to the output file or `stream`."""
    text = report.model_dump_json(indent=2) if cfg.format == "json" else report.to_text()
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output_path is not None:
        cfg.output_path.write_text(text, encoding="utf-8")
        logger.info(f"Report written to {cfg.output_path}")
    else:
        stream.write(text)


def route(args: argparse.Namespace, stream: Optional[TextIO] = None) -> int:
    """
    Execute one parsed command.

    Args:
        args: Namespace from build_parser()
        stream: Report destination when no output file is set

    Returns:
        Exit code 0, 1 or 2
    """
    stream = stream or sys.stdout
    try:
        cfg = run_config(args)
    except ValidationError as e:
        logger.error(f"Invalid options: {e}")
        sys.stderr.write(f"ddl {args.command}: invalid options: {e}\n")
        return EXIT_ERROR
    controller = ReasoningController(cfg)
    code, report = COMMANDS[args.command](controller)
    try:
        emit(report, cfg, stream)
    except OSError as e:
        logger.error(f"Failed to write report: {e}")
        return EXIT_ERROR
    return code


def parse(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
