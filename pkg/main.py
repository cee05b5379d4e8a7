#!/usr/bin/env python3
"""
Call-center recordings to instruction dataset pipeline.

Each subcommand runs one stage against the workspace named in the config;
run-all runs the whole chain and status reports backend and manifest health.
"""

import argparse
import asyncio
import json
import logging
import sys
from typing import List, Optional

from config.constants import STAGE_COMMANDS, STAGE_ORDER
from config.loader import load_config
from config.settings import settings
from core.errors import ConfigError, PipelineError
from core.pipeline_runner import PipelineRunner
from core.system_initializer import PipelineSystem
from utils.logger import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_STAGE_FAILURE = 1
EXIT_CONFIG_ERROR = 2


def _add_global_flags(parser: argparse.ArgumentParser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="Path to the YAML run configuration")
    parser.add_argument(
        "--resume",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="Skip stages whose inputs are unchanged since their last run",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="Debug logging on the console",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="call2dataset", description="Build an instruct QA dataset from call recordings")
    _add_global_flags(parser, suppress=False)

    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, suppress=True)

    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, stage in STAGE_COMMANDS.items():
        sub = subparsers.add_parser(command, parents=[common], help=f"Run the {stage} stage")
        if command == "validate":
            sub.add_argument("--drop-flagged", action="store_true", help="Also write curated.jsonl")
    subparsers.add_parser("run-all", parents=[common], help="Run every stage in order")
    subparsers.add_parser("status", parents=[common], help="Show backend, workspace and manifest health")
    return parser


async def _run(args: argparse.Namespace, system: PipelineSystem) -> int:
    try:
        await system.initialize()
    except ConfigError as e:
        logger.error(f"❌ Configuration error at '{e.key}': {e}")
        return EXIT_CONFIG_ERROR

    try:
        if args.command == "status":
            print(json.dumps(await system.health_check(), indent=2, ensure_ascii=False))
            return EXIT_OK

        stages: List[str] = list(STAGE_ORDER) if args.command == "run-all" else [STAGE_COMMANDS[args.command]]
        report = await PipelineRunner(system).run_stages(stages, resume=args.resume)
        for summary in report.stages:
            logger.info(
                f"📊 {summary.stage}: {summary.status}, {summary.work_items} item(s), "
                f"{len(summary.exclusions)} exclusion(s), {summary.duration_s:.2f}s"
            )
        return report.exit_code
    except PipelineError as e:
        logger.error(f"❌ {e}")
        return EXIT_STAGE_FAILURE
    finally:
        await system.cleanup()


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    setup_logging(level, settings.LOG_DIR)

    if not args.config:
        logger.error("❌ --config is required")
        return EXIT_CONFIG_ERROR
    try:
        config = load_config(args.config)
    except ConfigError as e:
        logger.error(f"❌ Configuration error at '{e.key}': {e}")
        return EXIT_CONFIG_ERROR

    if getattr(args, "drop_flagged", False):
        config = config.model_copy(
            update={"validation": config.validation.model_copy(update={"drop_flagged": True})}
        )

    return asyncio.run(_run(args, PipelineSystem(config)))


if __name__ == "__main__":
    sys.exit(main())
