"""Command-line entry point.

Exit codes: 0 success, 2 usage or configuration error, 3 data validation
error, 4 numeric failure.
"""

import argparse
import sys
from collections.abc import Sequence
from typing import Any, TextIO

import pydantic

from app import __version__
from app.commands import COMMANDS
from app.config import RunConfig, load_run_config
from app.core.logging import bind_run_context, clear_run_context, configure_logging, get_logger
from app.utils.exceptions import ConfigError, FileAccessError
from libs.graph_match.exceptions import GraphMatchError

logger = get_logger(__name__)

HELP = {
    "build": "retrieve, filter, balance and split concept-sentence pairs",
    "train": "train a matcher and save its best-validation checkpoint",
    "eval": "score a checkpoint on one split",
    "synth": "generate a synthetic corpus with planted labels",
    "stats": "print dataset statistics for a pairs file",
}


def _flag(field: str) -> str:
    return "--" + field.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    """One flag per RunConfig key; values are validated by RunConfig, not argparse."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="key = value configuration file")
    common.add_argument(
        "--print-config", action="store_true", help="print the resolved configuration and exit"
    )
    keys = common.add_argument_group("configuration keys")
    for name, info in RunConfig.model_fields.items():
        default = "" if info.default is None else getattr(info.default, "value", info.default)
        keys.add_argument(
            _flag(name),
            dest=name,
            metavar="VALUE",
            default=argparse.SUPPRESS,
            help=f"(default: {default})",
        )

    parser = argparse.ArgumentParser(
        prog="tagmatch", description="Concept-sentence matching with relational graph convolutions."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, help_text in HELP.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {name: getattr(args, name) for name in RunConfig.model_fields if hasattr(args, name)}


def _fail(command: str, error: GraphMatchError) -> int:
    logger.error(
        "command_failed",
        command=command,
        error_type=type(error).__name__,
        error=error.message,
        details=error.details,
        exit_code=error.exit_code,
    )
    print(f"tagmatch {command}: error: {error.message}", file=sys.stderr)
    return error.exit_code


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    command: str = args.command

    try:
        cfg = load_run_config(args.config, _overrides(args))
    except ConfigError as e:
        configure_logging()
        return _fail(command, e)

    if args.print_config:
        out.write(cfg.to_lines())
        return 0

    configure_logging(cfg.log_level.value, cfg.json_logs)
    bind_run_context(command, cfg.seed)
    try:
        logger.info("command_started", version=__version__)
        COMMANDS[command](cfg, out)
        logger.info("command_finished")
        return 0
    except GraphMatchError as e:
        return _fail(command, e)
    except pydantic.ValidationError as e:
        return _fail(command, ConfigError(f"Invalid option combination: {e}", {"errors": e.error_count()}))
    except OSError as e:
        return _fail(command, FileAccessError.from_os_error(e))
    finally:
        clear_run_context()


if __name__ == "__main__":
    sys.exit(main())
