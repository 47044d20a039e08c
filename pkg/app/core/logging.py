"""Structured logging configuration using structlog."""

import logging
import sys
from contextvars import ContextVar
from typing import Any, cast

import structlog
from structlog.types import EventDict, Processor

# Context variables for run-scoped data
_command: ContextVar[str | None] = ContextVar("command", default=None)
_run_seed: ContextVar[int | None] = ContextVar("run_seed", default=None)


def add_app_context(logger: Any, method_name: str, event_dict: EventDict) -> EventDict:
    """
    Add application context to log events.

    Args:
        logger: Logger instance
        method_name: Method name being called
        event_dict: Event dictionary

    Returns:
        Updated event dictionary with app context
    """
    event_dict["app"] = "tagmatch"
    return event_dict


def add_run_context(logger: Any, method_name: str, event_dict: EventDict) -> EventDict:
    """Attach the current command and root seed, when set."""
    command = _command.get()
    if command is not None:
        event_dict.setdefault("command", command)
    seed = _run_seed.get()
    if seed is not None:
        event_dict.setdefault("seed", seed)
    return event_dict


def configure_logging(log_level: str = "INFO", json_logs: bool = True) -> None:
    """
    Configure structured logging with structlog.

    Logs go to stderr so that command output on stdout stays machine-readable.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        json_logs: Whether to output logs in JSON format (default: True)
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=numeric_level,
    )

    processors: list[Processor] = [
        # Values bound with structlog.contextvars (e.g. repeat index)
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.processors.TimeStamper(fmt="iso", utc=True),
        add_app_context,
        add_run_context,
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
    ]

    if json_logs:
        processors.append(structlog.processors.JSONRenderer(sort_keys=True))
    else:
        processors.append(structlog.dev.ConsoleRenderer())

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=False,
    )


def bind_run_context(command: str | None = None, seed: int | None = None) -> None:
    """
    Bind run context to current context variables.

    Called once by the CLI before a command runs; every log line emitted
    afterwards carries the command name and root seed.

    Args:
        command: Subcommand being run
        seed: Root seed of the run
    """
    if command:
        _command.set(command)
    if seed is not None:
        _run_seed.set(seed)


def clear_run_context() -> None:
    """Clear run context variables."""
    _command.set(None)
    _run_seed.set(None)


def get_logger(name: str | None = None) -> structlog.stdlib.BoundLogger:
    """
    Get a configured logger instance.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Configured structlog logger
    """
    return cast(structlog.stdlib.BoundLogger, structlog.get_logger(name))


def get_context_logger(name: str | None = None) -> structlog.stdlib.BoundLogger:
    """
    Get logger with the current run context bound explicitly.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Configured structlog logger with command and seed bound
    """
    logger = get_logger(name)
    context_vars: dict[str, Any] = {}
    if (command := _command.get()) is not None:
        context_vars["command"] = command
    if (seed := _run_seed.get()) is not None:
        context_vars["seed"] = seed
    if context_vars:
        return cast(structlog.stdlib.BoundLogger, logger.bind(**context_vars))
    return logger
