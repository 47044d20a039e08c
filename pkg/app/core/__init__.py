"""Core application components."""

from app.core.logging import configure_logging, get_context_logger, get_logger

__all__ = ["configure_logging", "get_context_logger", "get_logger"]
