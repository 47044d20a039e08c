"""Utility functions and helpers."""

from app.utils.exceptions import ConfigError, FileAccessError, UsageError

__all__ = ["ConfigError", "FileAccessError", "UsageError"]
