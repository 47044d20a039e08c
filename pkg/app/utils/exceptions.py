"""Custom exceptions for the command-line layer."""

from libs.graph_match.exceptions import GraphMatchError


class UsageError(GraphMatchError):
    """Exception raised for invalid command-line usage (missing paths, bad flags)."""

    exit_code = 2


class ConfigError(GraphMatchError):
    """Exception raised for an invalid or unreadable configuration."""

    exit_code = 2


class FileAccessError(GraphMatchError):
    """Exception raised when an input or output file cannot be opened, read or written."""

    exit_code = 2

    @classmethod
    def from_os_error(cls, error: OSError) -> "FileAccessError":
        path = error.filename
        reason = error.strerror or str(error)
        message = f"{path}: {reason}" if path else reason
        return cls(message, {"path": None if path is None else str(path), "errno": error.errno})
