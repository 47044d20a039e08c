"""One module per subcommand. Each exposes ``run(cfg, out)``."""

from collections.abc import Callable
from typing import TextIO

from app.config import RunConfig

from . import build, evaluate, stats, synth, train

Command = Callable[[RunConfig, TextIO], None]

COMMANDS: dict[str, Command] = {
    "build": build.run,
    "train": train.run,
    "eval": evaluate.run,
    "synth": synth.run,
    "stats": stats.run,
}

__all__ = ["COMMANDS", "Command"]
