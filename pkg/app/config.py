"""Run configuration."""

from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.utils.exceptions import ConfigError
from libs.graph_match.constants import COMMENT_PREFIX
from libs.graph_match.parsers import OovKind
from libs.graph_match.rgcn import DecompositionMode
from services.dataset import SplitMode
from services.dataset.pairs import Split
from services.matching import ModelKind


class LogLevel(str, Enum):
    """Valid log levels."""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


# Defaults that depend on the model kind
DEFAULT_EPOCHS = {ModelKind.GRAPH_GRAPH: 20, ModelKind.GRAPH_SEQ: 50, ModelKind.SEQ_SEQ: 20}
DEFAULT_BASES = {ModelKind.GRAPH_GRAPH: 14, ModelKind.GRAPH_SEQ: 2, ModelKind.SEQ_SEQ: 14}


class RunConfig(BaseSettings):
    """Flat run configuration shared by every subcommand.

    Sources, lowest precedence first: field defaults, ``TAGMATCH_*``
    environment variables, the ``--config`` file, explicit command-line flags.
    """

    model_config = SettingsConfigDict(
        env_prefix="TAGMATCH_",
        case_sensitive=False,
        extra="forbid",
    )

    # Inputs
    concept_edges: Path | None = None
    concept_nodes: Path | None = None
    sentences: Path | None = None
    concept_parses: Path | None = None
    embeddings: Path | None = None
    labels: Path | None = None
    word_freq: Path | None = None  # falls back to counts over the sentence parses
    oov: OovKind = OovKind.ZERO_VECTOR

    # Outputs
    pairs: Path = Path("pairs.jsonl")
    checkpoint: Path = Path("model.ckpt")
    train_log: Path | None = None  # default: checkpoint path with a .log suffix
    dump: Path | None = None
    out_dir: Path = Path("synthetic")

    # Model
    model: ModelKind = ModelKind.GRAPH_GRAPH
    hidden: int = Field(128, ge=1)
    layers: int = Field(3, ge=1)
    bases: int | None = Field(None, ge=1)
    decomposition: DecompositionMode = DecompositionMode.BASIS
    final_activation: bool = True
    hops: int = Field(1, ge=1)

    # Training
    epochs: int | None = Field(None, ge=1)
    lr: float = Field(1e-4, gt=0)
    warmup: float = Field(0.10, ge=0, lt=1)
    batch: int = Field(8, ge=1)
    threshold: float = Field(0.5, gt=0, lt=1)
    seed: int = 0
    repeats: int = Field(1, ge=1)

    # Dataset construction
    split_mode: SplitMode = SplitMode.RANDOM
    train_fraction: float = Field(0.8, gt=0, le=1)
    test_fraction: float = Field(0.2, gt=0, lt=1)
    val_size: int = Field(1000, ge=1)
    cap: int = Field(4, ge=1)
    ratio: float = Field(1.0, gt=0)

    # Evaluation
    split: Split = Split.TEST

    # Synthetic corpus
    synth_concepts: int = Field(50, ge=2)
    synth_sentences: int = Field(400, ge=1)
    synth_entities: int = Field(4, ge=1)
    synth_embedding_dim: int = Field(16, ge=1)
    synth_negation_rate: float = Field(0.5, ge=0, le=1)
    synth_distractor_rate: float = Field(0.5, ge=0, le=1)
    synth_second_entity_rate: float = Field(0.2, ge=0, le=1)

    # Logging
    log_level: LogLevel = LogLevel.INFO
    json_logs: bool = True

    @model_validator(mode="after")
    def _resolve_model_defaults(self) -> "RunConfig":
        if self.epochs is None:
            self.epochs = DEFAULT_EPOCHS[self.model]
        if self.bases is None:
            self.bases = DEFAULT_BASES[self.model]
        if self.train_fraction + self.test_fraction > 1 + 1e-9:
            raise ValueError(
                f"train_fraction + test_fraction must be <= 1, got "
                f"{self.train_fraction} + {self.test_fraction}"
            )
        return self

    @property
    def resolved_train_log(self) -> Path:
        return self.train_log or self.checkpoint.with_suffix(".log")

    def to_lines(self) -> str:
        """Sorted ``key = value`` lines; readable back by ``read_config_file``."""
        lines = []
        for key in sorted(type(self).model_fields):
            lines.append(f"{key} = {_format_value(getattr(self, key))}")
        return "\n".join(lines) + "\n"


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_config_file(path: str | Path) -> dict[str, str | None]:
    """Parse ``key = value`` lines. Blank lines and ``#`` comments are skipped;
    an empty value means unset.

    Raises:
        ConfigError: If the file is unreadable or a line is malformed
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}", {"path": str(path)}) from e

    values: dict[str, str | None] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(COMMENT_PREFIX):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ConfigError(
                f"{path}:{line_number}: expected 'key = value'",
                {"path": str(path), "line_number": line_number},
            )
        if key in values:
            raise ConfigError(
                f"{path}:{line_number}: duplicate key {key!r}",
                {"path": str(path), "line_number": line_number, "key": key},
            )
        values[key] = value.strip() or None
    return values


def load_run_config(
    config_file: str | Path | None = None, overrides: dict[str, Any] | None = None
) -> RunConfig:
    """Resolve a RunConfig from the environment, an optional file and explicit overrides.

    Raises:
        ConfigError: On unknown keys or invalid values
    """
    values: dict[str, Any] = {}
    if config_file is not None:
        values.update(read_config_file(config_file))
    values.update(overrides or {})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        problems = [
            {"key": ".".join(str(p) for p in err["loc"]), "error": err["msg"]} for err in e.errors()
        ]
        summary = "; ".join(f"{p['key'] or 'config'}: {p['error']}" for p in problems)
        raise ConfigError(f"Invalid configuration: {summary}", {"errors": problems}) from e
