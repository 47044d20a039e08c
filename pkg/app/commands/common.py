"""Input resolution shared by the subcommands."""

from pathlib import Path

from app.config import RunConfig
from app.utils.exceptions import UsageError
from libs.graph_match.parsers import OovKind, OovPolicy
from services.dataset import Corpus, load_corpus


def require_path(cfg: RunConfig, key: str, must_exist: bool = True) -> Path:
    """The path configured under ``key``.

    Raises:
        UsageError: If it is unset, or missing on disk when ``must_exist``
    """
    value = getattr(cfg, key)
    flag = "--" + key.replace("_", "-")
    if value is None:
        raise UsageError(f"{flag} is required", {"key": key})
    path = Path(value)
    if must_exist and not path.exists():
        raise UsageError(f"{flag}: no such file {path}", {"key": key, "path": str(path)})
    return path


def optional_path(cfg: RunConfig, key: str) -> Path | None:
    if getattr(cfg, key) is None:
        return None
    return require_path(cfg, key)


def oov_policy(cfg: RunConfig) -> OovPolicy:
    if cfg.oov is OovKind.HASHED_RANDOM:
        return OovPolicy.hashed(cfg.seed)
    return OovPolicy.zero()


def corpus_from_config(cfg: RunConfig) -> Corpus:
    """Check every input path first, then load."""
    paths = {
        key: require_path(cfg, key)
        for key in ("concept_edges", "sentences", "concept_parses", "embeddings")
    }
    return load_corpus(
        paths["concept_edges"],
        paths["sentences"],
        paths["concept_parses"],
        paths["embeddings"],
        concept_nodes=optional_path(cfg, "concept_nodes"),
        oov_policy=oov_policy(cfg),
    )
