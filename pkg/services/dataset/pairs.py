"""Concept-sentence pair records and their JSON-lines codec."""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from enum import Enum
from pathlib import Path
from typing import Literal

import pydantic
import structlog
from pydantic import BaseModel, ConfigDict, Field

from libs.graph_match.exceptions import ArgumentError, ParseError, ValidationError

logger = structlog.get_logger(__name__)


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"
    NONE = "none"


class PairExample(BaseModel):
    """One concept-sentence pair. ``label`` is None for unlabeled candidates."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    pair_id: str = Field(..., min_length=1)
    concept: str = Field(..., min_length=1)
    sentence: str = Field(..., min_length=1)
    label: Literal[0, 1] | None = None
    split: Split = Split.NONE

    def with_split(self, split: Split) -> PairExample:
        return self.model_copy(update={"split": split})

    def with_label(self, label: Literal[0, 1] | None) -> PairExample:
        return self.model_copy(update={"label": label})


def make_pair_id(concept: str, sentence: str) -> str:
    return f"{sentence}::{concept}"


def validate_pairs(pairs: Iterable[PairExample]) -> None:
    """Raise ValidationError on a repeated pair id or (concept, sentence)."""
    seen_ids: set[str] = set()
    seen_pairs: set[tuple[str, str]] = set()
    for pair in pairs:
        key = (pair.concept, pair.sentence)
        if pair.pair_id in seen_ids:
            raise ValidationError(f"Duplicate pair id {pair.pair_id!r}", {"pair_id": pair.pair_id})
        if key in seen_pairs:
            raise ValidationError(
                f"Duplicate pair ({pair.concept!r}, {pair.sentence!r})",
                {"concept": pair.concept, "sentence": pair.sentence},
            )
        seen_ids.add(pair.pair_id)
        seen_pairs.add(key)


def select_split(pairs: Sequence[PairExample], split: Split) -> list[PairExample]:
    return [p for p in pairs if p.split is split]


def require_labeled(pairs: Sequence[PairExample], what: str) -> list[PairExample]:
    """Return ``pairs`` if non-empty and fully labeled.

    Raises:
        ArgumentError: If ``pairs`` is empty or contains unlabeled pairs
    """
    if not pairs:
        raise ArgumentError(f"The {what} set is empty", {"set": what})
    unlabeled = [p.pair_id for p in pairs if p.label is None]
    if unlabeled:
        raise ArgumentError(
            f"The {what} set has {len(unlabeled)} unlabeled pair(s)",
            {"set": what, "examples": unlabeled[:5]},
        )
    return list(pairs)


def read_pairs(path: str | Path) -> list[PairExample]:
    """Read a pairs file (one JSON object per line).

    Raises:
        ParseError: On malformed JSON or a record that fails validation
        ValidationError: On duplicate pairs
    """
    path_str = str(path)
    pairs: list[PairExample] = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ParseError(f"Cannot read pairs file: {e}", path_str) from e
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            pairs.append(PairExample.model_validate(json.loads(line)))
        except json.JSONDecodeError as e:
            raise ParseError(f"Invalid JSON: {e.msg}", path_str, line_number) from e
        except pydantic.ValidationError as e:
            raise ParseError(f"Invalid pair record: {e.errors()[0]['msg']}", path_str, line_number) from e
    validate_pairs(pairs)
    logger.info("pairs_loaded", path=path_str, pairs=len(pairs))
    return pairs


def write_pairs(pairs: Iterable[PairExample], path: str | Path) -> None:
    lines = [json.dumps(p.model_dump(mode="json"), sort_keys=True) for p in pairs]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    logger.info("pairs_written", path=str(path), pairs=len(lines))
