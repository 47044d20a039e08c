"""Closed tag vocabularies for one-hot node features."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from ..constants import NONE_TAG
from ..exceptions import ValidationError
from .dependency import DependencyParse


class TagVocab:
    """Ordered, closed set of tags. ``"None"`` is always present at index 0."""

    def __init__(self, name: str, tags: Iterable[str]):
        self.name = name
        ordered = [NONE_TAG] + sorted(set(tags) - {NONE_TAG})
        self.tags: tuple[str, ...] = tuple(ordered)
        self._index = {tag: i for i, tag in enumerate(self.tags)}

    @classmethod
    def from_parses(cls, name: str, parses: Iterable[DependencyParse], attribute: str) -> TagVocab:
        """Collect every value of ``attribute`` (``"pos"`` or ``"ner"``) across parses."""
        return cls(name, (getattr(t, attribute) for p in parses for t in p.tokens))

    def __len__(self) -> int:
        return len(self.tags)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TagVocab) and self.name == other.name and self.tags == other.tags

    def __repr__(self) -> str:
        return f"TagVocab({self.name!r}, {list(self.tags)!r})"

    def index(self, tag: str) -> int:
        try:
            return self._index[tag]
        except KeyError:
            raise ValidationError(
                f"Tag {tag!r} is not in the {self.name} vocabulary", {"vocab": self.name, "tag": tag}
            ) from None

    def one_hot(self, tag: str) -> np.ndarray:
        vector = np.zeros(len(self.tags))
        vector[self.index(tag)] = 1.0
        return vector
