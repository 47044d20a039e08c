"""Word-embedding table in word2vec text format.

The table is read-only after loading. Out-of-vocabulary words resolve through
an ``OovPolicy``: a zero vector (default) or a deterministic pseudo-random
vector derived from a hash of the word and a seed.
"""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import structlog

from ..exceptions import ArgumentError, ParseError

logger = structlog.get_logger(__name__)


class OovKind(str, Enum):
    ZERO_VECTOR = "zero"
    HASHED_RANDOM = "hashed"


@dataclass(frozen=True)
class OovPolicy:
    """How absent words are resolved. ``seed`` only matters for HASHED_RANDOM."""

    kind: OovKind = OovKind.ZERO_VECTOR
    seed: int = 0

    @classmethod
    def zero(cls) -> OovPolicy:
        return cls(OovKind.ZERO_VECTOR)

    @classmethod
    def hashed(cls, seed: int) -> OovPolicy:
        return cls(OovKind.HASHED_RANDOM, seed)


class EmbeddingTable:
    """Immutable word -> float64 vector map with a fixed dimension."""

    def __init__(
        self,
        dim: int,
        vectors: Mapping[str, Sequence[float] | np.ndarray],
        oov_policy: OovPolicy | None = None,
    ):
        if dim < 1:
            raise ArgumentError(f"Embedding dimension must be >= 1, got {dim}")
        self.dim = dim
        self.oov_policy = oov_policy or OovPolicy.zero()
        self._vectors: dict[str, np.ndarray] = {}
        for word, values in vectors.items():
            vector = np.array(values, dtype=np.float64)
            if vector.shape != (dim,):
                raise ArgumentError(
                    f"Vector for {word!r} has shape {vector.shape}, expected ({dim},)",
                    {"word": word},
                )
            vector.setflags(write=False)
            self._vectors[word] = vector

    def __contains__(self, word: object) -> bool:
        return word in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingTable):
            return NotImplemented
        return (
            self.dim == other.dim
            and self._vectors.keys() == other._vectors.keys()
            and all(np.array_equal(v, other._vectors[w]) for w, v in self._vectors.items())
        )

    @property
    def words(self) -> list[str]:
        """Words in file order."""
        return list(self._vectors)

    def with_policy(self, oov_policy: OovPolicy) -> EmbeddingTable:
        return EmbeddingTable(self.dim, self._vectors, oov_policy)

    def lookup(self, word: str) -> np.ndarray:
        """Vector for ``word``; OOV words resolve through the table's policy."""
        vector = self._vectors.get(word)
        if vector is not None:
            return vector.copy()
        if self.oov_policy.kind is OovKind.ZERO_VECTOR:
            return np.zeros(self.dim)
        digest = hashlib.blake2b(
            f"{self.oov_policy.seed}\x00{word}".encode(), digest_size=8
        ).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        return rng.uniform(-0.5, 0.5, size=self.dim)


def phrase_embedding(table: EmbeddingTable, words: Sequence[str]) -> np.ndarray:
    """Element-wise mean of the word vectors of ``words``.

    Raises:
        ArgumentError: If ``words`` is empty
    """
    if len(words) == 0:
        raise ArgumentError("phrase_embedding needs at least one word")
    return np.mean(np.stack([table.lookup(w) for w in words]), axis=0)


def load_embeddings(path: str | Path, oov_policy: OovPolicy | None = None) -> EmbeddingTable:
    """Read a word2vec text file (``count dim`` header, then ``word v1 .. vdim``).

    Duplicate words keep their first occurrence.

    Raises:
        ParseError: If the header is malformed or a row has the wrong length
    """
    path = Path(path)
    vectors: dict[str, list[float]] = {}
    duplicates = 0
    with path.open(encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise ParseError("expected header 'count dim'", str(path), 1)
        try:
            declared_count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError("header values must be integers", str(path), 1) from None

        for line_number, raw in enumerate(handle, start=2):
            parts = raw.rstrip("\r\n").split(" ")
            if parts == [""]:
                continue
            word, values = parts[0], [p for p in parts[1:] if p]
            if len(values) != dim:
                raise ParseError(
                    f"row for {word!r} has {len(values)} values, expected {dim}",
                    str(path),
                    line_number,
                )
            if word in vectors:
                duplicates += 1
                continue
            try:
                row = [float(v) for v in values]
            except ValueError:
                raise ParseError(f"non-numeric value in row for {word!r}", str(path), line_number) from None
            if not np.isfinite(row).all():
                raise ParseError(f"non-finite value in row for {word!r}", str(path), line_number)
            vectors[word] = row

    table = EmbeddingTable(dim, vectors, oov_policy)
    logger.info(
        "embeddings_loaded",
        path=str(path),
        words=len(table),
        dim=dim,
        declared_count=declared_count,
        duplicates=duplicates,
    )
    return table


def save_embeddings(table: EmbeddingTable, path: str | Path, words: Iterable[str] | None = None) -> None:
    """Write ``table`` in word2vec text format with round-trippable decimals."""
    selected = list(words) if words is not None else table.words
    with Path(path).open("w", encoding="utf-8") as handle:
        handle.write(f"{len(selected)} {table.dim}\n")
        for word in selected:
            values = " ".join(repr(float(x)) for x in table.lookup(word))
            handle.write(f"{word} {values}\n")
