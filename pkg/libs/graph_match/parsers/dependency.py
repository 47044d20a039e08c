"""Ingestion of pre-computed dependency parses.

File format (UTF-8)::

    #deprels nsubj,obj,amod,neg,root
                                        <- blank line separates blocks
    #id s1
    #entities 1:2 NextStopHappiness     <- 1-based inclusive token span
    1   Next      NNP  WORK  2  compound
    2   Stop      NNP  WORK  3  nsubj
    ...

Token columns are tab-separated: ``index form pos ner head deprel``. Head 0 is
ROOT; indices are 1-based in the file and 0-based in memory.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from pathlib import Path

import structlog

from ..constants import COMMENT_PREFIX, NONE_TAG
from ..exceptions import ParseError, ValidationError

logger = structlog.get_logger(__name__)

ID, FORM, POS, NER, HEAD, DEPREL = range(6)

DEPRELS_HEADER = "#deprels"
ID_HEADER = "#id"
ENTITIES_HEADER = "#entities"


@dataclass(frozen=True)
class Token:
    """One token of a parse. ``head`` is None for the ROOT token."""

    form: str
    pos: str
    ner: str
    head: int | None
    deprel: str


@dataclass(frozen=True)
class EntityMention:
    """Named entity over tokens ``[start, end)`` linked to a concept-graph entity."""

    start: int
    end: int
    entity_id: str

    @property
    def span(self) -> range:
        return range(self.start, self.end)


@dataclass(frozen=True)
class DependencyParse:
    """A tokenized, dependency-parsed sentence or concept phrase."""

    id: str
    tokens: tuple[Token, ...]
    named_entities: tuple[EntityMention, ...] = field(default=())

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    @property
    def root(self) -> int:
        return next(i for i, t in enumerate(self.tokens) if t.head is None)

    @property
    def entity_ids(self) -> set[str]:
        return {m.entity_id for m in self.named_entities}

    def mention_of(self, index: int) -> EntityMention | None:
        """The entity mention covering token ``index``, if any."""
        for mention in self.named_entities:
            if mention.start <= index < mention.end:
                return mention
        return None

    def neighbors(self, index: int) -> set[int]:
        """Token indices adjacent to ``index`` in the dependency tree."""
        adjacent = {i for i, t in enumerate(self.tokens) if t.head == index}
        head = self.tokens[index].head
        if head is not None:
            adjacent.add(head)
        return adjacent


def validate_parse(parse: DependencyParse, deprels: frozenset[str] | None = None) -> None:
    """Check the tree and span invariants of one parse.

    Raises:
        ValidationError: Naming the parse id and the violated invariant
    """
    n = len(parse.tokens)
    details = {"parse_id": parse.id}
    if n == 0:
        raise ValidationError(f"Parse {parse.id!r} has no tokens", details)

    roots = [i for i, t in enumerate(parse.tokens) if t.head is None]
    if len(roots) != 1:
        raise ValidationError(
            f"Parse {parse.id!r} must have exactly one ROOT token, found {len(roots)}", details
        )

    for i, token in enumerate(parse.tokens):
        if token.head is not None and not 0 <= token.head < n:
            raise ValidationError(
                f"Parse {parse.id!r}: token {i + 1} has out-of-range head {token.head + 1}", details
            )
        if token.head == i:
            raise ValidationError(f"Parse {parse.id!r}: token {i + 1} heads itself", details)
        if deprels is not None and token.deprel not in deprels:
            raise ValidationError(
                f"Parse {parse.id!r}: dependency label {token.deprel!r} is not declared",
                {**details, "deprel": token.deprel},
            )

    # every chain of heads must reach ROOT within n steps
    for i in range(n):
        current: int | None = i
        for _ in range(n + 1):
            if current is None:
                break
            current = parse.tokens[current].head
        else:
            raise ValidationError(f"Parse {parse.id!r}: cyclic heads at token {i + 1}", details)

    covered: set[int] = set()
    for mention in parse.named_entities:
        if not 0 <= mention.start < mention.end <= n:
            raise ValidationError(
                f"Parse {parse.id!r}: entity span {mention.start + 1}:{mention.end} out of bounds",
                {**details, "entity_id": mention.entity_id},
            )
        if covered & set(mention.span):
            raise ValidationError(
                f"Parse {parse.id!r}: entity span {mention.start + 1}:{mention.end} overlaps another",
                {**details, "entity_id": mention.entity_id},
            )
        covered |= set(mention.span)


@dataclass
class _Block:
    parse_id: str | None = None
    first_line: int = 0
    entities: list[tuple[int, str, str]] = field(default_factory=list)
    rows: list[tuple[int, list[str]]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return self.parse_id is None and not self.rows and not self.entities


def _iter_blocks(path: Path) -> Iterator[tuple[str, _Block] | tuple[str, frozenset[str]]]:
    block = _Block()
    with path.open(encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                if not block.empty:
                    yield "block", block
                block = _Block()
                continue
            if line.startswith(DEPRELS_HEADER):
                labels = line[len(DEPRELS_HEADER) :].strip()
                yield "deprels", frozenset(x.strip() for x in labels.split(",") if x.strip())
                continue
            if block.empty:
                block.first_line = line_number
            if line.startswith(ID_HEADER):
                block.parse_id = line[len(ID_HEADER) :].strip()
            elif line.startswith(ENTITIES_HEADER):
                parts = line[len(ENTITIES_HEADER) :].split()
                if len(parts) != 2 or ":" not in parts[0]:
                    raise ParseError(
                        "expected '#entities i:j entity_id'", str(path), line_number
                    )
                block.entities.append((line_number, parts[0], parts[1]))
            elif line.startswith(COMMENT_PREFIX):
                continue
            else:
                block.rows.append((line_number, line.split("\t")))
    if not block.empty:
        yield "block", block


def _build_parse(path: Path, block: _Block) -> DependencyParse:
    if not block.parse_id:
        raise ParseError("parse block without '#id' line", str(path), block.first_line)
    tokens: list[Token] = []
    for expected, (line_number, columns) in enumerate(block.rows, start=1):
        if len(columns) != 6:
            raise ParseError(
                f"expected 6 tab-separated columns (index form pos ner head deprel), got {len(columns)}",
                str(path),
                line_number,
            )
        try:
            index, head = int(columns[ID]), int(columns[HEAD])
        except ValueError:
            raise ParseError("token index and head must be integers", str(path), line_number) from None
        if index != expected:
            raise ParseError(f"expected token index {expected}, got {index}", str(path), line_number)
        tokens.append(
            Token(
                form=columns[FORM],
                pos=columns[POS],
                ner=columns[NER] or NONE_TAG,
                head=None if head == 0 else head - 1,
                deprel=columns[DEPREL],
            )
        )

    mentions: list[EntityMention] = []
    for line_number, span, entity_id in block.entities:
        try:
            start, end = (int(x) for x in span.split(":"))
        except ValueError:
            raise ParseError(f"bad entity span {span!r}", str(path), line_number) from None
        mentions.append(EntityMention(start - 1, end, entity_id))

    return DependencyParse(block.parse_id, tuple(tokens), tuple(mentions))


class ParseSet(dict[str, DependencyParse]):
    """Parses keyed by id, together with the declared dependency label set."""

    def __init__(self, parses: Mapping[str, DependencyParse] | None = None, deprels: Iterable[str] = ()):
        super().__init__(parses or {})
        self.deprels: frozenset[str] = frozenset(deprels)


def load_parses(path: str | Path) -> ParseSet:
    """Load and validate every parse in ``path``.

    Returns:
        ParseSet mapping parse id to parse; ``.deprels`` holds the declared labels

    Raises:
        ParseError: If a line is malformed
        ValidationError: If a parse violates a tree/span invariant (names the parse id)
    """
    path = Path(path)
    deprels: frozenset[str] | None = None
    parses: dict[str, DependencyParse] = {}
    for kind, payload in _iter_blocks(path):
        if kind == "deprels":
            assert isinstance(payload, frozenset)
            deprels = payload if deprels is None else deprels | payload
            continue
        assert isinstance(payload, _Block)
        if deprels is None:
            raise ParseError(
                f"'{DEPRELS_HEADER}' header must precede the first parse", str(path), payload.first_line
            )
        parse = _build_parse(path, payload)
        validate_parse(parse, deprels)
        if parse.id in parses:
            raise ValidationError(f"Duplicate parse id {parse.id!r}", {"parse_id": parse.id})
        parses[parse.id] = parse

    logger.info("parses_loaded", path=str(path), parses=len(parses), deprels=len(deprels or ()))
    return ParseSet(parses, deprels or ())


def dump_parses(
    parses: Mapping[str, DependencyParse] | Iterable[DependencyParse],
    path: str | Path,
    deprels: Iterable[str],
) -> None:
    """Write parses in the format read by ``load_parses``."""
    items = parses.values() if isinstance(parses, Mapping) else parses
    with Path(path).open("w", encoding="utf-8") as handle:
        handle.write(f"{DEPRELS_HEADER} {','.join(sorted(deprels))}\n")
        for parse in items:
            handle.write(f"\n{ID_HEADER} {parse.id}\n")
            for mention in parse.named_entities:
                handle.write(f"{ENTITIES_HEADER} {mention.start + 1}:{mention.end} {mention.entity_id}\n")
            for i, token in enumerate(parse.tokens, start=1):
                head = 0 if token.head is None else token.head + 1
                handle.write(f"{i}\t{token.form}\t{token.pos}\t{token.ner}\t{head}\t{token.deprel}\n")
