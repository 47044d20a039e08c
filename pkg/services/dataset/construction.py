"""Dataset construction: candidate retrieval, redundancy filtering,
negative balancing, train/val/test splitting and dataset statistics.

``build_dataset`` chains the steps the way the ``build`` command runs them:

    retrieve (every concept) -> redundancy filter -> join labels
        -> balance negatives -> split
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Literal

import numpy as np
import structlog

from libs.graph_match.concept_graph import ConceptGraph, NodeKind, context_subgraph, entities_of
from libs.graph_match.constants import COMMENT_PREFIX
from libs.graph_match.exceptions import ArgumentError, ParseError, PartitionError, ValidationError
from libs.graph_match.parsers import DependencyParse

from .corpus import Corpus
from .pairs import PairExample, Split, make_pair_id, validate_pairs

logger = structlog.get_logger(__name__)


class SplitMode(str, Enum):
    RANDOM = "random"
    NON_OVERLAPPED = "non-overlapped"


# -- retrieval ---------------------------------------------------------------


def retrieve_candidates(g: ConceptGraph, parses: Mapping[str, DependencyParse], concept: str) -> list[str]:
    """Ids of the sentences naming at least one entity of ``concept``, sorted.

    Raises:
        NodeNotFoundError: If ``concept`` is unknown or not a Concept
    """
    entities = entities_of(g, concept)
    if not entities:
        return []
    return sorted(sid for sid, parse in parses.items() if parse.entity_ids & entities)


# -- redundancy filter -------------------------------------------------------


@dataclass(frozen=True)
class WordFrequencyTable:
    """Word counts; absent words count 0."""

    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        negative = [w for w, c in self.counts.items() if c < 0]
        if negative:
            raise ValidationError(f"Negative word frequencies: {negative[:5]}", {"words": negative[:5]})

    def frequency(self, word: str) -> int:
        return int(self.counts.get(word, 0))

    def aggregate(self, words: Iterable[str]) -> int:
        return sum(self.frequency(w) for w in words)


def load_word_frequencies(path: str | Path) -> WordFrequencyTable:
    """Read ``word<TAB>count`` lines; ``#`` comments and blank lines are skipped."""
    counts: dict[str, int] = {}
    for line_number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not raw.strip() or raw.startswith(COMMENT_PREFIX):
            continue
        parts = raw.split("\t")
        if len(parts) != 2:
            raise ParseError("expected word<TAB>count", str(path), line_number)
        try:
            count = int(parts[1])
        except ValueError:
            raise ParseError(f"count {parts[1]!r} is not an integer", str(path), line_number) from None
        if count < 0:
            raise ParseError(f"negative count {count}", str(path), line_number)
        counts.setdefault(parts[0], count)
    return WordFrequencyTable(counts)


def word_frequencies_from_parses(parses: Iterable[DependencyParse]) -> WordFrequencyTable:
    return WordFrequencyTable(Counter(form for parse in parses for form in parse.forms))


def _id_tokens(concept: str) -> list[str]:
    return [w for w in re.split(r"[\s_]+", concept) if w] or [concept]


def redundancy_filter(
    candidates: Mapping[str, Sequence[str]],
    freq: WordFrequencyTable,
    cap: int = 4,
    concept_tokens: Callable[[str], Sequence[str]] | None = None,
) -> dict[str, list[str]]:
    """Keep, per sentence, the ``cap`` concepts with the lowest aggregate word frequency.

    Ties are broken by concept id. ``concept_tokens`` maps a concept to its
    words (default: the id split on whitespace and underscores).
    """
    if cap < 1:
        raise ArgumentError(f"cap must be >= 1, got {cap}", {"cap": cap})
    tokens_of = concept_tokens or _id_tokens
    filtered: dict[str, list[str]] = {}
    for sentence, concepts in candidates.items():
        ranked = sorted(set(concepts), key=lambda c: (freq.aggregate(tokens_of(c)), c))
        filtered[sentence] = ranked[:cap]
    return filtered


# -- balancing ---------------------------------------------------------------


def balance_negatives(pairs: Sequence[PairExample], ratio: float = 1.0, seed: int = 0) -> list[PairExample]:
    """Down-sample negatives to ``round(ratio * positives)`` (capped at what exists).

    Positives and unlabeled pairs pass through untouched; input order is kept.

    Raises:
        ArgumentError: If there is no positive pair or ``ratio`` < 0
    """
    if ratio < 0:
        raise ArgumentError(f"ratio must be >= 0, got {ratio}")
    positives = sum(1 for p in pairs if p.label == 1)
    if positives == 0:
        raise ArgumentError("Cannot balance a set without positive pairs")
    negative_idx = [i for i, p in enumerate(pairs) if p.label == 0]
    keep_count = min(round(ratio * positives), len(negative_idx))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(negative_idx), size=keep_count, replace=False)
    keep = {negative_idx[int(k)] for k in chosen}
    balanced = [p for i, p in enumerate(pairs) if p.label != 0 or i in keep]
    logger.info(
        "negatives_balanced", positives=positives, negatives=len(negative_idx), kept=keep_count
    )
    return balanced


# -- splitting ---------------------------------------------------------------


def _check_fractions(fractions: tuple[float, float]) -> None:
    train, test = fractions
    if train <= 0 or test <= 0 or train + test > 1 + 1e-9:
        raise ArgumentError(
            f"split fractions must be positive and sum to <= 1, got {fractions}",
            {"train": train, "test": test},
        )


def _greedy_fill(groups: Sequence[str], sizes: Mapping[str, int], target: int) -> list[str]:
    """Take groups in order while the running total stays <= target."""
    taken, total = [], 0
    for group in groups:
        if total + sizes[group] <= target:
            taken.append(group)
            total += sizes[group]
    return taken


def make_splits(
    pairs: Sequence[PairExample],
    mode: SplitMode = SplitMode.RANDOM,
    fractions: tuple[float, float] = (0.8, 0.2),
    val_size: int = 1000,
    seed: int = 0,
) -> list[PairExample]:
    """Assign every pair to train, val, test (or none when fractions sum < 1).

    RANDOM shuffles pairs and cuts by fraction; val is drawn uniformly from
    train. NON_OVERLAPPED partitions concepts instead, greedily filling test
    (then train) without exceeding its target size, and carves val from the
    train concepts the same way, so train/test and val/remaining-train share no
    concept. Input order is preserved in the output.

    Raises:
        ArgumentError: On invalid fractions or negative val_size
        PartitionError: If test ends up empty, or val_size >= the train size,
            or val/train cannot both be non-empty
    """
    _check_fractions(fractions)
    if val_size < 0:
        raise ArgumentError(f"val_size must be >= 0, got {val_size}")
    n = len(pairs)
    rng = np.random.default_rng(seed)
    f_train, f_test = fractions
    assignment: list[Split] = [Split.NONE] * n

    if mode is SplitMode.RANDOM:
        order = rng.permutation(n)
        n_train = round(f_train * n)
        n_test = min(round(f_test * n), n - n_train)
        if n_test == 0 or n_train == 0:
            raise PartitionError(
                f"{n} pairs cannot be split into non-empty train and test sets", {"pairs": n}
            )
        if val_size >= n_train:
            raise PartitionError(
                f"val_size {val_size} must be smaller than the train size {n_train}",
                {"val_size": val_size, "train": n_train},
            )
        train_idx = [int(i) for i in order[:n_train]]
        for i in train_idx:
            assignment[i] = Split.TRAIN
        for i in order[n_train : n_train + n_test]:
            assignment[int(i)] = Split.TEST
        for k in rng.choice(n_train, size=val_size, replace=False):
            assignment[train_idx[int(k)]] = Split.VAL
    else:
        sizes = Counter(p.concept for p in pairs)
        concepts = [str(c) for c in rng.permutation(sorted(sizes))] if sizes else []
        test_concepts = set(_greedy_fill(concepts, sizes, round(f_test * n)))
        rest = [c for c in concepts if c not in test_concepts]
        test_count = sum(sizes[c] for c in test_concepts)
        train_target = n - test_count if f_train + f_test >= 1 - 1e-9 else round(f_train * n)
        train_concepts = _greedy_fill(rest, sizes, train_target)
        train_count = sum(sizes[c] for c in train_concepts)
        if not test_concepts or not train_concepts:
            raise PartitionError(
                "Cannot partition concepts into non-empty disjoint train and test sets",
                {"concepts": len(concepts), "pairs": n, "largest_concept": max(sizes.values(), default=0)},
            )
        if val_size >= train_count:
            raise PartitionError(
                f"val_size {val_size} must be smaller than the train size {train_count}",
                {"val_size": val_size, "train": train_count},
            )
        shuffled_train = [str(c) for c in rng.permutation(sorted(train_concepts))]
        val_concepts = set(_greedy_fill(shuffled_train, sizes, val_size)) if val_size else set()
        if val_size and not val_concepts:
            raise PartitionError(
                f"No train concept fits into a validation set of {val_size} pairs",
                {"val_size": val_size},
            )
        by_concept = {c: Split.TRAIN for c in train_concepts}
        by_concept.update({c: Split.VAL for c in val_concepts})
        by_concept.update({c: Split.TEST for c in test_concepts})
        assignment = [by_concept.get(p.concept, Split.NONE) for p in pairs]

    split_pairs = [p.with_split(s) for p, s in zip(pairs, assignment, strict=True)]
    counts = Counter(s.value for s in assignment)
    logger.info(
        "splits_made",
        mode=mode.value,
        **{k: counts.get(k, 0) for k in ("train", "val", "test", "none")},
    )
    return split_pairs


# -- statistics --------------------------------------------------------------


@dataclass(frozen=True)
class StatsRow:
    concepts: int = 0
    sentences: int = 0
    positives: int = 0
    pairs: int = 0
    cg_relations: int = 0


@dataclass
class DatasetStats:
    rows: dict[str, StatsRow]

    def format(self) -> str:
        header = "split\tconcepts\tsentences\tpositives\tpairs\tcg_relations"
        lines = [header]
        for name, row in self.rows.items():
            lines.append(
                f"{name}\t{row.concepts}\t{row.sentences}\t{row.positives}\t{row.pairs}\t{row.cg_relations}"
            )
        return "\n".join(lines) + "\n"


def _cg_relations(g: ConceptGraph, concepts: Iterable[str]) -> int:
    edges: set[tuple[str, str, str]] = set()
    for concept in concepts:
        if concept in g and g.kind(concept) is NodeKind.CONCEPT:
            edges.update(context_subgraph(g, concept, set(), 1).edges)
    return len(edges)


def _row(pairs: Sequence[PairExample], g: ConceptGraph) -> StatsRow:
    concepts = {p.concept for p in pairs}
    return StatsRow(
        concepts=len(concepts),
        sentences=len({p.sentence for p in pairs}),
        positives=sum(1 for p in pairs if p.label == 1),
        pairs=len(pairs),
        cg_relations=_cg_relations(g, sorted(concepts)),
    )


def dataset_stats(pairs: Sequence[PairExample], g: ConceptGraph) -> DatasetStats:
    """Counts over all pairs and per split.

    ``cg_relations`` is the number of distinct concept-graph edges in the
    one-hop contexts of the row's concepts.
    """
    rows = {"all": _row(pairs, g)}
    for split in (Split.TRAIN, Split.VAL, Split.TEST):
        rows[split.value] = _row([p for p in pairs if p.split is split], g)
    return DatasetStats(rows)


# -- labels and the full pipeline -------------------------------------------


def load_labels(path: str | Path) -> dict[tuple[str, str], Literal[0, 1]]:
    """Read ``concept<TAB>sentence<TAB>label`` lines."""
    labels: dict[tuple[str, str], Literal[0, 1]] = {}
    for line_number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not raw.strip() or raw.startswith(COMMENT_PREFIX):
            continue
        parts = raw.split("\t")
        if len(parts) != 3 or parts[2] not in ("0", "1"):
            raise ParseError("expected concept<TAB>sentence<TAB>0|1", str(path), line_number)
        key = (parts[0], parts[1])
        if key in labels:
            raise ParseError(f"duplicate label for {key}", str(path), line_number)
        labels[key] = 1 if parts[2] == "1" else 0
    return labels


def save_labels(labels: Mapping[tuple[str, str], int], path: str | Path) -> None:
    lines = [f"{c}\t{s}\t{label}\n" for (c, s), label in sorted(labels.items())]
    Path(path).write_text("".join(lines), encoding="utf-8")


@dataclass(frozen=True)
class BuildOptions:
    cap: int = 4
    ratio: float = 1.0
    split_mode: SplitMode = SplitMode.RANDOM
    fractions: tuple[float, float] = (0.8, 0.2)
    val_size: int = 1000
    seed: int = 0


def build_dataset(
    corpus: Corpus,
    labels: Mapping[tuple[str, str], Literal[0, 1]],
    options: BuildOptions,
    freq: WordFrequencyTable | None = None,
) -> list[PairExample]:
    """Run the whole construction pipeline; returns pairs with splits assigned."""
    g = corpus.concept_graph
    freq = freq or word_frequencies_from_parses(corpus.sentences.values())

    by_sentence: dict[str, list[str]] = defaultdict(list)
    for concept in g.node_ids(NodeKind.CONCEPT):
        for sentence in retrieve_candidates(g, corpus.sentences, concept):
            by_sentence[sentence].append(concept)
    filtered = redundancy_filter(by_sentence, freq, options.cap, corpus.concept_tokens)

    pairs: list[PairExample] = []
    unlabeled = 0
    for sentence in sorted(filtered):
        for concept in filtered[sentence]:
            label = labels.get((concept, sentence))
            if label is None:
                unlabeled += 1
                continue
            pairs.append(
                PairExample(
                    pair_id=make_pair_id(concept, sentence),
                    concept=concept,
                    sentence=sentence,
                    label=label,
                )
            )
    if unlabeled:
        logger.warning("unlabeled_candidates_dropped", count=unlabeled)
    validate_pairs(pairs)

    balance_seq, split_seq = np.random.SeedSequence(options.seed).spawn(2)
    balance_seed, split_seed = int(balance_seq.generate_state(1)[0]), int(split_seq.generate_state(1)[0])
    pairs = balance_negatives(pairs, options.ratio, balance_seed)
    pairs = make_splits(pairs, options.split_mode, options.fractions, options.val_size, split_seed)
    logger.info(
        "dataset_built",
        candidates=sum(len(v) for v in by_sentence.values()),
        kept=sum(len(v) for v in filtered.values()),
        pairs=len(pairs),
    )
    return pairs
