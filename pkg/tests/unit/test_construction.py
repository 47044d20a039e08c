"""Unit tests for dataset construction and pair records."""

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from libs.graph_match.exceptions import (
    ArgumentError,
    NodeNotFoundError,
    ParseError,
    PartitionError,
    ValidationError,
)
from services.dataset import (
    BuildOptions,
    PairExample,
    Split,
    SplitMode,
    WordFrequencyTable,
    balance_negatives,
    build_dataset,
    dataset_stats,
    load_labels,
    load_word_frequencies,
    make_pair_id,
    make_splits,
    read_pairs,
    redundancy_filter,
    retrieve_candidates,
    save_labels,
    select_split,
    write_pairs,
)
from tests.factories import make_pairs

pytestmark = pytest.mark.unit


def _grid(concepts: int, per_concept: int) -> list[PairExample]:
    return make_pairs(
        [(f"c{c}", f"s{c}_{k}", (c + k) % 2) for c in range(concepts) for k in range(per_concept)]
    )


class TestRetrieval:
    """Test retrieve_candidates."""

    def test_sentences_naming_an_entity(self, series_corpus):
        g, sentences = series_corpus.concept_graph, series_corpus.sentences

        assert retrieve_candidates(g, sentences, "highly_rated_series") == ["s1"]
        assert retrieve_candidates(g, sentences, "popular_dramas") == ["s1"]

    def test_concept_without_entities(self, series_corpus):
        assert retrieve_candidates(series_corpus.concept_graph, series_corpus.sentences, "series") == []

    def test_entity_is_not_a_concept(self, series_corpus):
        with pytest.raises(NodeNotFoundError):
            retrieve_candidates(series_corpus.concept_graph, series_corpus.sentences, "reset")


class TestRedundancyFilter:
    """Test redundancy_filter and word frequencies."""

    def test_keeps_rarest_concepts(self):
        freq = WordFrequencyTable({"popular": 50, "dramas": 5, "rare": 1, "series": 10})

        kept = redundancy_filter({"s": ["popular_dramas", "rare_series", "popular_series"]}, freq, cap=2)

        assert kept == {"s": ["rare_series", "popular_dramas"]}

    def test_ties_broken_by_id(self):
        kept = redundancy_filter({"s": ["b", "a", "c"]}, WordFrequencyTable(), cap=2)

        assert kept == {"s": ["a", "b"]}

    def test_invalid_cap(self):
        with pytest.raises(ArgumentError):
            redundancy_filter({}, WordFrequencyTable(), cap=0)

    def test_negative_frequency(self):
        with pytest.raises(ValidationError):
            WordFrequencyTable({"x": -1})

    def test_load_word_frequencies(self, tmp_path):
        path = tmp_path / "freq.tsv"
        path.write_text("# counts\nthe\t100\nseries\t7\n")

        freq = load_word_frequencies(path)

        assert freq.frequency("series") == 7
        assert freq.frequency("absent") == 0

    def test_load_word_frequencies_bad_count(self, tmp_path):
        path = tmp_path / "freq.tsv"
        path.write_text("the\t100\nseries\tmany\n")

        with pytest.raises(ParseError) as exc_info:
            load_word_frequencies(path)

        assert exc_info.value.line_number == 2


class TestBalance:
    """Test balance_negatives."""

    def test_ratio_one(self):
        pairs = make_pairs([("c", f"s{i}", 1 if i < 3 else 0) for i in range(13)])

        balanced = balance_negatives(pairs, ratio=1.0, seed=4)

        labels = Counter(p.label for p in balanced)
        assert labels == {1: 3, 0: 3}
        assert balanced == [p for p in pairs if p in balanced]

    def test_deterministic(self):
        pairs = make_pairs([("c", f"s{i}", int(i % 5 == 0)) for i in range(40)])

        assert balance_negatives(pairs, 1.5, seed=2) == balance_negatives(pairs, 1.5, seed=2)

    def test_keeps_all_when_negatives_are_scarce(self):
        pairs = make_pairs([("c", "s0", 1), ("c", "s1", 1), ("c", "s2", 0)])

        assert balance_negatives(pairs, 2.0) == pairs

    def test_needs_a_positive(self):
        with pytest.raises(ArgumentError):
            balance_negatives(make_pairs([("c", "s", 0)]))


class TestSplits:
    """Test make_splits."""

    def test_random_sizes(self):
        pairs = make_splits(_grid(10, 10), SplitMode.RANDOM, (0.8, 0.2), val_size=10, seed=1)

        counts = Counter(p.split for p in pairs)
        assert counts == {Split.TRAIN: 70, Split.VAL: 10, Split.TEST: 20}

    def test_random_keeps_input_order(self):
        pairs = _grid(5, 4)

        split = make_splits(pairs, val_size=2)

        assert [p.pair_id for p in split] == [p.pair_id for p in pairs]

    def test_fractions_below_one_leave_pairs_unassigned(self):
        pairs = make_splits(_grid(10, 10), SplitMode.RANDOM, (0.5, 0.2), val_size=5)

        assert Counter(p.split for p in pairs)[Split.NONE] == 30

    def test_non_overlapped_partitions_concepts(self):
        pairs = make_splits(_grid(10, 10), SplitMode.NON_OVERLAPPED, (0.8, 0.2), val_size=10, seed=3)

        by_split = {s: {p.concept for p in select_split(pairs, s)} for s in (Split.TRAIN, Split.VAL, Split.TEST)}
        assert len(by_split[Split.TEST]) == 2
        assert len(by_split[Split.VAL]) == 1
        assert len(by_split[Split.TRAIN]) == 7
        assert not by_split[Split.TRAIN] & by_split[Split.TEST]
        assert not by_split[Split.VAL] & by_split[Split.TEST]
        assert not by_split[Split.VAL] & by_split[Split.TRAIN]

    def test_non_overlapped_single_concept(self):
        with pytest.raises(PartitionError):
            make_splits(_grid(1, 10), SplitMode.NON_OVERLAPPED, val_size=1)

    def test_val_size_too_large(self):
        with pytest.raises(PartitionError):
            make_splits(_grid(10, 10), SplitMode.RANDOM, (0.8, 0.2), val_size=80)

    def test_invalid_fractions(self):
        with pytest.raises(ArgumentError):
            make_splits(_grid(2, 2), fractions=(0.9, 0.2))

    def test_deterministic(self):
        first = make_splits(_grid(10, 10), SplitMode.NON_OVERLAPPED, val_size=5, seed=8)

        assert first == make_splits(_grid(10, 10), SplitMode.NON_OVERLAPPED, val_size=5, seed=8)

    @settings(max_examples=100, deadline=None)
    @given(
        sizes=st.lists(st.integers(1, 6), min_size=2, max_size=12),
        val_size=st.integers(0, 6),
        seed=st.integers(0, 2**16),
    )
    def test_non_overlapped_concepts_never_cross_splits(self, sizes, val_size, seed):
        pairs = make_pairs(
            [(f"c{c}", f"s{c}_{k}", k % 2) for c, size in enumerate(sizes) for k in range(size)]
        )

        try:
            split = make_splits(pairs, SplitMode.NON_OVERLAPPED, val_size=val_size, seed=seed)
        except PartitionError:
            return

        by_concept: dict[str, set[Split]] = {}
        for p in split:
            by_concept.setdefault(p.concept, set()).add(p.split)
        assert all(len(splits) == 1 for splits in by_concept.values())
        assert [p.pair_id for p in split] == [p.pair_id for p in pairs]
        assert sum(p.split is Split.VAL for p in split) <= val_size


class TestStats:
    """Test dataset_stats."""

    def test_counts(self, series_graph):
        pairs = make_pairs([("highly_rated_series", "s1", 0), ("popular_dramas", "s1", 0)], Split.TEST)

        stats = dataset_stats(pairs, series_graph)

        assert stats.rows["all"].concepts == 2
        assert stats.rows["all"].sentences == 1
        assert stats.rows["all"].positives == 0
        assert stats.rows["all"].cg_relations == 6
        assert stats.rows["test"].pairs == 2
        assert stats.rows["train"].pairs == 0

    def test_format(self, series_graph):
        text = dataset_stats(make_pairs([("series", "s1", 1)]), series_graph).format()

        lines = text.splitlines()
        assert lines[0] == "split\tconcepts\tsentences\tpositives\tpairs\tcg_relations"
        assert [line.split("\t")[0] for line in lines[1:]] == ["all", "train", "val", "test"]


class TestLabelsAndPairs:
    """Test the label and pairs file codecs."""

    def test_labels_round_trip(self, tmp_path):
        labels = {("c1", "s1"): 1, ("c2", "s1"): 0}
        path = tmp_path / "labels.tsv"

        save_labels(labels, path)

        assert load_labels(path) == labels

    def test_bad_label(self, tmp_path):
        path = tmp_path / "labels.tsv"
        path.write_text("c\ts\t2\n")

        with pytest.raises(ParseError):
            load_labels(path)

    def test_duplicate_label(self, tmp_path):
        path = tmp_path / "labels.tsv"
        path.write_text("c\ts\t1\nc\ts\t0\n")

        with pytest.raises(ParseError) as exc_info:
            load_labels(path)

        assert exc_info.value.line_number == 2

    def test_pairs_round_trip(self, tmp_path):
        pairs = make_pairs([("c1", "s1", 1), ("c2", "s1", None)], Split.VAL)
        path = tmp_path / "pairs.jsonl"

        write_pairs(pairs, path)

        assert read_pairs(path) == pairs

    def test_pair_id(self):
        assert make_pair_id("popular_dramas", "s1") == "s1::popular_dramas"

    def test_duplicate_pairs(self, tmp_path):
        path = tmp_path / "pairs.jsonl"
        write_pairs(make_pairs([("c", "s", 1)]) * 2, path)

        with pytest.raises(ValidationError):
            read_pairs(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "pairs.jsonl"
        path.write_text('{"pair_id": "s::c", "concept": "c", "sentence": "s"}\n{oops\n')

        with pytest.raises(ParseError) as exc_info:
            read_pairs(path)

        assert exc_info.value.line_number == 2

    def test_invalid_label_value(self, tmp_path):
        path = tmp_path / "pairs.jsonl"
        path.write_text('{"pair_id": "s::c", "concept": "c", "sentence": "s", "label": 3}\n')

        with pytest.raises(ParseError):
            read_pairs(path)


class TestBuildDataset:
    """Test the whole pipeline on a synthetic corpus."""

    @pytest.fixture
    def options(self) -> BuildOptions:
        return BuildOptions(cap=4, ratio=1.0, val_size=3, seed=6)

    def test_labels_come_from_the_label_table(self, small_synthetic, options):
        pairs = build_dataset(small_synthetic.corpus, small_synthetic.labels, options)

        assert pairs
        for pair in pairs:
            assert pair.label == small_synthetic.labels[(pair.concept, pair.sentence)]
            assert pair.split is not Split.NONE

    def test_cap_per_sentence(self, small_synthetic):
        pairs = build_dataset(
            small_synthetic.corpus, small_synthetic.labels, BuildOptions(cap=1, val_size=2, seed=6)
        )

        assert max(Counter(p.sentence for p in pairs).values()) == 1

    def test_balanced(self, small_synthetic, options):
        pairs = build_dataset(small_synthetic.corpus, small_synthetic.labels, options)

        labels = Counter(p.label for p in pairs)
        assert labels[0] <= labels[1]

    def test_deterministic(self, small_synthetic, options):
        first = build_dataset(small_synthetic.corpus, small_synthetic.labels, options)

        assert first == build_dataset(small_synthetic.corpus, small_synthetic.labels, options)
