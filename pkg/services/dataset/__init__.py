"""Corpus loading, pair records, dataset construction and synthetic data."""

from .construction import (
    BuildOptions,
    DatasetStats,
    SplitMode,
    StatsRow,
    WordFrequencyTable,
    balance_negatives,
    build_dataset,
    dataset_stats,
    load_labels,
    load_word_frequencies,
    make_splits,
    redundancy_filter,
    retrieve_candidates,
    save_labels,
    word_frequencies_from_parses,
)
from .corpus import Corpus, load_corpus
from .pairs import (
    PairExample,
    Split,
    make_pair_id,
    read_pairs,
    require_labeled,
    select_split,
    validate_pairs,
    write_pairs,
)
from .synthetic import SyntheticConfig, SyntheticCorpus, generate_synthetic, planted_label

__all__ = [
    "BuildOptions",
    "DatasetStats",
    "SplitMode",
    "StatsRow",
    "WordFrequencyTable",
    "balance_negatives",
    "build_dataset",
    "dataset_stats",
    "load_labels",
    "load_word_frequencies",
    "make_splits",
    "redundancy_filter",
    "retrieve_candidates",
    "save_labels",
    "word_frequencies_from_parses",
    "Corpus",
    "load_corpus",
    "PairExample",
    "Split",
    "make_pair_id",
    "read_pairs",
    "require_labeled",
    "select_split",
    "validate_pairs",
    "write_pairs",
    "SyntheticConfig",
    "SyntheticCorpus",
    "generate_synthetic",
    "planted_label",
]
