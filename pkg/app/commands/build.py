"""``build``: candidate retrieval, filtering, balancing and splitting."""

from typing import TextIO

from app.config import RunConfig
from app.core.logging import get_logger
from services.dataset import (
    BuildOptions,
    build_dataset,
    dataset_stats,
    load_labels,
    load_word_frequencies,
    write_pairs,
)

from .common import corpus_from_config, optional_path, require_path

logger = get_logger(__name__)


def run(cfg: RunConfig, out: TextIO) -> None:
    labels_path = require_path(cfg, "labels")
    freq_path = optional_path(cfg, "word_freq")
    corpus = corpus_from_config(cfg)
    labels = load_labels(labels_path)
    freq = load_word_frequencies(freq_path) if freq_path else None

    options = BuildOptions(
        cap=cfg.cap,
        ratio=cfg.ratio,
        split_mode=cfg.split_mode,
        fractions=(cfg.train_fraction, cfg.test_fraction),
        val_size=cfg.val_size,
        seed=cfg.seed,
    )
    pairs = build_dataset(corpus, labels, options, freq)

    cfg.pairs.parent.mkdir(parents=True, exist_ok=True)
    write_pairs(pairs, cfg.pairs)
    logger.info("pairs_written", path=str(cfg.pairs), pairs=len(pairs))
    out.write(dataset_stats(pairs, corpus.concept_graph).format())
