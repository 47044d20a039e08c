"""``synth``: write a synthetic corpus with planted labels.

Besides the corpus files, the output directory gets ``run.conf``: the data
keys ``build``, ``train`` and ``eval`` need, so that
``tagmatch build --config <dir>/run.conf`` works as is.
"""

from pathlib import Path
from typing import TextIO

from app.config import RunConfig
from app.core.logging import get_logger
from services.dataset import SyntheticConfig, generate_synthetic

logger = get_logger(__name__)

RUN_CONFIG_NAME = "run.conf"
DATASET_NAME = "dataset.jsonl"


def synthetic_config(cfg: RunConfig) -> SyntheticConfig:
    return SyntheticConfig(
        num_concepts=cfg.synth_concepts,
        num_sentences=cfg.synth_sentences,
        entities_per_concept=cfg.synth_entities,
        embedding_dim=cfg.synth_embedding_dim,
        negation_rate=cfg.synth_negation_rate,
        distractor_rate=cfg.synth_distractor_rate,
        second_entity_rate=cfg.synth_second_entity_rate,
        seed=cfg.seed,
    )


def write_run_config(directory: Path, paths: dict[str, Path], num_pairs: int, cfg: RunConfig) -> Path:
    """Data keys only; model and training keys keep their defaults."""
    values = {
        "concept_edges": paths["concept_edges"],
        "concept_nodes": paths["concept_nodes"],
        "sentences": paths["sentences"],
        "concept_parses": paths["concept_parses"],
        "embeddings": paths["embeddings"],
        "labels": paths["labels"],
        "pairs": directory / DATASET_NAME,
        "checkpoint": directory / "model.ckpt",
        "seed": cfg.seed,
        # the 1000 default exceeds a synthetic train split
        "val_size": max(1, num_pairs // 10),
    }
    path = directory / RUN_CONFIG_NAME
    path.write_text("".join(f"{k} = {v}\n" for k, v in values.items()), encoding="utf-8")
    return path


def run(cfg: RunConfig, out: TextIO) -> None:
    synthetic = generate_synthetic(synthetic_config(cfg))
    paths = synthetic.write(cfg.out_dir)
    paths["run_config"] = write_run_config(cfg.out_dir, paths, len(synthetic.pairs), cfg)
    logger.info("run_config_written", path=str(paths["run_config"]))
    for key in sorted(paths):
        out.write(f"{key} = {paths[key]}\n")
