"""``train``: fit a matcher on the train split, select on val, save the best epoch."""

from pathlib import Path
from typing import Any, TextIO

from app.config import RunConfig
from app.core.logging import get_logger
from app.utils.exceptions import UsageError
from libs.graph_match.constants import SPECIAL_RELATIONS
from services.dataset import Split, read_pairs, select_split
from services.matching import MatchModel, ModelConfig, PairFeaturizer, build_model, save_model
from services.training import (
    TrainConfig,
    TrainingResult,
    evaluate,
    make_examples,
    run_repeats,
    run_seeds,
    train,
)

from .common import corpus_from_config, require_path

logger = get_logger(__name__)


def model_config(cfg: RunConfig, featurizer: PairFeaturizer, seed: int) -> ModelConfig:
    assert cfg.bases is not None
    return ModelConfig(
        kind=cfg.model,
        in_dim=featurizer.input_dim,
        num_relations=featurizer.num_relations,
        hidden_dim=cfg.hidden,
        num_layers=cfg.layers,
        num_bases=cfg.bases,
        decomposition=cfg.decomposition,
        final_activation=cfg.final_activation,
        seed=seed,
    )


def train_config(cfg: RunConfig) -> TrainConfig:
    assert cfg.epochs is not None
    return TrainConfig(
        epochs=cfg.epochs,
        base_lr=cfg.lr,
        warmup_fraction=cfg.warmup,
        batch_size=cfg.batch,
        seed=cfg.seed,
        threshold=cfg.threshold,
    )


def featurizer_manifest(featurizer: PairFeaturizer) -> dict[str, Any]:
    """What ``eval`` needs to rebuild the exact feature layout."""
    return {
        "deprels": sorted(set(featurizer.relation_vocab.base_relations) - set(SPECIAL_RELATIONS)),
        "embedding_dim": featurizer.corpus.table.dim,
        "hops": featurizer.hops,
        "ner_tags": list(featurizer.ner_vocab.tags),
        "pos_tags": list(featurizer.pos_vocab.tags),
    }


def write_epoch_log(result: TrainingResult, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(r.to_line() + "\n" for r in result.history), encoding="utf-8")


def run(cfg: RunConfig, out: TextIO) -> None:
    pairs = read_pairs(require_path(cfg, "pairs"))
    corpus = corpus_from_config(cfg)
    featurizer = PairFeaturizer(corpus, cfg.model, hops=cfg.hops)

    train_set = make_examples(featurizer, select_split(pairs, Split.TRAIN), "train split")
    val_set = make_examples(featurizer, select_split(pairs, Split.VAL), "val split")
    test_pairs = select_split(pairs, Split.TEST)
    tcfg = train_config(cfg)

    def fresh_model(seed: int) -> MatchModel:
        return build_model(model_config(cfg, featurizer, seed))

    if cfg.repeats > 1:
        if not test_pairs:
            raise UsageError("--repeats > 1 needs a test split to score each run", {"repeats": cfg.repeats})
        test_set = make_examples(featurizer, test_pairs, "test split")
        repeat_report = run_repeats(fresh_model, train_set, val_set, test_set, tcfg, cfg.repeats)
        result = repeat_report.runs[0].result
    else:
        seeds = run_seeds(cfg.seed, 1)[0]
        model = fresh_model(seeds.model_seed)
        result = train(model, train_set, val_set, tcfg.model_copy(update={"seed": seeds.shuffle_seed}))
        repeat_report = None

    cfg.checkpoint.parent.mkdir(parents=True, exist_ok=True)
    save_model(
        cfg.checkpoint,
        result.model,
        {"best_epoch": result.best_epoch, "featurizer": featurizer_manifest(featurizer)},
    )
    write_epoch_log(result, cfg.resolved_train_log)
    logger.info(
        "checkpoint_written",
        path=str(cfg.checkpoint),
        log=str(cfg.resolved_train_log),
        best_epoch=result.best_epoch,
    )

    out.write(f"parameters = {result.model.num_parameters()}\n")
    out.write(f"best_epoch = {result.best_epoch}\n")
    out.write("".join(f"val_{line}\n" for line in result.report.format().splitlines()))
    if repeat_report is not None:
        out.write(repeat_report.format())
    elif test_pairs:
        test = evaluate(result.model, make_examples(featurizer, test_pairs, "test split"), tcfg.threshold)
        out.write("".join(f"test_{line}\n" for line in test.format().splitlines()))
