"""``eval``: score a checkpoint on one split and dump per-pair predictions."""

from typing import Any, TextIO

from app.config import RunConfig
from app.core.logging import get_logger
from libs.graph_match.exceptions import ValidationError
from libs.graph_match.graph_builder import RelationVocab
from libs.graph_match.parsers import TagVocab
from services.dataset import Corpus, read_pairs, select_split
from services.matching import MatchModel, PairFeaturizer, load_model
from services.training import evaluate, make_examples, write_prediction_dump

from .common import corpus_from_config, require_path

logger = get_logger(__name__)


def featurizer_from_manifest(corpus: Corpus, model: MatchModel, manifest: dict[str, Any]) -> PairFeaturizer:
    """Rebuild the training-time featurizer and check it against the model.

    Raises:
        ValidationError: If the corpus or stored vocabularies do not fit the model's dimensions
    """
    stored = manifest.get("featurizer")
    if not isinstance(stored, dict):
        raise ValidationError("Checkpoint has no featurizer entry", {"keys": sorted(manifest)})
    if corpus.table.dim != stored["embedding_dim"]:
        raise ValidationError(
            f"Embedding dimension {corpus.table.dim} does not match the checkpoint's {stored['embedding_dim']}",
            {"corpus": corpus.table.dim, "checkpoint": stored["embedding_dim"]},
        )
    featurizer = PairFeaturizer(
        corpus,
        model.config.kind,
        relation_vocab=RelationVocab(stored["deprels"]),
        pos_vocab=TagVocab("pos", stored["pos_tags"]),
        ner_vocab=TagVocab("ner", stored["ner_tags"]),
        hops=int(stored["hops"]),
    )
    expected = (model.config.in_dim, model.config.num_relations)
    actual = (featurizer.input_dim, featurizer.num_relations)
    if expected != actual:
        raise ValidationError(
            f"Model expects (in_dim, relations) = {expected}, inputs give {actual}",
            {"model": list(expected), "inputs": list(actual)},
        )
    return featurizer


def run(cfg: RunConfig, out: TextIO) -> None:
    pairs = read_pairs(require_path(cfg, "pairs"))
    model, manifest = load_model(require_path(cfg, "checkpoint"))
    if model.config.kind is not cfg.model:
        raise ValidationError(
            f"Checkpoint holds a {model.config.kind.value} model, config asks for {cfg.model.value}",
            {"checkpoint": model.config.kind.value, "config": cfg.model.value},
        )
    corpus = corpus_from_config(cfg)
    featurizer = featurizer_from_manifest(corpus, model, manifest)

    examples = make_examples(featurizer, select_split(pairs, cfg.split), f"{cfg.split.value} split")
    report = evaluate(model, examples, cfg.threshold)
    if cfg.dump is not None:
        cfg.dump.parent.mkdir(parents=True, exist_ok=True)
        write_prediction_dump(report.predictions, cfg.dump)
        logger.info("predictions_written", path=str(cfg.dump), predictions=len(report.predictions))

    out.write(f"split = {cfg.split.value}\n")
    out.write(report.format())
