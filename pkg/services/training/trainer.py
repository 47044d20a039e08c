"""Mini-batch training with best-validation-F1 snapshot selection."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
import structlog
from structlog.contextvars import bind_contextvars, unbind_contextvars

from libs.graph_match.exceptions import ArgumentError, NonFiniteLossError
from services.dataset.pairs import PairExample, require_labeled
from services.matching.featurize import ModelInput, PairFeaturizer
from services.matching.models import MatchModel

from .metrics import EpochRecord, EvalReport, Prediction, report_from_predictions
from .optimizer import Adam
from .schedule import TrainConfig, lr_at

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class Example:
    pair_id: str
    inp: ModelInput
    label: int


def make_examples(featurizer: PairFeaturizer, pairs: Sequence[PairExample], what: str) -> list[Example]:
    """Featurize labeled pairs, keeping their order.

    Raises:
        ArgumentError: If ``pairs`` is empty or has unlabeled pairs
    """
    labeled = require_labeled(pairs, what)
    return [Example(p.pair_id, featurizer.featurize(p), int(p.label)) for p in labeled]  # type: ignore[arg-type]


@dataclass
class TrainingResult:
    model: MatchModel
    report: EvalReport
    best_epoch: int
    history: list[EpochRecord] = field(default_factory=list)

    @property
    def losses(self) -> list[float]:
        return [r.train_loss for r in self.history]


def _grad_norms(grads: dict[str, np.ndarray]) -> dict[str, float]:
    return {name: float(np.linalg.norm(g)) for name, g in sorted(grads.items())}


def evaluate(model: MatchModel, examples: Sequence[Example], threshold: float = 0.5) -> EvalReport:
    """Score ``examples`` in order; predicted label is 1 iff probability >= threshold.

    Raises:
        ArgumentError: If ``examples`` is empty
    """
    if not examples:
        raise ArgumentError("Cannot evaluate an empty set")
    predictions = []
    for ex in examples:
        probability = model.predict_proba(ex.inp)
        predictions.append(Prediction(ex.pair_id, probability, int(probability >= threshold), ex.label))
    return report_from_predictions(predictions)


def train(
    model: MatchModel,
    train_set: Sequence[Example],
    val_set: Sequence[Example],
    cfg: TrainConfig,
) -> TrainingResult:
    """Train ``model`` in place and leave it at its best-validation-F1 epoch.

    Ties in validation F1 keep the earlier epoch.

    Raises:
        ArgumentError: If the training or validation set is empty
        NonFiniteLossError: If a loss or gradient becomes NaN/Inf
    """
    if not train_set:
        raise ArgumentError("The training set is empty")
    if not val_set:
        raise ArgumentError("The validation set is empty")

    n = len(train_set)
    steps_per_epoch = math.ceil(n / cfg.batch_size)
    total_steps = cfg.epochs * steps_per_epoch
    shuffle_rng = np.random.default_rng(cfg.seed)
    optimizer = Adam(model.parameters())
    params = model.parameters()

    history: list[EpochRecord] = []
    best: tuple[float, int, dict[str, np.ndarray], EvalReport] | None = None
    step = 0
    for epoch in range(1, cfg.epochs + 1):
        order = shuffle_rng.permutation(n)
        epoch_loss = 0.0
        lr = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            lr = lr_at(cfg, step, total_steps)
            summed = {name: np.zeros_like(p) for name, p in params.items()}
            for index in batch:
                ex = train_set[int(index)]
                loss, grads = model.loss_and_gradients(ex.inp, ex.label)
                if not math.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads.values()):
                    norms = _grad_norms(grads)
                    logger.error("non_finite_loss", step=step, lr=lr, loss=loss, grad_norms=norms)
                    raise NonFiniteLossError(step, lr, norms)
                epoch_loss += loss
                for name, grad in grads.items():
                    summed[name] += grad
            averaged = {name: g / len(batch) for name, g in summed.items()}
            optimizer.step(averaged, lr)
            step += 1

        val = evaluate(model, val_set, cfg.threshold)
        record = EpochRecord(epoch, epoch_loss / n, val.f1, val.accuracy, lr)
        history.append(record)
        logger.info(
            "epoch_finished",
            epoch=epoch,
            train_loss=round(record.train_loss, 6),
            val_f1=round(val.f1, 4),
            val_accuracy=round(val.accuracy, 4),
            lr=lr,
        )
        if best is None or val.f1 > best[0]:
            best = (val.f1, epoch, model.snapshot(), val)

    assert best is not None
    _, best_epoch, snapshot, report = best
    model.load_parameters(snapshot)
    report.history = history
    logger.info("training_finished", best_epoch=best_epoch, val_f1=round(report.f1, 4), steps=step)
    return TrainingResult(model, report, best_epoch, history)


@dataclass(frozen=True)
class RunSeeds:
    model_seed: int
    shuffle_seed: int


def run_seeds(root_seed: int, repeats: int) -> list[RunSeeds]:
    """Independent (model init, shuffle) seeds for each repeat, spawned from one root."""
    if repeats < 1:
        raise ArgumentError(f"repeats must be >= 1, got {repeats}")
    children = np.random.SeedSequence(root_seed).spawn(repeats)
    return [RunSeeds(*(int(s) for s in child.generate_state(2))) for child in children]


@dataclass
class RepeatedRun:
    seeds: RunSeeds
    result: TrainingResult
    test: EvalReport


@dataclass
class RepeatReport:
    runs: list[RepeatedRun]

    @property
    def mean_f1(self) -> float:
        return float(np.mean([r.test.f1 for r in self.runs]))

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean([r.test.accuracy for r in self.runs]))

    def format(self) -> str:
        lines = []
        for k, run in enumerate(self.runs):
            lines.append(
                f"run_{k} = f1 {run.test.f1:.6f} accuracy {run.test.accuracy:.6f} "
                f"best_epoch {run.result.best_epoch} model_seed {run.seeds.model_seed}"
            )
        lines.append(f"mean_f1 = {self.mean_f1:.6f}")
        lines.append(f"mean_accuracy = {self.mean_accuracy:.6f}")
        return "\n".join(lines) + "\n"


def run_repeats(
    build: Callable[[int], MatchModel],
    train_set: Sequence[Example],
    val_set: Sequence[Example],
    test_set: Sequence[Example],
    cfg: TrainConfig,
    repeats: int,
) -> RepeatReport:
    """Train ``repeats`` seeded runs and score each best snapshot on ``test_set``.

    ``build(seed)`` must return a freshly initialized model.
    """
    runs = []
    for k, seeds in enumerate(run_seeds(cfg.seed, repeats)):
        bind_contextvars(repeat=k)
        try:
            model = build(seeds.model_seed)
            result = train(model, train_set, val_set, cfg.model_copy(update={"seed": seeds.shuffle_seed}))
            runs.append(RepeatedRun(seeds, result, evaluate(model, test_set, cfg.threshold)))
        finally:
            unbind_contextvars("repeat")
    report = RepeatReport(runs)
    logger.info("repeats_finished", repeats=repeats, mean_f1=round(report.mean_f1, 4))
    return report
