"""Binary classification metrics and the per-pair prediction dump."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from sklearn.metrics import accuracy_score, confusion_matrix, f1_score

from libs.graph_match.exceptions import ArgumentError, ParseError


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class Prediction:
    pair_id: str
    probability: float
    predicted: int
    gold: int

    def to_line(self) -> str:
        return f"{self.pair_id}\t{self.probability!r}\t{self.predicted}\t{self.gold}"


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_f1: float
    val_accuracy: float
    lr_last: float

    def to_line(self) -> str:
        return (
            f"{self.epoch} {self.train_loss:.8f} {self.val_f1:.6f} "
            f"{self.val_accuracy:.6f} {self.lr_last:.10f}"
        )


@dataclass
class EvalReport:
    """Scores of one evaluation plus, for training runs, the epoch history."""

    f1: float
    accuracy: float
    confusion: Confusion
    predictions: list[Prediction] = field(default_factory=list)
    history: list[EpochRecord] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        c = self.confusion
        return {
            "f1": self.f1,
            "accuracy": self.accuracy,
            "tp": c.tp,
            "fp": c.fp,
            "tn": c.tn,
            "fn": c.fn,
            "examples": c.total,
        }

    def format(self) -> str:
        """Key-value block, one ``key = value`` per line."""
        lines = []
        for key, value in self.to_dict().items():
            text = f"{value:.6f}" if isinstance(value, float) else str(value)
            lines.append(f"{key} = {text}")
        return "\n".join(lines) + "\n"


def score(gold: Sequence[int], predicted: Sequence[int]) -> tuple[float, float, Confusion]:
    """(F1, accuracy, confusion); F1 is 0 when precision or recall is undefined.

    Raises:
        ArgumentError: If there are no examples or the lengths differ
    """
    if len(gold) == 0:
        raise ArgumentError("Cannot score an empty set")
    if len(gold) != len(predicted):
        raise ArgumentError(
            "gold and predicted differ in length", {"gold": len(gold), "predicted": len(predicted)}
        )
    tn, fp, fn, tp = (int(x) for x in confusion_matrix(gold, predicted, labels=[0, 1]).ravel())
    f1 = float(f1_score(gold, predicted, labels=[0, 1], pos_label=1, zero_division=0))
    accuracy = float(accuracy_score(gold, predicted))
    return f1, accuracy, Confusion(tp=tp, fp=fp, tn=tn, fn=fn)


def report_from_predictions(predictions: Sequence[Prediction]) -> EvalReport:
    f1, accuracy, confusion = score([p.gold for p in predictions], [p.predicted for p in predictions])
    return EvalReport(f1, accuracy, confusion, list(predictions))


def write_prediction_dump(predictions: Sequence[Prediction], path: str | Path) -> None:
    Path(path).write_text("".join(p.to_line() + "\n" for p in predictions), encoding="utf-8")


def read_prediction_dump(path: str | Path) -> list[Prediction]:
    predictions = []
    for line_number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ParseError("Expected pair_id<TAB>probability<TAB>predicted<TAB>gold", str(path), line_number)
        try:
            predictions.append(Prediction(parts[0], float(parts[1]), int(parts[2]), int(parts[3])))
        except ValueError as e:
            raise ParseError(f"Bad prediction line: {e}", str(path), line_number) from e
    return predictions
