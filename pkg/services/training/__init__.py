"""Training loop, learning-rate schedule, optimizer and evaluation metrics."""

from .metrics import (
    Confusion,
    EpochRecord,
    EvalReport,
    Prediction,
    read_prediction_dump,
    report_from_predictions,
    score,
    write_prediction_dump,
)
from .optimizer import Adam
from .schedule import TrainConfig, lr_at, warmup_steps
from .trainer import (
    Example,
    RepeatedRun,
    RepeatReport,
    RunSeeds,
    TrainingResult,
    evaluate,
    make_examples,
    run_repeats,
    run_seeds,
    train,
)

__all__ = [
    "Confusion",
    "EpochRecord",
    "EvalReport",
    "Prediction",
    "read_prediction_dump",
    "report_from_predictions",
    "score",
    "write_prediction_dump",
    "Adam",
    "TrainConfig",
    "lr_at",
    "warmup_steps",
    "Example",
    "RepeatedRun",
    "RepeatReport",
    "RunSeeds",
    "TrainingResult",
    "evaluate",
    "make_examples",
    "run_repeats",
    "run_seeds",
    "train",
]
