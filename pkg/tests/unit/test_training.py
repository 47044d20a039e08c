"""Unit tests for the schedule, optimizer, metrics and the training loop."""

import math

import numpy as np
import pytest

from libs.graph_match.exceptions import ArgumentError, NonFiniteLossError, ParseError
from services.matching import ModelConfig, ModelKind, PairFeaturizer, build_model
from services.training import (
    Adam,
    EpochRecord,
    Prediction,
    TrainConfig,
    evaluate,
    lr_at,
    make_examples,
    read_prediction_dump,
    report_from_predictions,
    run_repeats,
    run_seeds,
    score,
    train,
    warmup_steps,
    write_prediction_dump,
)

pytestmark = pytest.mark.unit


@pytest.fixture
def graph_examples(small_synthetic):
    featurizer = PairFeaturizer(small_synthetic.corpus, ModelKind.GRAPH_GRAPH)
    pairs = small_synthetic.pairs
    return featurizer, make_examples(featurizer, pairs[:24], "train"), make_examples(featurizer, pairs[24:32], "val")


def _graph_model(featurizer, seed=0):
    return build_model(
        ModelConfig(
            in_dim=featurizer.input_dim,
            num_relations=featurizer.num_relations,
            hidden_dim=8,
            num_layers=2,
            num_bases=2,
            seed=seed,
        )
    )


class TestSchedule:
    """Test warmup_steps and lr_at."""

    def test_warmup_is_ten_percent(self):
        assert warmup_steps(TrainConfig(), 100) == 10

    def test_warmup_leaves_one_decay_step(self):
        assert warmup_steps(TrainConfig(warmup_fraction=0.5), 1) == 0

    def test_linear_warmup(self):
        cfg = TrainConfig(base_lr=1e-4)

        assert lr_at(cfg, 0, 100) == 0.0
        assert lr_at(cfg, 5, 100) == pytest.approx(5e-5)

    def test_cosine_decay(self):
        cfg = TrainConfig(base_lr=1e-4)

        assert lr_at(cfg, 10, 100) == pytest.approx(1e-4)
        assert lr_at(cfg, 55, 100) == pytest.approx(5e-5)
        assert 0 < lr_at(cfg, 99, 100) < 1e-6

    def test_single_step_run_uses_base_lr(self):
        assert lr_at(TrainConfig(base_lr=0.01), 0, 1) == 0.01

    def test_step_out_of_range(self):
        with pytest.raises(ArgumentError):
            lr_at(TrainConfig(), 100, 100)


class TestAdam:
    """Test the optimizer update."""

    def test_first_step_moves_by_lr(self):
        param = np.array([1.0, -1.0])
        optimizer = Adam({"p": param})

        optimizer.step({"p": np.array([0.5, -2.0])}, lr=0.1)

        np.testing.assert_allclose(param, [0.9, -0.9], atol=1e-6)

    def test_missing_gradient_is_zero(self):
        param = np.array([3.0])
        optimizer = Adam({"p": param})

        optimizer.step({}, lr=0.1)

        np.testing.assert_array_equal(param, [3.0])


class TestMetrics:
    """Test score, reports and the prediction dump."""

    def test_f1_and_accuracy(self):
        gold = [1, 1, 0, 1, 0, 0, 0, 0, 0, 0]
        predicted = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]

        f1, accuracy, confusion = score(gold, predicted)

        assert (confusion.tp, confusion.fp, confusion.fn, confusion.tn) == (2, 1, 1, 6)
        assert f1 == pytest.approx(2 / 3)
        assert accuracy == pytest.approx(0.8)

    def test_zero_recall_gives_zero_f1(self):
        f1, accuracy, _ = score([1, 0], [0, 0])

        assert f1 == 0.0
        assert accuracy == 0.5

    def test_all_negative(self):
        f1, accuracy, confusion = score([0, 0], [0, 0])

        assert f1 == 0.0
        assert accuracy == 1.0
        assert confusion.tn == 2

    def test_empty(self):
        with pytest.raises(ArgumentError):
            score([], [])

    def test_length_mismatch(self):
        with pytest.raises(ArgumentError):
            score([1], [1, 0])

    def test_format(self):
        report = report_from_predictions([Prediction("a", 0.9, 1, 1), Prediction("b", 0.2, 0, 1)])

        assert report.format().splitlines() == [
            "f1 = 0.666667",
            "accuracy = 0.500000",
            "tp = 1",
            "fp = 0",
            "tn = 0",
            "fn = 1",
            "examples = 2",
        ]

    def test_dump_recount_matches_report(self, tmp_path):
        predictions = [
            Prediction(f"s{i}::c", p, int(p >= 0.5), g)
            for i, (p, g) in enumerate([(0.91, 1), (0.5, 0), (0.12, 1), (0.07, 0), (0.66, 1)])
        ]
        report = report_from_predictions(predictions)
        path = tmp_path / "dump.tsv"

        write_prediction_dump(predictions, path)
        recount = report_from_predictions(read_prediction_dump(path))

        assert recount.to_dict() == report.to_dict()
        assert read_prediction_dump(path) == predictions

    def test_malformed_dump(self, tmp_path):
        path = tmp_path / "dump.tsv"
        path.write_text("a\t0.5\t1\n")

        with pytest.raises(ParseError):
            read_prediction_dump(path)

    def test_epoch_line(self):
        record = EpochRecord(3, 0.5, 0.75, 0.8, 1e-5)

        assert record.to_line() == "3 0.50000000 0.750000 0.800000 0.0000100000"


class TestTrain:
    """Test train, evaluate and the repeat driver."""

    def test_make_examples_rejects_empty(self, small_synthetic):
        featurizer = PairFeaturizer(small_synthetic.corpus, ModelKind.SEQ_SEQ)

        with pytest.raises(ArgumentError):
            make_examples(featurizer, [], "train")

    def test_empty_sets_rejected(self, graph_examples):
        featurizer, train_set, val_set = graph_examples
        model = _graph_model(featurizer)

        with pytest.raises(ArgumentError):
            train(model, [], val_set, TrainConfig())
        with pytest.raises(ArgumentError):
            train(model, train_set, [], TrainConfig())
        with pytest.raises(ArgumentError):
            evaluate(model, [])

    def test_single_epoch(self, graph_examples):
        featurizer, train_set, val_set = graph_examples

        result = train(_graph_model(featurizer), train_set, val_set, TrainConfig(epochs=1, batch_size=5))

        assert result.best_epoch == 1
        assert len(result.history) == 1
        assert math.isfinite(result.history[0].train_loss)

    def test_runs_are_bitwise_reproducible(self, graph_examples):
        featurizer, train_set, val_set = graph_examples
        cfg = TrainConfig(epochs=3, base_lr=1e-2, batch_size=4, seed=5)

        first = train(_graph_model(featurizer, seed=1), train_set, val_set, cfg)
        second = train(_graph_model(featurizer, seed=1), train_set, val_set, cfg)

        assert first.history == second.history
        assert first.best_epoch == second.best_epoch
        for name, value in first.model.parameters().items():
            np.testing.assert_array_equal(value, second.model.parameters()[name])

    def test_model_left_at_best_epoch(self, graph_examples):
        featurizer, train_set, val_set = graph_examples

        result = train(
            _graph_model(featurizer), train_set, val_set, TrainConfig(epochs=3, base_lr=1e-2, batch_size=4)
        )

        best = max(result.history, key=lambda r: r.val_f1)
        assert result.best_epoch == result.history.index(best) + 1
        assert evaluate(result.model, val_set).f1 == best.val_f1

    def test_loss_decreases_with_large_lr(self, small_synthetic):
        featurizer = PairFeaturizer(small_synthetic.corpus, ModelKind.SEQ_SEQ)
        train_set = make_examples(featurizer, small_synthetic.pairs[:40], "train")
        model = build_model(ModelConfig(kind=ModelKind.SEQ_SEQ, in_dim=featurizer.input_dim))

        result = train(model, train_set, train_set, TrainConfig(epochs=15, base_lr=1e-2, warmup_fraction=0))

        assert result.losses[-1] < result.losses[0]

    def test_non_finite_loss(self, small_synthetic):
        featurizer = PairFeaturizer(small_synthetic.corpus, ModelKind.SEQ_SEQ)
        examples = make_examples(featurizer, small_synthetic.pairs[:4], "train")
        model = build_model(ModelConfig(kind=ModelKind.SEQ_SEQ, in_dim=featurizer.input_dim))
        model.head.params["b2"][0] = np.inf

        with np.errstate(all="ignore"), pytest.raises(NonFiniteLossError) as exc_info:
            train(model, examples, examples, TrainConfig(epochs=1))

        assert exc_info.value.step == 0
        assert exc_info.value.exit_code == 4

    def test_threshold_is_inclusive(self, graph_examples):
        featurizer, _, val_set = graph_examples
        model = _graph_model(featurizer)

        report = evaluate(model, val_set, threshold=model.predict_proba(val_set[0].inp))

        assert report.predictions[0].predicted == 1

    def test_run_seeds(self):
        seeds = run_seeds(0, 3)

        assert seeds == run_seeds(0, 3)
        assert len({s.model_seed for s in seeds}) == 3
        with pytest.raises(ArgumentError):
            run_seeds(0, 0)

    def test_run_repeats(self, graph_examples):
        featurizer, train_set, val_set = graph_examples

        report = run_repeats(
            lambda seed: _graph_model(featurizer, seed),
            train_set,
            val_set,
            val_set,
            TrainConfig(epochs=1),
            repeats=2,
        )

        lines = report.format().splitlines()
        assert [line.split(" = ")[0] for line in lines] == ["run_0", "run_1", "mean_f1", "mean_accuracy"]
        assert report.mean_f1 == pytest.approx(np.mean([r.test.f1 for r in report.runs]))
