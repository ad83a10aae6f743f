import numpy as np
import pytest

from ..data import SynthSpec, generate
from ..errors import ContractError, SmallClassError
from ..pipeline import AutoFilter, FitConfig, RunDirectory, fit_per_class, score_records
from .conftest import records_for

_FAST = dict(encoder_dims=[8, 4], ae_epochs=2, svdd_epochs=2, ae_batch_size=32, svdd_batch_size=32)


def _blob(labels, dim=6, seed=0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(len(labels), dim)) + 5 * np.asarray(labels)[:, None]


def test_refuses_class_below_minimum():
    labels = [0] * 499
    with pytest.raises(SmallClassError, match="500"):
        fit_per_class(records_for(labels), _blob(labels), FitConfig(**_FAST))


def test_small_class_proceeds_with_override():
    labels = [0] * 10 + [1] * 12
    fits = fit_per_class(
        records_for(labels), _blob(labels), FitConfig(allow_small_classes=True, **_FAST)
    )
    assert sorted(fits) == [0, 1]
    assert len(fits[0].scores) == 10
    assert len(fits[0].svdd_trace) == 2


def test_two_classes_scores_span_unit_interval(tmp_path):
    dataset = generate(SynthSpec(n_classes=2, n_per_class=600, dim=8, seed=1))
    run_dir = RunDirectory(tmp_path)
    fits = fit_per_class(dataset.records, dataset.embeddings, FitConfig(**_FAST), run_dir=run_dir)

    assert sorted(fits) == [0, 1]
    for fit in fits.values():
        assert fit.scores.normalized.min() == 0.0
        assert fit.scores.normalized.max() == 1.0
    assert (tmp_path / "models" / "model_1.json").is_file()
    np.testing.assert_array_equal(run_dir.read_model(0).center, fits[0].model.center)


def test_fitting_is_deterministic_across_workers():
    labels = [0] * 30 + [1] * 30 + [2] * 30
    records, x = records_for(labels), _blob(labels)
    serial = fit_per_class(records, x, FitConfig(allow_small_classes=True, **_FAST))
    parallel = fit_per_class(records, x, FitConfig(allow_small_classes=True, workers=3, **_FAST))
    for label in serial:
        np.testing.assert_array_equal(serial[label].scores.raw, parallel[label].scores.raw)
        assert serial[label].svdd_trace == parallel[label].svdd_trace


def test_pretraining_can_be_skipped():
    labels = [0] * 20
    fits = fit_per_class(
        records_for(labels), _blob(labels), FitConfig(allow_small_classes=True, pretrain=False, **_FAST)
    )
    assert fits[0].autoencoder_trace == []


def test_score_records_uses_own_label_model():
    labels = [0] * 20 + [1] * 20
    records, x = records_for(labels), _blob(labels)
    fits = fit_per_class(records, x, FitConfig(allow_small_classes=True, **_FAST))
    scores = score_records(fits, records[:5] + records[-5:], np.vstack([x[:5], x[-5:]]))
    assert scores[0].ids == ["0", "1", "2", "3", "4"]
    assert scores[1].ids == ["35", "36", "37", "38", "39"]


def test_autofilter_returns_kept_training_indices():
    labels = [0] * 40 + [1] * 40
    x = _blob(labels)
    train = list(range(0, 80, 2))
    test = list(range(1, 80, 2))
    auto = AutoFilter(FitConfig(allow_small_classes=True, **_FAST))

    kept = auto.filter_data(train, test, x, labels, threshold=1.0)
    assert kept == train
    kept = auto.filter_data(train, test, x, labels, threshold=0.6)
    assert set(kept) <= set(train)
    assert len(kept) < len(train)
    assert sum(len(s) for s in auto.last_test_scores.values()) == len(test)


def test_autofilter_accepts_texts():
    texts = [f"w{i % 7} w{i % 5} common" for i in range(40)]
    labels = [i % 2 for i in range(40)]
    auto = AutoFilter(FitConfig(allow_small_classes=True, **_FAST))
    kept = auto.filter_data(list(range(30)), list(range(30, 40)), texts, labels)
    assert set(kept) <= set(range(30))


def test_autofilter_rejects_overlap():
    labels = [0] * 10
    with pytest.raises(ContractError):
        AutoFilter(FitConfig(allow_small_classes=True, **_FAST)).filter_data(
            [0, 1, 2], [2, 3], _blob(labels), labels
        )
