import numpy as np
import pytest

from ..classifiers import evaluate_split, fit_classifier, injection_auc
from ..cli.config import RunConfig
from ..data import SynthSpec, generate, split_train_test
from ..models import (
    AutoencoderModel,
    DeepSvddModel,
    init_center,
    pretrain,
    score,
    svdd_objective,
    train_one_class,
)
from ..nn import SeededRng
from ..pipeline import FitConfig, filter_by_threshold, fit_per_class, score_records

pytestmark = pytest.mark.slow


def _fit_split(dataset, config, seed):
    train_ids, test_ids = split_train_test(dataset.records, 0.1, SeededRng(seed).derive(1))
    row = {r.id: i for i, r in enumerate(dataset.records)}
    train = [dataset.records[row[i]] for i in train_ids]
    test = [dataset.records[row[i]] for i in test_ids]
    fits = fit_per_class(train, dataset.embeddings[[row[i] for i in train_ids]], config)
    test_scores = score_records(fits, test, dataset.embeddings[[row[i] for i in test_ids]])
    return fits, test_scores


def test_far_outliers_rank_high_on_the_test_split():
    recovered = 0
    for seed in range(5):
        dataset = generate(
            SynthSpec(n_classes=2, n_per_class=600, dim=32, outlier_fraction=0.05, outlier_mode="far_point", seed=seed)
        )
        config = FitConfig(encoder_dims=[64, 16], ae_epochs=20, svdd_epochs=20, seed=seed)
        _, test_scores = _fit_split(dataset, config, seed)

        truth = dataset.truth()
        ids = [i for s in test_scores.values() for i in s.ids]
        values = np.concatenate([s.normalized for s in test_scores.values()])
        try:
            auc = injection_auc(values, [truth[i] for i in ids])
        except ValueError:
            continue
        recovered += auc >= 0.9
    assert recovered >= 4


LABEL_FLIP_SEEDS = range(5)


@pytest.fixture(scope="module")
def label_flip_runs():
    """Default cleaning runs on 2 x 600 label-flip records with 10% flipped labels."""
    runs = []
    for seed in LABEL_FLIP_SEEDS:
        dataset = generate(
            SynthSpec(
                n_classes=2,
                n_per_class=600,
                dim=32,
                outlier_fraction=0.1,
                outlier_mode="label_flip",
                seed=seed,
            )
        )
        config = RunConfig(seed=seed)
        fits, test_scores = _fit_split(dataset, config.fit_config(), seed)
        runs.append((dataset, config, fits, test_scores))
    return runs


def test_flipped_labels_rank_above_chance_at_default_settings(label_flip_runs):
    above_chance = 0
    for dataset, _, fits, _ in label_flip_runs:
        truth = dataset.truth()
        ids = [i for fit in fits.values() for i in fit.scores.ids]
        values = np.concatenate([fit.scores.normalized for fit in fits.values()])
        above_chance += injection_auc(values, [truth[i] for i in ids]) > 0.5
    assert above_chance >= 4


@pytest.mark.parametrize("kind", ["knn", "logistic_regression"])
def test_filtered_training_keeps_test_accuracy(kind, label_flip_runs):
    filtered, baseline = [], []
    for dataset, config, fits, test_scores in label_flip_runs:
        row = {r.id: i for i, r in enumerate(dataset.records)}
        labels = {r.id: r.label for r in dataset.records}
        normalized = {
            i: value for s in test_scores.values() for i, value in zip(s.ids, s.normalized)
        }
        test_ids = list(normalized)
        test_x = dataset.embeddings[[row[i] for i in test_ids]]
        test_y = [labels[i] for i in test_ids]
        test_s = [normalized[i] for i in test_ids]

        report = filter_by_threshold({label: fit.scores for label, fit in fits.items()}, 0.6)
        kept = report.kept_ids()
        everything = kept + report.removed_ids()
        for train_ids, results in ((kept, filtered), (everything, baseline)):
            classifier = fit_classifier(
                kind,
                dataset.embeddings[[row[i] for i in train_ids]],
                [labels[i] for i in train_ids],
                config.classifier_settings(),
                SeededRng(config.seed).derive(2),
            )
            results.append(evaluate_split(classifier, test_x, test_y, test_s, 0.6).weighted)

    # Both fits predict the true cluster almost everywhere; allow one test record of slack
    assert np.mean(filtered) >= np.mean(baseline) - 0.01


def test_pretrained_encoder_is_what_svdd_starts_from(two_class_far_points):
    x = two_class_far_points.embeddings[:600]
    fits = fit_per_class(
        two_class_far_points.records[:600],
        x,
        FitConfig(encoder_dims=[16, 8], ae_epochs=5, svdd_epochs=0, seed=2),
    )
    model = fits[0].model

    # Rebuild the pretrained autoencoder from the same streams
    rng = SeededRng(2).derive(0)
    autoencoder = AutoencoderModel.build([32, 16, 8], rng.derive(0))
    pretrain(autoencoder, x, epochs=5, batch_size=64, rng=rng.derive(1))
    for path, value in autoencoder.encoder.parameters().items():
        np.testing.assert_array_equal(model.encoder.parameters()[path], value)

    fresh = DeepSvddModel(encoder=autoencoder.encoder.copy(), center=init_center(autoencoder.encoder, x))
    train_one_class(fresh, x, epochs=0)
    assert svdd_objective(fresh, x) == pytest.approx(svdd_objective(model, x))
    np.testing.assert_allclose(score(fresh, x), score(model, x))
