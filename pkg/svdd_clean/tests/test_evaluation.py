import numpy as np
import pytest

from ..classifiers import evaluate_split, fit_knn, injection_auc, weighted_accuracy
from ..errors import ContractError


def test_equal_accuracies_ignore_counts():
    assert weighted_accuracy(0.9, 0.9, 7, 300) == pytest.approx(0.9)


def test_weighted_accuracy_by_hand():
    assert weighted_accuracy(1.0, 0.0, 3, 1) == 0.75


def test_weighted_accuracy_reproduces_reported_row():
    assert weighted_accuracy(0.94805, 0.89313, 9676, 324) == pytest.approx(0.94627, abs=5e-4)


def test_weighted_accuracy_is_convex_combination():
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b = rng.uniform(size=2)
        n_in, n_out = rng.integers(0, 50, size=2)
        if n_in + n_out == 0:
            continue
        value = weighted_accuracy(a, b, int(n_in), int(n_out))
        assert min(a, b) - 1e-12 <= value <= max(a, b) + 1e-12


def test_weighted_accuracy_needs_counts():
    with pytest.raises(ContractError):
        weighted_accuracy(0.5, 0.5, 0, 0)


def _perfect():
    x = np.array([[0.0], [10.0]])
    return fit_knn(x, [0, 1], k=1)


def test_all_inliers_convention():
    x = np.array([[0.0], [10.0], [0.5]])
    result = evaluate_split(_perfect(), x, [0, 1, 1], [0.1, 0.2, 0.3], threshold=0.6)
    assert result.n_outlier == 0
    assert result.accuracy_outlier == 0.0
    assert result.weighted == result.accuracy_inlier == pytest.approx(2 / 3)


def test_perfect_classifier():
    x = np.array([[0.0], [10.0], [9.0], [1.0]])
    result = evaluate_split(_perfect(), x, [0, 1, 1, 0], [0.1, 0.9, 0.2, 0.7], threshold=0.6)
    assert result.accuracy == result.accuracy_inlier == result.accuracy_outlier == 1.0
    assert (result.n_inlier, result.n_outlier) == (2, 2)
    assert result.weighted == 1.0


def test_empty_test_set():
    with pytest.raises(ContractError):
        evaluate_split(_perfect(), np.zeros((0, 1)), [], [], threshold=0.5)


def test_injection_auc():
    assert injection_auc([0.1, 0.2, 0.9, 0.8], [False, False, True, True]) == 1.0
    with pytest.raises(ContractError):
        injection_auc([0.1, 0.2], [False, False])
