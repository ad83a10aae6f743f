from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field
from sklearn.metrics import roc_auc_score

from ..errors import ContractError, ShapeError
from .base import TrainedClassifier


class EvalResult(BaseModel):
    accuracy: float = Field(ge=0, le=1)
    accuracy_inlier: float = Field(ge=0, le=1)
    accuracy_outlier: float = Field(ge=0, le=1)
    n_inlier: int = Field(ge=0)
    n_outlier: int = Field(ge=0)
    weighted: float = Field(ge=0, le=1)


def weighted_accuracy(acc_in: float, acc_out: float, n_in: int, n_out: int) -> float:
    """Count-weighted mean of the inlier and outlier accuracies."""
    if n_in < 0 or n_out < 0:
        raise ContractError("Counts must be non-negative")
    if n_in + n_out == 0:
        raise ContractError("At least one of the inlier and outlier counts must be positive")
    for value in (acc_in, acc_out):
        if not 0 <= value <= 1:
            raise ContractError(f"Accuracies must lie in [0, 1], got {value}")
    return (n_in * acc_in + n_out * acc_out) / (n_in + n_out)


def evaluate_split(
    classifier: TrainedClassifier,
    test_vectors,
    test_labels,
    test_scores: Sequence[float],
    threshold: float,
) -> EvalResult:
    """Accuracy on the whole test set and separately on its inliers and outliers.

    ``test_scores`` are normalized outlier scores aligned with ``test_vectors``; a
    record is an inlier iff its score is at most ``threshold``. An empty side is
    reported with accuracy 0 and count 0, so ``weighted`` equals the other side.
    """
    labels = np.asarray(test_labels)
    scores = np.asarray(test_scores, dtype=np.float64)
    if labels.size == 0:
        raise ContractError("Test set is empty")
    if scores.shape != labels.shape:
        raise ShapeError(f"{scores.shape[0]} scores for {labels.shape[0]} test labels")

    correct = classifier.predict(test_vectors) == labels
    inlier = scores <= threshold
    n_in = int(inlier.sum())
    n_out = int((~inlier).sum())
    acc_in = float(correct[inlier].mean()) if n_in else 0.0
    acc_out = float(correct[~inlier].mean()) if n_out else 0.0
    return EvalResult(
        accuracy=float(correct.mean()),
        accuracy_inlier=acc_in,
        accuracy_outlier=acc_out,
        n_inlier=n_in,
        n_outlier=n_out,
        weighted=weighted_accuracy(acc_in, acc_out, n_in, n_out),
    )


def injection_auc(scores: Sequence[float], is_injected: Sequence[bool]) -> float:
    """ROC-AUC of outlier scores against ground-truth injection flags."""
    flags = np.asarray(is_injected, dtype=bool)
    if flags.all() or not flags.any():
        raise ContractError("ROC-AUC needs both injected and clean records")
    return float(roc_auc_score(flags, np.asarray(scores, dtype=np.float64)))
