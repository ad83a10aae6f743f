import logging
from typing import List

import numpy as np
from sklearn.preprocessing import StandardScaler

from ..errors import ContractError, TrainingError
from ..nn import SeededRng
from .base import TrainedClassifier, check_training_set

logger = logging.getLogger(__name__)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


class LogisticRegressionClassifier(TrainedClassifier):
    kind = "logistic_regression"

    def __init__(
        self,
        weights: np.ndarray,
        bias: np.ndarray,
        classes: np.ndarray,
        scaler: StandardScaler,
    ):
        self.weights = weights
        self.bias = bias
        self.classes = classes
        # Fitted on the training vectors; applied before the linear map
        self.scaler = scaler
        self.step_size = 0.0
        self.loss_trace: List[float] = []

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    def standardize(self, vectors) -> np.ndarray:
        return self.scaler.transform(self._check_queries(vectors))

    def logits(self, vectors) -> np.ndarray:
        return self.standardize(vectors) @ self.weights.T + self.bias

    def predict(self, vectors) -> np.ndarray:
        return self.classes[np.argmax(self.logits(vectors), axis=1)]


def _lipschitz_bound(z: np.ndarray) -> float:
    """Upper bound on the curvature of the mean cross-entropy in (weights, bias).

    The softmax Hessian block is at most 1/2 in spectral norm, so the bound is half the
    largest eigenvalue of the second moment of the bias-augmented features.
    """
    augmented = np.hstack([z, np.ones((z.shape[0], 1))])
    return 0.5 * float(np.linalg.norm(augmented, ord=2) ** 2) / z.shape[0]


def fit_logistic_regression(
    vectors,
    labels,
    epochs: int = 500,
    learning_rate: float = 0.1,
    rng: SeededRng = None,
) -> LogisticRegressionClassifier:
    """Multinomial softmax regression trained by full-batch gradient descent on the
    mean cross-entropy of standardized features.

    The step is ``min(learning_rate, 1 / L)`` with ``L`` the curvature bound of the
    loss, so the loss trace never increases.
    """
    x, y = check_training_set(vectors, labels)
    classes, index = np.unique(y, return_inverse=True)
    if len(classes) < 2:
        raise ContractError("Logistic regression needs at least two classes")
    if rng is None:
        rng = SeededRng(0)

    n, d = x.shape
    onehot = np.zeros((n, len(classes)))
    onehot[np.arange(n), index] = 1.0

    # Constant features keep unit scale
    scaler = StandardScaler().fit(x)
    z = scaler.transform(x)

    step = min(learning_rate, 1.0 / _lipschitz_bound(z))
    if step < learning_rate:
        logger.debug(f"Logistic regression step capped at {step:.4g} (requested {learning_rate})")

    model = LogisticRegressionClassifier(
        weights=rng.normal(0.0, 0.01, (len(classes), d)),
        bias=np.zeros(len(classes)),
        classes=classes,
        scaler=scaler,
    )
    model.step_size = step
    for epoch in range(epochs):
        probs = _softmax(z @ model.weights.T + model.bias)
        loss = -float(np.mean(np.log(np.clip(probs[np.arange(n), index], 1e-300, None))))
        if not np.isfinite(loss):
            raise TrainingError("Cross-entropy is not finite", epoch=epoch)
        model.loss_trace.append(loss)

        error = (probs - onehot) / n
        model.weights = model.weights - step * (error.T @ z)
        model.bias = model.bias - step * error.sum(axis=0)

    return model
