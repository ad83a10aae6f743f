from typing import Optional

import numpy as np

from ..errors import ContractError, NumericError
from .base import TrainedClassifier, check_training_set

# Condition numbers beyond this are treated as singular
_MAX_CONDITION = 1e12


class LdaClassifier(TrainedClassifier):
    kind = "lda"

    def __init__(self, means, covariance_inverse, priors, classes):
        self.means = means
        self.covariance_inverse = covariance_inverse
        self.priors = priors
        self.classes = classes
        # Linear discriminant: x . coef_k + intercept_k
        self._coef = means @ covariance_inverse
        self._intercept = -0.5 * np.sum(self._coef * means, axis=1) + np.log(priors)

    @property
    def n_features(self) -> int:
        return self.means.shape[1]

    def discriminants(self, vectors) -> np.ndarray:
        return self._check_queries(vectors) @ self._coef.T + self._intercept

    def predict(self, vectors) -> np.ndarray:
        return self.classes[np.argmax(self.discriminants(vectors), axis=1)]


def fit_lda(vectors, labels, ridge: Optional[float] = None) -> LdaClassifier:
    """Gaussian LDA with a pooled covariance shared by all classes.

    ``ridge`` is added to the covariance diagonal; by default it is
    ``1e-6 * trace / dim``.
    """
    x, y = check_training_set(vectors, labels)
    classes, index = np.unique(y, return_inverse=True)
    if len(classes) < 2:
        raise ContractError("LDA needs at least two classes")

    n, d = x.shape
    means = np.vstack([x[index == k].mean(axis=0) for k in range(len(classes))])
    priors = np.bincount(index) / n
    centered = x - means[index]
    covariance = centered.T @ centered / max(n - len(classes), 1)
    if ridge is None:
        ridge = 1e-6 * np.trace(covariance) / d
    covariance = covariance + ridge * np.eye(d)

    if not np.all(np.isfinite(covariance)) or np.linalg.cond(covariance) > _MAX_CONDITION:
        raise NumericError(
            f"Pooled covariance is singular even with ridge {ridge:.3g}"
        )
    return LdaClassifier(means, np.linalg.inv(covariance), priors, classes)
