from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np

from ..errors import ContractError, ShapeError


def check_training_set(vectors, labels) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(vectors, dtype=np.float64)
    y = np.asarray(labels)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ContractError("Training set is empty")
    if y.shape != (x.shape[0],):
        raise ShapeError(f"{y.shape[0]} labels for {x.shape[0]} vectors")
    return x, y.astype(np.int64)


class TrainedClassifier(ABC):
    kind: str

    # Sorted class labels; argmax over this axis breaks ties toward the smallest label
    classes: np.ndarray

    def _check_queries(self, vectors) -> np.ndarray:
        x = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
        if x.shape[1] != self.n_features:
            raise ShapeError(
                f"{self.kind} was fitted on {self.n_features} features, got {x.shape[1]}"
            )
        return x

    @property
    @abstractmethod
    def n_features(self) -> int:
        ...

    @abstractmethod
    def predict(self, vectors) -> np.ndarray:
        ...

    def accuracy(self, vectors, labels) -> float:
        labels = np.asarray(labels)
        if labels.size == 0:
            return 0.0
        return float(np.mean(self.predict(vectors) == labels))
