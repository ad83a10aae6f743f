import numpy as np

from ..errors import ContractError
from .base import TrainedClassifier, check_training_set


class KnnClassifier(TrainedClassifier):
    kind = "knn"

    def __init__(self, points: np.ndarray, labels: np.ndarray, k: int):
        self.points = points
        self.labels = labels
        self.k = k
        self.classes, self._label_index = np.unique(labels, return_inverse=True)

    @property
    def n_features(self) -> int:
        return self.points.shape[1]

    def predict(self, vectors) -> np.ndarray:
        x = self._check_queries(vectors)
        predictions = np.empty(x.shape[0], dtype=self.classes.dtype)
        for i, query in enumerate(x):
            # Direct differences keep exactly equidistant points exactly tied
            distances = np.sum((self.points - query) ** 2, axis=1)
            # Stable sort: equal distances go to the lower training index
            nearest = np.argsort(distances, kind="stable")[: self.k]
            votes = np.bincount(self._label_index[nearest], minlength=len(self.classes))
            predictions[i] = self.classes[np.argmax(votes)]
        return predictions


def fit_knn(vectors, labels, k: int = 5) -> KnnClassifier:
    x, y = check_training_set(vectors, labels)
    if not 1 <= k <= x.shape[0]:
        raise ContractError(f"k must lie in [1, {x.shape[0]}], got {k}")
    return KnnClassifier(x, y, k)
