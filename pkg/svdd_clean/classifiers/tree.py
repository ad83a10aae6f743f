from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import ContractError
from .base import TrainedClassifier, check_training_set

# Gains must beat the incumbent by more than this to replace it
_GAIN_EPS = 1e-12


@dataclass(eq=False)
class TreeNode:
    prediction: int
    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth, self.right.depth)


def _gini(counts: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    p = counts / sizes[:, None]
    return 1.0 - np.sum(p * p, axis=1)


def _best_split(
    x: np.ndarray, index: np.ndarray, n_classes: int, min_leaf: int
) -> Optional[Tuple[int, float]]:
    n = x.shape[0]
    onehot = np.eye(n_classes)[index]
    parent = _gini(onehot.sum(axis=0)[None, :], np.array([n]))[0]

    best_gain, best = _GAIN_EPS, None
    for feature in range(x.shape[1]):
        order = np.argsort(x[:, feature], kind="stable")
        values = x[order, feature]
        left_counts = np.cumsum(onehot[order], axis=0)[:-1]
        right_counts = onehot.sum(axis=0) - left_counts
        left_sizes = np.arange(1, n)
        right_sizes = n - left_sizes

        # Split between positions i and i + 1 only where the value changes
        valid = (
            (values[:-1] < values[1:])
            & (left_sizes >= min_leaf)
            & (right_sizes >= min_leaf)
        )
        if not valid.any():
            continue

        weighted = (
            left_sizes * _gini(left_counts, left_sizes)
            + right_sizes * _gini(right_counts, right_sizes)
        ) / n
        gains = np.where(valid, parent - weighted, -np.inf)
        # argmax keeps the first maximum, i.e. the lowest threshold
        i = int(np.argmax(gains))
        if gains[i] > best_gain + _GAIN_EPS:
            best_gain = gains[i]
            best = (feature, float((values[i] + values[i + 1]) / 2.0))
    return best


class DecisionTreeClassifier(TrainedClassifier):
    kind = "decision_tree"

    def __init__(self, root: TreeNode, classes: np.ndarray, n_features: int):
        self.root = root
        self.classes = classes
        self._n_features = n_features

    @property
    def n_features(self) -> int:
        return self._n_features

    def predict(self, vectors) -> np.ndarray:
        x = self._check_queries(vectors)
        out = np.empty(x.shape[0], dtype=self.classes.dtype)
        for i, row in enumerate(x):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = self.classes[node.prediction]
        return out


def fit_decision_tree(
    vectors, labels, max_depth: int = 8, min_leaf: int = 1
) -> DecisionTreeClassifier:
    """CART with Gini impurity and midpoint thresholds.

    Equal gains go to the lower feature index, then the lower threshold; leaves
    predict the majority label, smallest label on ties.
    """
    x, y = check_training_set(vectors, labels)
    if max_depth < 1:
        raise ContractError(f"max_depth must be at least 1, got {max_depth}")
    if min_leaf < 1:
        raise ContractError(f"min_leaf must be at least 1, got {min_leaf}")
    classes, index = np.unique(y, return_inverse=True)
    n_classes = len(classes)

    def grow(rows: np.ndarray, depth: int) -> TreeNode:
        sub_index = index[rows]
        counts = np.bincount(sub_index, minlength=n_classes)
        node = TreeNode(prediction=int(np.argmax(counts)))
        if depth >= max_depth or np.count_nonzero(counts) == 1:
            return node

        split = _best_split(x[rows], sub_index, n_classes, min_leaf)
        if split is None:
            return node
        node.feature, node.threshold = split
        goes_left = x[rows, node.feature] <= node.threshold
        node.left = grow(rows[goes_left], depth + 1)
        node.right = grow(rows[~goes_left], depth + 1)
        return node

    return DecisionTreeClassifier(grow(np.arange(x.shape[0]), 0), classes, x.shape[1])
