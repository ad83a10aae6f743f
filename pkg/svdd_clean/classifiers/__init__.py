from typing import Optional

from pydantic import BaseModel, Field

from ..nn import SeededRng
from .base import TrainedClassifier
from .evaluation import EvalResult, evaluate_split, injection_auc, weighted_accuracy
from .knn import KnnClassifier, fit_knn
from .lda import LdaClassifier, fit_lda
from .logistic import LogisticRegressionClassifier, fit_logistic_regression
from .tree import DecisionTreeClassifier, TreeNode, fit_decision_tree

# Column order of the accuracy table
CLASSIFIER_NAMES = {
    "decision_tree": "Decision Tree",
    "knn": "KNN",
    "logistic_regression": "Logistic Regression",
    "lda": "LDA",
}
CLASSIFIER_KINDS = tuple(CLASSIFIER_NAMES)


class ClassifierSettings(BaseModel):
    knn_k: int = Field(default=5, ge=1)
    logreg_epochs: int = Field(default=500, ge=0)
    logreg_learning_rate: float = Field(default=0.1, gt=0)
    lda_ridge: Optional[float] = Field(default=None, ge=0)
    tree_max_depth: int = Field(default=8, ge=1)
    tree_min_leaf: int = Field(default=1, ge=1)


def fit_classifier(
    kind: str, vectors, labels, settings: ClassifierSettings, rng: SeededRng
) -> TrainedClassifier:
    if kind == "knn":
        return fit_knn(vectors, labels, k=min(settings.knn_k, len(labels)))
    if kind == "logistic_regression":
        return fit_logistic_regression(
            vectors,
            labels,
            epochs=settings.logreg_epochs,
            learning_rate=settings.logreg_learning_rate,
            rng=rng,
        )
    if kind == "lda":
        return fit_lda(vectors, labels, ridge=settings.lda_ridge)
    if kind == "decision_tree":
        return fit_decision_tree(
            vectors,
            labels,
            max_depth=settings.tree_max_depth,
            min_leaf=settings.tree_min_leaf,
        )
    raise ValueError(f"Unknown classifier '{kind}', expected one of {CLASSIFIER_KINDS}")
