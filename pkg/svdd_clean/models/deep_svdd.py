import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ContractError, ShapeError, TrainingError
from ..nn import AdamState, DenseNet, SeededRng, adam_update, backward, forward

logger = logging.getLogger(__name__)

DEFAULT_WEIGHT_DECAY = 1e-6
DEFAULT_NU = 0.1
DEFAULT_EPOCHS = 150
DEFAULT_BATCH_SIZE = 64

# Coordinates of the center closer to zero than this are pushed out to +/- this value
CENTER_EPS = 0.1


@dataclass(eq=False)
class DeepSvddModel:
    encoder: DenseNet
    center: Optional[np.ndarray] = None
    radius: float = 0.0
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    nu: float = DEFAULT_NU
    seed: Optional[int] = None

    def __post_init__(self):
        if any(layer.has_bias for layer in self.encoder.layers):
            raise ContractError("Deep SVDD encoders must be bias-free")
        if not 0 < self.nu <= 1:
            raise ContractError(f"nu must lie in (0, 1], got {self.nu}")
        if self.weight_decay < 0:
            raise ContractError(f"weight_decay must be non-negative, got {self.weight_decay}")
        if self.center is not None:
            self.center = np.asarray(self.center, dtype=np.float64)
            if self.center.shape != (self.encoder.out_dim,):
                raise ShapeError(
                    f"Center has shape {self.center.shape}, encoder outputs "
                    f"{self.encoder.out_dim} values"
                )

    def _require_center(self) -> np.ndarray:
        if self.center is None:
            raise ContractError("The hypersphere center has not been initialized")
        return self.center


@dataclass(eq=False)
class ScoreSet:
    ids: List[str]
    raw: np.ndarray
    normalized: np.ndarray = field(default=None)

    def __post_init__(self):
        self.raw = np.asarray(self.raw, dtype=np.float64)
        if len(self.ids) != self.raw.shape[0]:
            raise ShapeError(f"{len(self.ids)} ids for {self.raw.shape[0]} scores")
        if self.normalized is None:
            self.normalized = normalize_scores(self.raw) if len(self.ids) else np.zeros(0)
        self.normalized = np.asarray(self.normalized, dtype=np.float64)

    def __len__(self):
        return len(self.ids)


def init_center(encoder: DenseNet, vectors, eps: float = CENTER_EPS) -> np.ndarray:
    """Mean of the initial representations, kept away from zero coordinate-wise."""
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ContractError("Center initialization needs at least one vector")

    center = forward(encoder, x)[0].mean(axis=0)
    small = np.abs(center) < eps
    center[small] = np.where(center[small] < 0, -eps, eps)
    return center


def score(model: DeepSvddModel, vectors) -> np.ndarray:
    """Squared distance of each encoded vector to the center."""
    center = model._require_center()
    x = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if x.shape[0] == 0:
        return np.zeros(0)
    representations = forward(model.encoder, x)[0]
    return np.sum((representations - center) ** 2, axis=1)


def weight_penalty(encoder: DenseNet, weight_decay: float) -> float:
    return 0.5 * weight_decay * sum(
        float(np.sum(layer.weight**2)) for layer in encoder.layers
    )


def svdd_objective(model: DeepSvddModel, vectors) -> float:
    """Mean squared distance to the center plus lambda/2 times the Frobenius norms."""
    return float(np.mean(score(model, vectors))) + weight_penalty(
        model.encoder, model.weight_decay
    )


def normalize_scores(raw: Sequence[float]) -> np.ndarray:
    """Min-max rescaling into [0, 1]; a constant set maps to all zeros."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.size == 0:
        raise ContractError("Cannot normalize an empty score set")

    low, high = raw.min(), raw.max()
    if high == low:
        return np.zeros_like(raw)
    normalized = (raw - low) / (high - low)
    return np.clip(normalized, 0.0, 1.0)


def _batch_step(
    model: DeepSvddModel, batch: np.ndarray, state: AdamState
) -> Tuple[float, AdamState]:
    representations, cache = forward(model.encoder, batch)
    diff = representations - model.center
    objective = float(np.mean(np.sum(diff**2, axis=1))) + weight_penalty(
        model.encoder, model.weight_decay
    )

    grads, _ = backward(model.encoder, cache, 2.0 * diff / batch.shape[0])
    params = model.encoder.parameters()
    for path, param in params.items():
        if path.endswith(".weight"):
            grads[path] = grads[path] + model.weight_decay * param

    updated, state = adam_update(params, grads, state)
    model.encoder.load_parameters(updated)
    return objective, state


def train_one_class(
    model: DeepSvddModel,
    vectors,
    epochs: int = DEFAULT_EPOCHS,
    batch_size: int = DEFAULT_BATCH_SIZE,
    rng: SeededRng = None,
    learning_rate: float = 1e-3,
) -> Tuple[DeepSvddModel, List[float]]:
    """Minimize the one-class objective over the encoder weights; the center stays fixed.

    The trace holds the mean batch objective of every epoch. Afterwards ``radius`` is
    set to the square root of the (1 - nu) quantile of the training scores, which is
    reported only and never enters the loss.
    """
    model._require_center()
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ContractError("Training needs at least one vector")
    if x.shape[1] != model.encoder.in_dim:
        raise ShapeError(
            f"Vectors have dimension {x.shape[1]}, encoder expects {model.encoder.in_dim}"
        )
    if batch_size < 1:
        raise ContractError("batch_size must be positive")
    if rng is None:
        rng = SeededRng(0)

    state = AdamState(learning_rate=learning_rate)
    trace = []
    for epoch in range(epochs):
        order = rng.permutation(x.shape[0])
        objectives = []
        for start in range(0, x.shape[0], batch_size):
            try:
                value, state = _batch_step(model, x[order[start : start + batch_size]], state)
            except TrainingError as e:
                raise TrainingError(str(e), epoch=epoch) from e
            objectives.append(value)
        epoch_objective = float(np.mean(objectives))
        if not np.isfinite(epoch_objective):
            raise TrainingError("Deep SVDD objective is not finite", epoch=epoch)
        trace.append(epoch_objective)
        logger.debug(f"Deep SVDD epoch {epoch}: objective {epoch_objective:.6g}")

    model.radius = float(np.sqrt(np.quantile(score(model, x), 1.0 - model.nu)))
    return model, trace
