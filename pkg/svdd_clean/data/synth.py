import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..errors import ContractError, DatasetFormatError
from ..nn import SeededRng
from .dataset import DatasetRecord

logger = logging.getLogger(__name__)

OutlierMode = Literal["label_flip", "far_point"]

# Minimum center separation and outlier displacement, in cluster standard deviations
_CENTER_SEPARATION = 10.0
_FAR_POINT_SHIFT = 20.0
_CENTER_ATTEMPTS = 1000


class SynthSpec(BaseModel):
    n_classes: int = Field(default=2, ge=1)
    n_per_class: int = Field(default=600, ge=10)
    dim: int = Field(default=32, ge=2)
    cluster_std: float = Field(default=1.0, gt=0)
    outlier_fraction: float = 0.05
    outlier_mode: OutlierMode = "far_point"
    seed: int = Field(default=0, ge=0, lt=2**64)
    # Token soup so the hashing embedder has something to chew on
    tokens_per_text: int = Field(default=12, ge=1)
    vocab_size: int = Field(default=40, ge=2)

    @model_validator(mode="after")
    def _check(self):
        if not 0 <= self.outlier_fraction < 0.5:
            raise ValueError(
                f"outlier_fraction must lie in [0, 0.5), got {self.outlier_fraction}"
            )
        if self.outlier_mode == "label_flip" and self.outlier_fraction > 0 and self.n_classes < 2:
            raise ValueError("label_flip needs at least two classes")
        return self


@dataclass(eq=False)
class SynthDataset:
    records: List[DatasetRecord]
    embeddings: np.ndarray
    is_injected: np.ndarray
    true_labels: np.ndarray

    @property
    def ids(self) -> List[str]:
        return [r.id for r in self.records]

    def truth(self) -> Dict[str, bool]:
        return {r.id: bool(flag) for r, flag in zip(self.records, self.is_injected)}


def _unit(rng: SeededRng, count: int, dim: int) -> np.ndarray:
    directions = rng.normal(size=(count, dim))
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)


def _centers(spec: SynthSpec, rng: SeededRng) -> np.ndarray:
    radius = _CENTER_SEPARATION * spec.cluster_std * max(2, spec.n_classes)
    needed = _CENTER_SEPARATION * spec.cluster_std
    for _ in range(_CENTER_ATTEMPTS):
        centers = radius * _unit(rng, spec.n_classes, spec.dim)
        gaps = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=2)
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() >= needed:
            return centers
    raise ContractError(
        f"Could not place {spec.n_classes} well-separated centers in {spec.dim} dimensions"
    )


def _text(rng: SeededRng, prefix: str, spec: SynthSpec) -> str:
    picks = rng.integers(0, spec.vocab_size, spec.tokens_per_text)
    return " ".join(f"{prefix}w{j}" for j in picks)


def generate(spec: SynthSpec) -> SynthDataset:
    """Gaussian clusters, one per class, with a fixed number of injected outliers.

    Exactly ``floor(outlier_fraction * n_per_class)`` points of every class are
    injected: ``label_flip`` keeps the point where it is but gives it another
    class's label, ``far_point`` moves it ``20 * cluster_std`` away in a random
    direction.
    """
    base = SeededRng(spec.seed)
    centers = _centers(spec, base.derive(0))
    n_injected = int(np.floor(spec.outlier_fraction * spec.n_per_class))

    embeddings = []
    labels = []
    true_labels = []
    injected = []
    texts = []
    for k in range(spec.n_classes):
        rng = base.derive(1, k)
        points = centers[k] + spec.cluster_std * rng.normal(size=(spec.n_per_class, spec.dim))
        class_labels = np.full(spec.n_per_class, k)
        flags = np.zeros(spec.n_per_class, dtype=bool)
        chosen = rng.choice(spec.n_per_class, n_injected) if n_injected else []
        flags[chosen] = True

        if spec.outlier_mode == "far_point" and n_injected:
            points[chosen] += _FAR_POINT_SHIFT * spec.cluster_std * _unit(rng, n_injected, spec.dim)
        elif spec.outlier_mode == "label_flip" and n_injected:
            offsets = rng.integers(1, spec.n_classes, n_injected)
            class_labels[chosen] = (k + offsets) % spec.n_classes

        text_rng = base.derive(2, k)
        for i in range(spec.n_per_class):
            far = flags[i] and spec.outlier_mode == "far_point"
            texts.append(_text(text_rng, "noise" if far else f"c{k}", spec))

        embeddings.append(points)
        labels.append(class_labels)
        true_labels.append(np.full(spec.n_per_class, k))
        injected.append(flags)

    labels = np.concatenate(labels)
    records = [
        DatasetRecord(id=str(i), text=text, label=int(label))
        for i, (text, label) in enumerate(zip(texts, labels))
    ]
    dataset = SynthDataset(
        records=records,
        embeddings=np.vstack(embeddings),
        is_injected=np.concatenate(injected),
        true_labels=np.concatenate(true_labels),
    )
    logger.info(
        f"Generated {len(records)} records, {int(dataset.is_injected.sum())} injected "
        f"({spec.outlier_mode})"
    )
    return dataset


def dump_truth_lines(dataset: SynthDataset) -> str:
    return "".join(
        json.dumps(
            {"id": r.id, "is_injected": bool(flag), "true_label": int(true)},
            sort_keys=True,
        )
        + "\n"
        for r, flag, true in zip(dataset.records, dataset.is_injected, dataset.true_labels)
    )


def read_truth_file(path: Union[str, Path]) -> Dict[str, bool]:
    truth = {}
    with Path(path).open(encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                truth[str(entry["id"])] = bool(entry["is_injected"])
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise DatasetFormatError(f"invalid truth entry ({e})", line=line_number)
    return truth
