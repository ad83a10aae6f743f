import json
from pathlib import Path
from typing import Iterable

import numpy as np
import pytest

from ..data import DatasetRecord, SynthSpec, generate
from ..nn import Activation, DenseNet, LayerSpec


def write_jsonl(path: Path, rows: Iterable[dict]) -> Path:
    path.write_text("".join(json.dumps(row) + "\n" for row in rows), encoding="utf-8")
    return path


def identity_encoder(dim: int) -> DenseNet:
    return DenseNet([LayerSpec(weight=np.eye(dim), activation=Activation.IDENTITY)])


def records_for(labels) -> list:
    return [DatasetRecord(id=str(i), text=f"text {i}", label=int(y)) for i, y in enumerate(labels)]


@pytest.fixture(autouse=True)
def _no_embed_url_override(monkeypatch):
    monkeypatch.delenv("SVDD_CLEAN_EMBED_URL", raising=False)


@pytest.fixture(scope="session")
def two_class_far_points():
    return generate(
        SynthSpec(
            n_classes=2,
            n_per_class=600,
            dim=32,
            outlier_fraction=0.05,
            outlier_mode="far_point",
            seed=11,
        )
    )


@pytest.fixture
def blobs():
    rng = np.random.default_rng(3)
    directions = rng.normal(size=(200, 2))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.uniform(0, 1, size=(200, 1))
    points = directions * radii
    points[:100, 0] -= 5
    points[100:, 0] += 5
    labels = np.array([0] * 100 + [1] * 100)
    return points, labels
