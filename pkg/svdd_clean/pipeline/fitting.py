import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..constants import MIN_CLASS_SIZE
from ..data import DatasetRecord, partition_by_label
from ..errors import DataError, ShapeError, SmallClassError
from ..models import (
    AutoencoderModel,
    DeepSvddModel,
    ScoreSet,
    init_center,
    pretrain,
    score,
    train_one_class,
)
from ..nn import SeededRng

if TYPE_CHECKING:
    from .artifacts import RunDirectory

logger = logging.getLogger(__name__)


class FitConfig(BaseModel):
    # Hidden and code sizes; the input size comes from the embeddings
    encoder_dims: List[int] = Field(default=[128, 32], min_length=1)
    pretrain: bool = True
    ae_epochs: int = Field(default=100, ge=0)
    ae_batch_size: int = Field(default=64, ge=1)
    svdd_epochs: int = Field(default=150, ge=0)
    svdd_batch_size: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0)
    weight_decay: float = Field(default=1e-6, ge=0)
    nu: float = Field(default=0.1, gt=0, le=1)
    min_class_size: int = Field(default=MIN_CLASS_SIZE, ge=1)
    allow_small_classes: bool = False
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)


@dataclass(eq=False)
class ClassFit:
    label: int
    model: DeepSvddModel
    autoencoder_trace: List[float]
    svdd_trace: List[float]
    # Normalized within the class, over the records the model was fitted on
    scores: ScoreSet


def _check_class_sizes(partition: Mapping[int, List[str]], config: FitConfig):
    small = {
        label: len(ids)
        for label, ids in partition.items()
        if len(ids) < config.min_class_size
    }
    if not small:
        return

    listed = ", ".join(f"label {label}: {size}" for label, size in small.items())
    if not config.allow_small_classes:
        raise SmallClassError(
            f"Deep SVDD needs at least {config.min_class_size} samples per class "
            f"(one-class training is unreliable below that); too small: {listed}. "
            f"Pass --allow-small-classes to proceed anyway."
        )
    logger.warning(f"Fitting undersized classes ({listed}); scores may be unreliable")


def fit_class(
    label: int, ids: Sequence[str], vectors: np.ndarray, config: FitConfig
) -> ClassFit:
    """Pretrain an autoencoder, transfer its encoder and train Deep SVDD for one class."""
    rng = SeededRng(config.seed).derive(label)
    dims = [vectors.shape[1], *config.encoder_dims]
    logger.info(f"Fitting class {label} on {len(ids)} records (encoder {dims})")

    autoencoder = AutoencoderModel.build(dims, rng.derive(0))
    autoencoder_trace = []
    if config.pretrain:
        autoencoder, autoencoder_trace = pretrain(
            autoencoder,
            vectors,
            epochs=config.ae_epochs,
            batch_size=config.ae_batch_size,
            rng=rng.derive(1),
            learning_rate=config.learning_rate,
        )

    # Only the encoder survives pretraining
    encoder = autoencoder.encoder.copy()
    model = DeepSvddModel(
        encoder=encoder,
        weight_decay=config.weight_decay,
        nu=config.nu,
        seed=config.seed,
    )
    model.center = init_center(encoder, vectors)
    model, svdd_trace = train_one_class(
        model,
        vectors,
        epochs=config.svdd_epochs,
        batch_size=config.svdd_batch_size,
        rng=rng.derive(2),
        learning_rate=config.learning_rate,
    )

    scores = ScoreSet(ids=list(ids), raw=score(model, vectors))
    logger.info(f"Class {label} done: radius {model.radius:.4g}")
    return ClassFit(
        label=label,
        model=model,
        autoencoder_trace=autoencoder_trace,
        svdd_trace=svdd_trace,
        scores=scores,
    )


def _rows_by_id(records: Sequence[DatasetRecord], embeddings) -> Dict[str, np.ndarray]:
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if embeddings.ndim != 2 or embeddings.shape[0] != len(records):
        raise ShapeError(
            f"Expected one embedding row per record ({len(records)}), "
            f"got shape {embeddings.shape}"
        )
    return {record.id: embeddings[i] for i, record in enumerate(records)}


def fit_per_class(
    records: Sequence[DatasetRecord],
    embeddings,
    config: FitConfig,
    run_dir: Optional["RunDirectory"] = None,
) -> Dict[int, ClassFit]:
    """One Deep SVDD model per label, trained independently on that label's records."""
    if not records:
        raise DataError("No training records to fit")
    rows = _rows_by_id(records, embeddings)
    partition = partition_by_label(records)
    _check_class_sizes(partition, config)

    def job(label):
        ids = partition[label]
        return fit_class(label, ids, np.vstack([rows[i] for i in ids]), config)

    if config.workers > 1 and len(partition) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            fits = list(pool.map(job, partition))
    else:
        fits = [job(label) for label in partition]

    result = {fit.label: fit for fit in fits}
    if run_dir is not None:
        run_dir.write_fits(result)
    return result


def score_records(
    fits: Mapping[int, ClassFit], records: Sequence[DatasetRecord], embeddings
) -> Dict[int, ScoreSet]:
    """Score records with the model of their own label, normalizing within each class."""
    rows = _rows_by_id(records, embeddings)
    result = {}
    for label, ids in partition_by_label(records).items():
        if label not in fits:
            raise DataError(f"No model was fitted for label {label}")
        raw = score(fits[label].model, np.vstack([rows[i] for i in ids]))
        result[label] = ScoreSet(ids=ids, raw=raw)
    return result
