import json
import logging
from pathlib import Path
from typing import Dict, Iterable, Sequence, Union

import numpy as np

from ..data import DatasetRecord
from ..errors import DatasetFormatError, EmbeddingError, ShapeError
from .config import EmbeddingProviderConfig

logger = logging.getLogger(__name__)

_MAX_LISTED_IDS = 10


def read_embedding_file(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """Parse a JSON Lines file of ``{"id": ..., "vector": [...]}`` objects."""
    vectors = {}
    with Path(path).open(encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                vector_id = str(entry["id"])
                vector = np.asarray(entry["vector"], dtype=np.float64)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise DatasetFormatError(f"invalid embedding entry ({e})", line=line_number)
            if vector.ndim != 1 or not np.all(np.isfinite(vector)):
                raise DatasetFormatError(
                    "embedding vector must be a flat list of finite numbers",
                    line=line_number,
                )
            vectors[vector_id] = vector
    return vectors


def dump_embedding_lines(ids: Iterable[str], vectors: np.ndarray) -> str:
    return "".join(
        json.dumps({"id": vector_id, "vector": vector.tolist()}) + "\n"
        for vector_id, vector in zip(ids, vectors)
    )


def embed_precomputed(
    config: EmbeddingProviderConfig, records: Sequence[DatasetRecord]
) -> np.ndarray:
    if not records:
        return np.zeros((0, config.dim))

    vectors = read_embedding_file(config.path)
    missing = [r.id for r in records if r.id not in vectors]
    if missing:
        listed = ", ".join(repr(i) for i in missing[:_MAX_LISTED_IDS])
        more = f" and {len(missing) - _MAX_LISTED_IDS} more" if len(missing) > _MAX_LISTED_IDS else ""
        raise EmbeddingError(
            f"{config.path} has no embedding for {len(missing)} record(s): {listed}{more}"
        )

    out = np.empty((len(records), config.dim))
    for i, record in enumerate(records):
        vector = vectors[record.id]
        if vector.shape[0] != config.dim:
            raise ShapeError(
                f"Embedding for '{record.id}' has dimension {vector.shape[0]}, "
                f"expected {config.dim}"
            )
        out[i] = vector

    logger.debug(f"Looked up {len(records)} precomputed embeddings from {config.path}")
    return out
