from typing import Sequence

import numpy as np

from ..data import DatasetRecord
from .config import DEFAULT_DIM, EmbeddingProviderConfig, EmbedderKind
from .hashing import embed_hashing, hash_text, tokenize
from .precomputed import dump_embedding_lines, embed_precomputed, read_embedding_file
from .remote import EmbeddingServiceClient, embed_remote, embed_remote_async

_PROVIDERS = {
    "precomputed": embed_precomputed,
    "hashing": embed_hashing,
    "remote": embed_remote,
}


def embed_records(
    config: EmbeddingProviderConfig, records: Sequence[DatasetRecord]
) -> np.ndarray:
    """Embed ``records`` with the configured provider, one row per record."""
    return _PROVIDERS[config.kind](config, records)
