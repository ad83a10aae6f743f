import hashlib
import re
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from ..data import DatasetRecord
from .config import EmbeddingProviderConfig


@lru_cache(maxsize=32)
def _compiled(pattern: str):
    return re.compile(pattern)


def tokenize(text: str, token_pattern: str) -> List[str]:
    return _compiled(token_pattern).findall(text.lower())


def _bucket(token: str, dim: int, hash_seed: int) -> Tuple[int, float]:
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=16, key=hash_seed.to_bytes(8, "little")
    ).digest()
    index = int.from_bytes(digest[:8], "little") % dim
    sign = 1.0 if digest[8] & 1 else -1.0
    return index, sign


def hash_text(text: str, dim: int, hash_seed: int, token_pattern: str) -> np.ndarray:
    """Signed feature hashing of a bag of tokens, L2-normalized."""
    vector = np.zeros(dim)
    for token in tokenize(text, token_pattern):
        index, sign = _bucket(token, dim, hash_seed)
        vector[index] += sign

    norm = np.linalg.norm(vector)
    # Texts without tokens, or whose tokens cancel out, stay at the zero vector
    if norm > 0:
        vector /= norm
    return vector


def embed_hashing(
    config: EmbeddingProviderConfig, records: Sequence[DatasetRecord]
) -> np.ndarray:
    out = np.zeros((len(records), config.dim))
    for i, record in enumerate(records):
        out[i] = hash_text(record.text, config.dim, config.hash_seed, config.token_pattern)
    return out
