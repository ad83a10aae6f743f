from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..constants import DEFAULT_EMBED_URL

EmbedderKind = Literal["precomputed", "hashing", "remote"]

DEFAULT_DIM = 384
DEFAULT_TOKEN_PATTERN = r"[a-z0-9]+"


class EmbeddingProviderConfig(BaseModel):
    kind: EmbedderKind = "hashing"
    dim: int = Field(default=DEFAULT_DIM, ge=1)

    # precomputed
    path: Optional[Path] = None

    # hashing
    token_pattern: str = DEFAULT_TOKEN_PATTERN
    hash_seed: int = Field(default=0, ge=0, lt=2**64)

    # remote
    base_url: str = DEFAULT_EMBED_URL
    batch_size: int = Field(default=64, ge=1)
    timeout: float = Field(default=30.0, gt=0)
    retries: int = Field(default=3, ge=0)
    backoff: float = Field(default=0.5, ge=0)
    max_in_flight: int = Field(default=4, ge=1)

    @model_validator(mode="after")
    def _check_kind_fields(self):
        if self.kind == "precomputed" and self.path is None:
            raise ValueError("the precomputed embedder needs a file path")
        if self.kind == "hashing" and self.dim < 2:
            raise ValueError("the hashing embedder needs dim >= 2")
        return self
