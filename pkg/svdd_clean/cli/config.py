from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..classifiers import CLASSIFIER_KINDS, ClassifierSettings
from ..constants import (
    BASE_DATA_PATH,
    DEFAULT_EMBED_URL,
    DEFAULT_THRESHOLDS,
    MIN_CLASS_SIZE,
)
from ..embeddings import DEFAULT_DIM, EmbedderKind, EmbeddingProviderConfig
from ..errors import ConfigError
from ..pipeline import FitConfig


class RunConfig(BaseModel):
    """Everything a cleaning run depends on; written verbatim into the run directory."""

    model_config = ConfigDict(extra="forbid")

    data: Optional[Path] = None
    format: Literal["jsonl", "csv"] = "jsonl"
    dataset_name: Optional[str] = None

    embedder: EmbedderKind = "hashing"
    dim: int = Field(default=DEFAULT_DIM, ge=1)
    embeddings_path: Optional[Path] = None
    hash_seed: int = Field(default=0, ge=0)
    embed_url: str = DEFAULT_EMBED_URL
    embed_batch_size: int = Field(default=64, ge=1)
    embed_timeout: float = Field(default=30.0, gt=0)
    embed_retries: int = Field(default=3, ge=0)

    encoder_dims: List[int] = Field(default=[128, 32], min_length=1)
    pretrain: bool = True
    epochs_ae: int = Field(default=100, ge=0)
    epochs_svdd: int = Field(default=150, ge=0)
    batch_size: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0)
    weight_decay: float = Field(default=1e-6, ge=0)
    nu: float = Field(default=0.1, gt=0, le=1)
    min_class_size: int = Field(default=MIN_CLASS_SIZE, ge=1)
    allow_small_classes: bool = False
    workers: int = Field(default=1, ge=1)

    test_fraction: float = Field(default=0.1, gt=0, lt=1)
    thresholds: List[float] = Field(default=list(DEFAULT_THRESHOLDS), min_length=1)

    classifiers: List[str] = Field(default=list(CLASSIFIER_KINDS), min_length=1)
    knn_k: int = Field(default=5, ge=1)
    logreg_epochs: int = Field(default=500, ge=0)
    logreg_learning_rate: float = Field(default=0.1, gt=0)
    lda_ridge: Optional[float] = Field(default=None, ge=0)
    tree_max_depth: int = Field(default=8, ge=1)
    tree_min_leaf: int = Field(default=1, ge=1)

    seed: int = Field(default=0, ge=0, lt=2**64)
    out: Optional[Path] = None

    @field_validator("encoder_dims", "thresholds", "classifiers", mode="before")
    @classmethod
    def _split_lists(cls, value):
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value

    @field_validator("thresholds")
    @classmethod
    def _check_thresholds(cls, value: List[float]):
        for threshold in value:
            if not 0 <= threshold <= 1:
                raise ValueError(f"thresholds must lie in [0, 1], got {threshold}")
        return sorted(set(value))

    @field_validator("classifiers")
    @classmethod
    def _check_classifiers(cls, value: List[str]):
        unknown = [kind for kind in value if kind not in CLASSIFIER_KINDS]
        if unknown:
            raise ValueError(f"unknown classifiers {unknown}, expected {list(CLASSIFIER_KINDS)}")
        # Keep table column order
        return [kind for kind in CLASSIFIER_KINDS if kind in value]

    def embedding_config(self) -> EmbeddingProviderConfig:
        return EmbeddingProviderConfig(
            kind=self.embedder,
            dim=self.dim,
            path=self.embeddings_path,
            hash_seed=self.hash_seed,
            base_url=self.embed_url,
            batch_size=self.embed_batch_size,
            timeout=self.embed_timeout,
            retries=self.embed_retries,
        )

    def fit_config(self) -> FitConfig:
        return FitConfig(
            encoder_dims=self.encoder_dims,
            pretrain=self.pretrain,
            ae_epochs=self.epochs_ae,
            ae_batch_size=self.batch_size,
            svdd_epochs=self.epochs_svdd,
            svdd_batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            weight_decay=self.weight_decay,
            nu=self.nu,
            min_class_size=self.min_class_size,
            allow_small_classes=self.allow_small_classes,
            seed=self.seed,
            workers=self.workers,
        )

    def classifier_settings(self) -> ClassifierSettings:
        return ClassifierSettings(
            knn_k=self.knn_k,
            logreg_epochs=self.logreg_epochs,
            logreg_learning_rate=self.logreg_learning_rate,
            lda_ridge=self.lda_ridge,
            tree_max_depth=self.tree_max_depth,
            tree_min_leaf=self.tree_min_leaf,
        )

    def resolved_name(self) -> str:
        if self.dataset_name:
            return self.dataset_name
        return self.data.stem if self.data is not None else "dataset"

    def output_path(self) -> Path:
        if self.out is not None:
            return self.out
        return BASE_DATA_PATH / "runs" / f"{self.resolved_name()}-seed{self.seed}"


def parse_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment line."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e.strerror}")

    values = {}
    for line_number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{path} line {line_number}: expected 'key = value'")
        if key not in RunConfig.model_fields:
            raise ConfigError(f"{path} line {line_number}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"{path} line {line_number}: '{key}' is set twice")
        values[key] = value.strip()
    return values


def _validation_message(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(map(str, e['loc'])) or 'config'}: {e['msg']}" for e in error.errors()
    )


def resolve_config(
    flags: Dict[str, object], config_file: Optional[Union[str, Path]] = None
) -> RunConfig:
    """Merge flags over the config file over defaults."""
    values: Dict[str, object] = {}
    if config_file is not None:
        values.update(parse_config_file(config_file))
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {_validation_message(e)}") from None
