from .data import DatasetRecord, load_dataset, split_train_test
from .embeddings import EmbeddingProviderConfig, embed_records
from .errors import (
    ConfigError,
    ContractError,
    DataError,
    SmallClassError,
    SvddCleanError,
    TrainingError,
)
from .models import DeepSvddModel, ScoreSet, min_enclosing_ball, soft_svdd
from .pipeline import (
    AutoFilter,
    FitConfig,
    FilterReport,
    filter_by_threshold,
    filter_data,
    fit_per_class,
    score_records,
)
