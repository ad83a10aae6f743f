import logging
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..constants import DEFAULT_THRESHOLD
from ..data import DatasetRecord
from ..embeddings import EmbeddingProviderConfig, embed_records
from ..errors import ContractError, ShapeError
from ..models import ScoreSet
from .filtering import FilterReport, filter_by_threshold
from .fitting import ClassFit, FitConfig, fit_per_class, score_records

logger = logging.getLogger(__name__)


class AutoFilter:
    """One-call outlier filtering of a training index set.

    >>> train = AutoFilter().filter_data(train, test, x, y, threshold=0.6)

    ``data`` is either a sequence of texts, embedded with the configured provider,
    or an array with one embedding row per item. Models are fitted on the training
    indices only; the test indices are scored afterwards and kept in
    ``last_test_scores`` so callers can split their evaluation into inliers and
    outliers.
    """

    def __init__(
        self,
        fit_config: Optional[FitConfig] = None,
        embedding_config: Optional[EmbeddingProviderConfig] = None,
    ):
        self.fit_config = fit_config or FitConfig()
        self.embedding_config = embedding_config or EmbeddingProviderConfig()
        self.fits: Dict[int, ClassFit] = {}
        self.last_report: Optional[FilterReport] = None
        self.last_test_scores: Dict[int, ScoreSet] = {}

    def _records(self, indices, data, labels) -> List[DatasetRecord]:
        texts = data if not isinstance(data, np.ndarray) else None
        return [
            DatasetRecord(
                id=str(i),
                text=str(texts[i]) if texts is not None else "",
                label=int(labels[i]),
            )
            for i in indices
        ]

    def _vectors(self, records: List[DatasetRecord], indices, data) -> np.ndarray:
        if isinstance(data, np.ndarray):
            if data.ndim != 2:
                raise ShapeError(f"Embedding data must be 2-D, got shape {data.shape}")
            return data[list(indices)].astype(np.float64)
        return embed_records(self.embedding_config, records)

    def filter_data(
        self,
        train_indices: Sequence[int],
        test_indices: Sequence[int],
        data: Union[Sequence[str], np.ndarray],
        labels: Sequence[int],
        threshold: float = DEFAULT_THRESHOLD,
    ) -> List[int]:
        if len(data) != len(labels):
            raise ContractError(f"{len(data)} data items but {len(labels)} labels")
        overlap = set(train_indices) & set(test_indices)
        if overlap:
            raise ContractError(
                f"{len(overlap)} indices are in both the train and test sets"
            )

        train_records = self._records(train_indices, data, labels)
        self.fits = fit_per_class(
            train_records, self._vectors(train_records, train_indices, data), self.fit_config
        )
        self.last_report = filter_by_threshold(
            {label: fit.scores for label, fit in self.fits.items()},
            threshold,
            seed=self.fit_config.seed,
        )

        test_records = self._records(test_indices, data, labels)
        if test_records:
            self.last_test_scores = score_records(
                self.fits, test_records, self._vectors(test_records, test_indices, data)
            )

        kept = set(self.last_report.kept_ids())
        return [i for i in train_indices if str(i) in kept]


def filter_data(
    train_indices: Sequence[int],
    test_indices: Sequence[int],
    data: Union[Sequence[str], np.ndarray],
    labels: Sequence[int],
    threshold: float = DEFAULT_THRESHOLD,
    **fit_options,
) -> List[int]:
    return AutoFilter(FitConfig(**fit_options)).filter_data(
        train_indices, test_indices, data, labels, threshold=threshold
    )
