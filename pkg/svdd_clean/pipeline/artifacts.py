import json
import logging
import os
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Mapping, Sequence, Union

import numpy as np

from ..constants import FORMAT_VERSION, JsonDict
from ..embeddings import dump_embedding_lines, read_embedding_file
from ..errors import DataError, MissingArtifactError
from ..models import DeepSvddModel, ScoreSet, model_from_dict, model_to_dict
from .filtering import FilterReport

if TYPE_CHECKING:
    from .fitting import ClassFit

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.json"
MANIFEST_FILE = "manifest.json"
SPLIT_FILE = "split.json"
EMBEDDINGS_FILE = "embeddings.jsonl"
TRACES_FILE = "traces.json"
TRAIN_SCORES_FILE = "scores_train.jsonl"
TEST_SCORES_FILE = "scores_test.jsonl"
MODELS_DIR = "models"


def atomic_write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp-{os.getpid()}")
    with tmp.open("w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    os.replace(tmp, path)


def dumps_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def report_file_name(threshold: float) -> str:
    return f"report_{threshold:.3f}.json"


class RunDirectory:
    """Layout of one cleaning run; everything needed to re-filter and re-evaluate."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)

    def __repr__(self):
        return f"RunDirectory({str(self.path)!r})"

    def file(self, name: str) -> Path:
        return self.path / name

    def model_file(self, label: int) -> str:
        return f"{MODELS_DIR}/model_{label}.json"

    def write_text(self, name: str, text: str) -> Path:
        path = self.file(name)
        atomic_write_text(path, text)
        logger.debug(f"Wrote {path}")
        return path

    def write_json(self, name: str, data) -> Path:
        return self.write_text(name, dumps_json(data))

    def read_text(self, name: str) -> str:
        path = self.file(name)
        if not path.is_file():
            raise MissingArtifactError(f"Run directory {self.path} has no {name}")
        return path.read_text(encoding="utf-8")

    def read_json(self, name: str):
        try:
            return json.loads(self.read_text(name))
        except json.JSONDecodeError as e:
            raise DataError(f"{self.file(name)} is not valid JSON ({e.msg})")

    def write_fits(self, fits: Mapping[int, "ClassFit"]) -> Dict[str, str]:
        traces = {}
        for label, fit in sorted(fits.items()):
            self.write_json(self.model_file(label), model_to_dict(fit.model))
            traces[str(label)] = {
                "autoencoder": fit.autoencoder_trace,
                "svdd": fit.svdd_trace,
            }
        self.write_json(TRACES_FILE, {"format_version": FORMAT_VERSION, "classes": traces})
        return self.model_files(fits)

    def model_files(self, labels) -> Dict[str, str]:
        return {str(label): self.model_file(label) for label in sorted(labels)}

    def read_model(self, label: int) -> DeepSvddModel:
        return model_from_dict(self.read_json(self.model_file(label)))

    def write_scores(self, name: str, score_sets: Mapping[int, ScoreSet]) -> Path:
        lines = []
        for label in sorted(score_sets):
            scores = score_sets[label]
            for record_id, raw, normalized in zip(scores.ids, scores.raw, scores.normalized):
                lines.append(
                    json.dumps(
                        {
                            "format_version": FORMAT_VERSION,
                            "id": record_id,
                            "label": label,
                            "raw": float(raw),
                            "normalized": float(normalized),
                        },
                        sort_keys=True,
                    )
                )
        return self.write_text(name, "".join(line + "\n" for line in lines))

    def read_scores(self, name: str) -> Dict[int, ScoreSet]:
        grouped: Dict[int, List[JsonDict]] = {}
        for line_number, line in enumerate(self.read_text(name).splitlines(), start=1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                grouped.setdefault(int(entry["label"]), []).append(entry)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise DataError(f"{self.file(name)} line {line_number}: {e}")
        return {
            label: ScoreSet(
                ids=[e["id"] for e in entries],
                raw=np.array([e["raw"] for e in entries]),
                normalized=np.array([e["normalized"] for e in entries]),
            )
            for label, entries in sorted(grouped.items())
        }

    def write_embeddings(self, ids: Sequence[str], vectors: np.ndarray) -> Path:
        return self.write_text(EMBEDDINGS_FILE, dump_embedding_lines(ids, vectors))

    def read_embeddings(self) -> Dict[str, np.ndarray]:
        path = self.file(EMBEDDINGS_FILE)
        if not path.is_file():
            raise MissingArtifactError(f"Run directory {self.path} has no {EMBEDDINGS_FILE}")
        return read_embedding_file(path)

    def write_report(self, report: FilterReport) -> Path:
        return self.write_json(report_file_name(report.threshold), report.model_dump())

    def read_report(self, threshold: float) -> FilterReport:
        return FilterReport.model_validate(self.read_json(report_file_name(threshold)))

    def report_thresholds(self) -> List[float]:
        thresholds = []
        for path in self.path.glob("report_*.json"):
            try:
                thresholds.append(float(path.stem[len("report_"):]))
            except ValueError:
                continue
        return sorted(thresholds)
