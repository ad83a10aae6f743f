import logging
from datetime import datetime, timezone
from typing import Dict, List, Mapping, Optional, Tuple

from pydantic import BaseModel, Field

from ..constants import FORMAT_VERSION, JsonDict
from ..errors import ContractError
from ..models import ScoreSet

logger = logging.getLogger(__name__)


class ClassFilter(BaseModel):
    label: int
    kept: List[str]
    removed: List[str]
    coverage: float = Field(ge=0, le=100)


class FilterReport(BaseModel):
    format_version: int = FORMAT_VERSION
    threshold: float = Field(ge=0, le=1)
    classes: List[ClassFilter]
    total: int
    kept: int
    data_coverage: float = Field(ge=0, le=100)
    model_files: Dict[str, str] = {}
    seed: Optional[int] = None
    created_at: Optional[str] = None

    def kept_ids(self) -> List[str]:
        return [i for c in self.classes for i in c.kept]

    def removed_ids(self) -> List[str]:
        return [i for c in self.classes for i in c.removed]


def _percent(kept: int, total: int) -> float:
    return 100.0 if total == 0 else 100.0 * kept / total


def filter_by_threshold(
    score_sets: Mapping[int, ScoreSet],
    threshold: float,
    model_files: Optional[Mapping[str, str]] = None,
    seed: Optional[int] = None,
) -> FilterReport:
    """Keep a record iff its normalized score is at most ``threshold``."""
    if not 0 <= threshold <= 1:
        raise ContractError(f"Threshold must lie in [0, 1], got {threshold}")

    classes = []
    for label in sorted(score_sets):
        scores = score_sets[label]
        keep = scores.normalized <= threshold
        kept = [i for i, k in zip(scores.ids, keep) if k]
        removed = [i for i, k in zip(scores.ids, keep) if not k]
        classes.append(
            ClassFilter(
                label=label,
                kept=kept,
                removed=removed,
                coverage=_percent(len(kept), len(scores)),
            )
        )

    total = sum(len(c.kept) + len(c.removed) for c in classes)
    kept_total = sum(len(c.kept) for c in classes)
    report = FilterReport(
        threshold=threshold,
        classes=classes,
        total=total,
        kept=kept_total,
        data_coverage=_percent(kept_total, total),
        model_files=dict(model_files or {}),
        seed=seed,
        created_at=datetime.now(timezone.utc).isoformat(),
    )
    logger.info(
        f"Threshold {threshold:.3f}: kept {kept_total}/{total} "
        f"({report.data_coverage:.3f}%)"
    )
    return report


def format_percent(value: float) -> str:
    return f"{value:.3f}%"


def coverage_report(report: FilterReport) -> Tuple[str, JsonDict]:
    """Human-readable and machine-readable coverage summaries of a report."""
    lines = [f"threshold {report.threshold:.3f}"]
    summary = {
        "format_version": FORMAT_VERSION,
        "threshold": report.threshold,
        "classes": [],
        "overall": {
            "kept": report.kept,
            "total": report.total,
            "coverage": format_percent(report.data_coverage),
        },
    }
    for c in report.classes:
        size = len(c.kept) + len(c.removed)
        lines.append(
            f"label {c.label}: kept {len(c.kept)}/{size} ({format_percent(c.coverage)})"
        )
        summary["classes"].append(
            {
                "label": c.label,
                "kept": len(c.kept),
                "total": size,
                "coverage": format_percent(c.coverage),
            }
        )
    lines.append(
        f"overall: kept {report.kept}/{report.total} "
        f"({format_percent(report.data_coverage)})"
    )
    return "\n".join(lines), summary
