import csv
import io
import json
import logging
from collections import OrderedDict
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import ContractError, DatasetFormatError
from ..nn import SeededRng

logger = logging.getLogger(__name__)

DATASET_FORMATS = ("jsonl", "csv")

# label -> record ids, in dataset order
ClassPartition = Dict[int, List[str]]


class DatasetRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    text: str
    label: int = Field(ge=0)


def _record_from_row(row: dict, index: int, line: int) -> DatasetRecord:
    if not isinstance(row, dict):
        raise DatasetFormatError("expected an object", line=line)
    row_id = row.get("id")
    if row_id is None or row_id == "":
        row_id = str(index)
    label = row.get("label")
    if isinstance(label, bool) or (isinstance(label, float) and not label.is_integer()):
        raise DatasetFormatError(f"label must be an integer, got {label!r}", line=line)
    if isinstance(label, str):
        try:
            label = int(label.strip())
        except ValueError:
            raise DatasetFormatError(
                f"label must be an integer, got {label!r}", line=line
            ) from None
    try:
        return DatasetRecord(id=str(row_id), text=row.get("text"), label=label)
    except ValidationError as e:
        raise DatasetFormatError(
            "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors()),
            line=line,
        ) from None


def _jsonl_rows(path: Path) -> Iterable[Tuple[int, dict]]:
    with path.open(encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield line_number, json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetFormatError(f"invalid JSON ({e.msg})", line=line_number)


def _csv_rows(path: Path) -> Iterable[Tuple[int, dict]]:
    with path.open(encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            return
        missing = {"text", "label"} - set(reader.fieldnames)
        if missing:
            raise DatasetFormatError(
                f"CSV header is missing {sorted(missing)}", line=1
            )
        for row in reader:
            if None in row:
                raise DatasetFormatError("too many fields", line=reader.line_num)
            yield reader.line_num, row


def load_dataset(path: Union[str, Path], format: str = "jsonl") -> List[DatasetRecord]:
    """Read records in file order. Missing ids become zero-based row indices."""
    path = Path(path)
    if format == "jsonl":
        rows = _jsonl_rows(path)
    elif format == "csv":
        rows = _csv_rows(path)
    else:
        raise DatasetFormatError(
            f"Unknown dataset format '{format}', expected one of {DATASET_FORMATS}"
        )

    records = []
    seen = {}
    for index, (line, row) in enumerate(rows):
        record = _record_from_row(row, index, line)
        if record.id in seen:
            raise DatasetFormatError(
                f"duplicate id '{record.id}' (first seen on line {seen[record.id]})",
                line=line,
            )
        seen[record.id] = line
        records.append(record)

    logger.info(f"Loaded {len(records)} records from {path}")
    return records


def dump_dataset_jsonl(records: Sequence[DatasetRecord]) -> str:
    out = io.StringIO()
    for record in records:
        out.write(json.dumps(record.model_dump(), sort_keys=True, ensure_ascii=False))
        out.write("\n")
    return out.getvalue()


def partition_by_label(records: Sequence[DatasetRecord]) -> ClassPartition:
    partition = OrderedDict()
    for record in records:
        partition.setdefault(record.label, []).append(record.id)
    return dict(sorted(partition.items()))


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


def split_train_test(
    records: Sequence[DatasetRecord], test_fraction: float, rng: SeededRng
) -> Tuple[List[str], List[str]]:
    """Stratified split; both id lists come back in dataset order."""
    if not 0 < test_fraction < 1:
        raise ContractError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    if not records:
        raise ContractError("Cannot split an empty dataset")

    test_ids = set()
    for label, ids in partition_by_label(records).items():
        size = len(ids)
        n_test = _round_half_up(test_fraction * size)
        if size >= 2:
            n_test = min(max(n_test, 1), size - 1)
        else:
            n_test = 0
        order = rng.derive(label).permutation(size)
        test_ids.update(ids[i] for i in order[:n_test])

    train = [r.id for r in records if r.id not in test_ids]
    test = [r.id for r in records if r.id in test_ids]
    return train, test
