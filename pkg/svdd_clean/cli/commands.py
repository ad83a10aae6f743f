import csv
import hashlib
import io
import json
import logging
from collections import Counter
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..classifiers import (
    CLASSIFIER_KINDS,
    CLASSIFIER_NAMES,
    evaluate_split,
    fit_classifier,
    injection_auc,
)
from ..constants import FORMAT_VERSION, JsonDict
from ..data import (
    SynthSpec,
    dump_dataset_jsonl,
    dump_truth_lines,
    generate,
    load_dataset,
    read_truth_file,
    split_train_test,
)
from ..embeddings import dump_embedding_lines, embed_records
from ..errors import ConfigError, ContractError, DataError, MissingArtifactError, NumericError
from ..models import min_enclosing_ball, soft_svdd
from ..nn import SeededRng
from ..pipeline import (
    RunDirectory,
    atomic_write_text,
    coverage_report,
    filter_by_threshold,
    fit_per_class,
    format_percent,
    score_records,
)
from ..pipeline.artifacts import (
    CONFIG_FILE,
    MANIFEST_FILE,
    SPLIT_FILE,
    TEST_SCORES_FILE,
    TRAIN_SCORES_FILE,
)
from .config import RunConfig

logger = logging.getLogger(__name__)

# Independent rng streams derived from the run seed
_SPLIT_STREAM = 1
_EVAL_STREAM = 2
_ORACLE_STREAM = 3

EVAL_FILE = "eval.json"
ACCURACY_TABLE_FILE = "eval_accuracy.csv"
INLIER_OUTLIER_TABLE_FILE = "eval_inlier_outlier.csv"


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def cmd_clean(config: RunConfig) -> RunDirectory:
    """Embed, split, fit one model per class, score and write one report per threshold."""
    if config.data is None:
        raise ConfigError("No dataset given (--data)")
    if config.embedder == "precomputed" and config.embeddings_path is None:
        raise ConfigError("The precomputed embedder needs --embeddings")

    try:
        records = load_dataset(config.data, config.format)
    except OSError as e:
        raise DataError(f"Cannot read dataset {config.data}: {e.strerror}")
    if not records:
        raise DataError(f"Dataset {config.data} is empty")

    run_dir = RunDirectory(config.output_path())
    run_dir.write_json(CONFIG_FILE, config.model_dump(mode="json"))
    run_dir.write_json(
        MANIFEST_FILE,
        {
            "format_version": FORMAT_VERSION,
            "dataset": str(config.data),
            "dataset_format": config.format,
            "dataset_sha256": _sha256(config.data),
            "records": len(records),
            "labels": {str(k): v for k, v in sorted(Counter(r.label for r in records).items())},
        },
    )

    embeddings = embed_records(config.embedding_config(), records)
    run_dir.write_embeddings([r.id for r in records], embeddings)
    row_of = {r.id: i for i, r in enumerate(records)}

    train_ids, test_ids = split_train_test(
        records, config.test_fraction, SeededRng(config.seed).derive(_SPLIT_STREAM)
    )
    run_dir.write_json(
        SPLIT_FILE,
        {
            "format_version": FORMAT_VERSION,
            "train": train_ids,
            "test": test_ids,
            "labels": {r.id: r.label for r in records},
        },
    )

    train = [records[row_of[i]] for i in train_ids]
    train_vectors = embeddings[[row_of[i] for i in train_ids]]
    fits = fit_per_class(train, train_vectors, config.fit_config(), run_dir=run_dir)
    model_files = run_dir.model_files(fits)

    train_scores = {label: fit.scores for label, fit in fits.items()}
    run_dir.write_scores(TRAIN_SCORES_FILE, train_scores)
    test = [records[row_of[i]] for i in test_ids]
    test_scores = (
        score_records(fits, test, embeddings[[row_of[i] for i in test_ids]]) if test else {}
    )
    run_dir.write_scores(TEST_SCORES_FILE, test_scores)

    for threshold in config.thresholds:
        report = filter_by_threshold(
            train_scores, threshold, model_files=model_files, seed=config.seed
        )
        path = run_dir.write_report(report)
        text, _ = coverage_report(report)
        logger.info(f"Wrote {path}\n{text}")

    return run_dir


def _load_run_config(run_dir: RunDirectory) -> RunConfig:
    try:
        return RunConfig.model_validate(run_dir.read_json(CONFIG_FILE))
    except ValueError as e:
        if isinstance(e, DataError):
            raise
        raise DataError(f"{run_dir.file(CONFIG_FILE)} is not a valid run config: {e}")


def cmd_refilter(run_dir: RunDirectory, thresholds: Sequence[float]) -> List[Path]:
    """Re-apply thresholds to persisted training scores, without retraining."""
    config = _load_run_config(run_dir)
    scores = run_dir.read_scores(TRAIN_SCORES_FILE)
    paths = []
    for threshold in sorted(set(thresholds)):
        report = filter_by_threshold(
            scores, threshold, model_files=run_dir.model_files(scores), seed=config.seed
        )
        paths.append(run_dir.write_report(report))
        text, _ = coverage_report(report)
        print(text)
    return paths


def _normalized_by_id(score_sets) -> Dict[str, float]:
    return {
        record_id: float(value)
        for scores in score_sets.values()
        for record_id, value in zip(scores.ids, scores.normalized)
    }


def _format_threshold(threshold: float) -> str:
    text = f"{threshold:.1f}"
    return text if float(text) == threshold else f"{threshold:g}"


def _csv_text(header: List[str], rows: List[List[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _best_thresholds(results: List[JsonDict], kinds: Sequence[str]) -> JsonDict:
    best = {}
    for kind in kinds:
        rows = [r for r in results if r["classifier"] == kind and r["result"] is not None]
        if not rows:
            continue
        # Highest weighted accuracy; ties go to the larger threshold (less data removed)
        top = max(rows, key=lambda r: (r["result"]["weighted"], r["threshold"]))
        best[kind] = {"threshold": top["threshold"], "weighted": top["result"]["weighted"]}
    return best


def cmd_eval(
    run_dir: RunDirectory,
    classifiers: Optional[Sequence[str]] = None,
    thresholds: Optional[Sequence[float]] = None,
    truth_path: Optional[Path] = None,
) -> JsonDict:
    """Train each classifier on the filtered training split and test on the full test split."""
    config = _load_run_config(run_dir)
    kinds = [k for k in CLASSIFIER_KINDS if k in (classifiers or config.classifiers)]
    thresholds = sorted(set(thresholds or config.thresholds))
    settings = config.classifier_settings()

    split = run_dir.read_json(SPLIT_FILE)
    labels = {record_id: int(label) for record_id, label in split["labels"].items()}
    vectors = run_dir.read_embeddings()
    train_scores = _normalized_by_id(run_dir.read_scores(TRAIN_SCORES_FILE))
    test_scores = _normalized_by_id(run_dir.read_scores(TEST_SCORES_FILE))

    train_ids = split["train"]
    test_ids = split["test"]
    missing = [i for i in train_ids + test_ids if i not in vectors]
    if missing:
        raise MissingArtifactError(f"Run embeddings lack {len(missing)} record(s), e.g. {missing[0]!r}")
    if not test_ids:
        raise DataError("The run has an empty test split; nothing to evaluate on")

    test_x = np.vstack([vectors[i] for i in test_ids])
    test_y = np.array([labels[i] for i in test_ids])
    test_s = np.array([test_scores[i] for i in test_ids])

    results = []
    for threshold in thresholds:
        kept = [i for i in train_ids if train_scores[i] <= threshold]
        coverage = 100.0 * len(kept) / len(train_ids)
        train_x = np.vstack([vectors[i] for i in kept]) if kept else np.zeros((0, test_x.shape[1]))
        train_y = np.array([labels[i] for i in kept], dtype=np.int64)
        for kind in kinds:
            rng = SeededRng(config.seed).derive(_EVAL_STREAM, CLASSIFIER_KINDS.index(kind))
            row = {"threshold": threshold, "classifier": kind, "coverage": coverage}
            try:
                classifier = fit_classifier(kind, train_x, train_y, settings, rng)
                result = evaluate_split(classifier, test_x, test_y, test_s, threshold)
                row.update(result=result.model_dump(), error=None)
            except (ContractError, NumericError) as e:
                logger.warning(f"{kind} at threshold {threshold:.3f} could not be fitted: {e}")
                row.update(result=None, error=str(e))
            results.append(row)

    name = config.resolved_name()
    evaluation = {
        "format_version": FORMAT_VERSION,
        "dataset": name,
        "results": results,
        "best": _best_thresholds(results, kinds),
        "baseline_threshold": 1.0,
    }
    if truth_path is not None:
        evaluation["auc"] = _truth_auc(read_truth_file(truth_path), train_scores, test_scores)
    run_dir.write_json(EVAL_FILE, evaluation)

    def cell(row, field):
        return "n/a" if row["result"] is None else format_percent(100 * row["result"][field])

    by_key = {(r["threshold"], r["classifier"]): r for r in results}
    accuracy_rows = []
    for threshold in thresholds:
        first = by_key[(threshold, kinds[0])]
        line = [name, _format_threshold(threshold), format_percent(first["coverage"])]
        for kind in kinds:
            row = by_key[(threshold, kind)]
            line += [cell(row, "weighted"), cell(row, "accuracy")]
        accuracy_rows.append(line)
    header = ["Dataset", "Threshold", "Data Coverage (%)"]
    for kind in kinds:
        header += [f"{CLASSIFIER_NAMES[kind]} Weighted", f"{CLASSIFIER_NAMES[kind]} Overall"]
    run_dir.write_text(ACCURACY_TABLE_FILE, _csv_text(header, accuracy_rows))

    run_dir.write_text(
        INLIER_OUTLIER_TABLE_FILE,
        _csv_text(
            ["Dataset", "Threshold", "Data Coverage (%)", "Classifier", "Inlier", "Outlier", "Weighted"],
            [
                [
                    name,
                    _format_threshold(r["threshold"]),
                    format_percent(r["coverage"]),
                    CLASSIFIER_NAMES[r["classifier"]],
                    cell(r, "accuracy_inlier"),
                    cell(r, "accuracy_outlier"),
                    cell(r, "weighted"),
                ]
                for r in results
            ],
        ),
    )
    return evaluation


def _truth_auc(
    truth: Dict[str, bool], train_scores: Dict[str, float], test_scores: Dict[str, float]
) -> JsonDict:
    out = {}
    for split_name, scores in (("train", train_scores), ("test", test_scores)):
        ids = [i for i in scores if i in truth]
        try:
            out[split_name] = injection_auc([scores[i] for i in ids], [truth[i] for i in ids])
        except ContractError:
            out[split_name] = None
    return out


def cmd_synth(spec: SynthSpec, out_dir: Path) -> Dict[str, Path]:
    """Write a synthetic dataset, its truth sidecar and its embeddings."""
    dataset = generate(spec)
    paths = {
        "dataset": out_dir / "dataset.jsonl",
        "truth": out_dir / "truth.jsonl",
        "embeddings": out_dir / "embeddings.jsonl",
    }
    atomic_write_text(paths["dataset"], dump_dataset_jsonl(dataset.records))
    atomic_write_text(paths["truth"], dump_truth_lines(dataset))
    atomic_write_text(paths["embeddings"], dump_embedding_lines(dataset.ids, dataset.embeddings))
    return paths


def read_points_file(path: Path):
    ids, points = [], []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataError(f"Cannot read points file {path}: {e.strerror}")
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
            points.append([float(v) for v in entry["point"]])
            ids.append(str(entry.get("id", len(ids))))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise DataError(f"{path} line {line_number}: invalid point ({e})")
    if len({len(p) for p in points}) > 1:
        raise DataError(f"{path}: points have inconsistent dimensions")
    return ids, np.array(points)


def cmd_oracle(
    points_path: Path, nu: Optional[float] = None, iterations: int = 5000, seed: int = 0
) -> JsonDict:
    """Enclosing ball of a point file and, given nu, the soft-margin solution."""
    ids, points = read_points_file(points_path)
    ball = min_enclosing_ball(points)
    output = {"ball": {"center": ball.center.tolist(), "radius": ball.radius}}
    if nu is not None:
        solution = soft_svdd(
            points, nu, iterations=iterations, rng=SeededRng(seed).derive(_ORACLE_STREAM)
        )
        output["soft"] = {
            "nu": nu,
            "center": solution.ball.center.tolist(),
            "radius": solution.ball.radius,
            "objective": solution.objective,
            "slacks": dict(zip(ids, solution.slacks.tolist())),
            "largest_slack_id": ids[int(np.argmax(solution.slacks))],
        }
    return output
