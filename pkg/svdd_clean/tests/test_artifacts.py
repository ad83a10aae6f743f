import numpy as np
import pytest

from ..errors import DataError, MissingArtifactError
from ..models import ScoreSet
from ..pipeline import RunDirectory, filter_by_threshold, report_file_name


def test_report_file_name():
    assert report_file_name(0.6) == "report_0.600.json"
    assert report_file_name(1.0) == "report_1.000.json"


def test_scores_round_trip(tmp_path):
    run_dir = RunDirectory(tmp_path)
    scores = {
        1: ScoreSet(ids=["c", "d"], raw=np.array([0.25, 3.0])),
        0: ScoreSet(ids=["a", "b", "e"], raw=np.array([1.0, 2.0, 1.5])),
    }
    run_dir.write_scores("scores.jsonl", scores)
    loaded = run_dir.read_scores("scores.jsonl")
    assert list(loaded) == [0, 1]
    for label in scores:
        assert loaded[label].ids == scores[label].ids
        np.testing.assert_array_equal(loaded[label].raw, scores[label].raw)
        np.testing.assert_array_equal(loaded[label].normalized, scores[label].normalized)


def test_report_round_trip(tmp_path):
    run_dir = RunDirectory(tmp_path)
    report = filter_by_threshold({0: ScoreSet(ids=["a", "b"], raw=np.array([0.0, 1.0]))}, 0.4, seed=3)
    run_dir.write_report(report)
    assert run_dir.read_report(0.4) == report
    assert run_dir.report_thresholds() == [0.4]


def test_missing_and_corrupt_artifacts(tmp_path):
    run_dir = RunDirectory(tmp_path)
    with pytest.raises(MissingArtifactError):
        run_dir.read_json("split.json")
    with pytest.raises(MissingArtifactError):
        run_dir.read_embeddings()
    (tmp_path / "split.json").write_text("{")
    with pytest.raises(DataError):
        run_dir.read_json("split.json")


def test_writes_leave_no_temporary_files(tmp_path):
    run_dir = RunDirectory(tmp_path)
    run_dir.write_json("nested/value.json", {"b": 1, "a": 2})
    assert [p.name for p in (tmp_path / "nested").iterdir()] == ["value.json"]
    assert (tmp_path / "nested" / "value.json").read_text() == '{\n  "a": 2,\n  "b": 1\n}\n'
