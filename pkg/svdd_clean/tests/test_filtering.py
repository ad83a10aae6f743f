import numpy as np
import pytest

from ..errors import ContractError
from ..models import ScoreSet
from ..pipeline import FilterReport, coverage_report, filter_by_threshold, format_percent


def _scores(values, prefix=""):
    ids = [f"{prefix}{i}" for i in range(len(values))]
    return ScoreSet(ids=ids, raw=np.asarray(values), normalized=np.asarray(values))


def test_threshold_one_keeps_everything():
    report = filter_by_threshold({0: _scores([0.0, 0.3, 1.0])}, 1.0)
    assert report.kept == report.total == 3
    assert format_percent(report.data_coverage) == "100.000%"


def test_threshold_splits_at_normalized_score():
    report = filter_by_threshold({0: _scores([0.1, 0.5, 0.9])}, 0.6)
    assert report.kept_ids() == ["0", "1"]
    assert report.removed_ids() == ["2"]
    assert format_percent(report.data_coverage) == "66.667%"


def test_threshold_zero_keeps_minimum_only():
    report = filter_by_threshold({0: _scores([0.0, 0.4, 1.0, 0.0])}, 0.0)
    assert report.kept_ids() == ["0", "3"]


@pytest.mark.parametrize("threshold", [-0.01, 1.01])
def test_threshold_outside_unit_interval(threshold):
    with pytest.raises(ContractError):
        filter_by_threshold({0: _scores([0.5])}, threshold)


def test_kept_sets_grow_with_threshold():
    rng = np.random.default_rng(1)
    for _ in range(200):
        score_sets = {
            label: ScoreSet(ids=[f"{label}-{i}" for i in range(n)], raw=rng.normal(size=n))
            for label, n in enumerate(rng.integers(1, 20, size=3))
        }
        low, high = sorted(rng.uniform(0, 1, size=2))
        kept_low = set(filter_by_threshold(score_sets, low).kept_ids())
        kept_high = set(filter_by_threshold(score_sets, high).kept_ids())
        assert kept_low <= kept_high
        assert filter_by_threshold(score_sets, 1.0).data_coverage == 100.0


def test_coverage_formatting_three_decimals():
    report = FilterReport(
        threshold=0.6, classes=[], total=3253 + 765, kept=2637, data_coverage=100 * 2637 / 4018
    )
    text, summary = coverage_report(report)
    assert summary["overall"]["coverage"] == "65.630%"
    assert "65.630%" in text


def test_coverage_report_per_class():
    report = filter_by_threshold(
        {0: _scores([0.0, 1.0], prefix="a"), 1: _scores([0.2, 0.3, 0.9], prefix="b")}, 1.0
    )
    text, summary = coverage_report(report)
    assert [c["coverage"] for c in summary["classes"]] == ["100.000%", "100.000%"]
    assert "label 1: kept 3/3 (100.000%)" in text
