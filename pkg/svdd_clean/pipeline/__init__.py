from .artifacts import RunDirectory, atomic_write_text, report_file_name
from .autofilter import AutoFilter, filter_data
from .filtering import (
    ClassFilter,
    FilterReport,
    coverage_report,
    filter_by_threshold,
    format_percent,
)
from .fitting import ClassFit, FitConfig, fit_class, fit_per_class, score_records
