from .grid import CellStats, ConditionReport, NoiseSpec, run_grid
from .keywords import EXCLUDED_WORDS, KeywordScore, keyword_score, median_rate, tokenize
from .report import emit_report, format_csv, format_table

__all__ = [
    "CellStats", "ConditionReport", "EXCLUDED_WORDS", "KeywordScore", "NoiseSpec",
    "emit_report", "format_csv", "format_table", "keyword_score", "median_rate",
    "run_grid", "tokenize",
]
