"""Faithfulness scoring and candidate ranking for chart summaries."""

__version__ = "0.1.0"

from .critic import ScoredSummary, RepairResult, repair, score_summary
from .entailment import CriticConfig, Verdict, llm_score, parse_verdict
from .oracle import OracleBackend
from .pipeline import PipelineConfig, RankedResult, Stage, run_pipeline
from .segment import Sentence, Summary, segment
from .tables import Cell, Table, normalize_number, parse_linearized, serialize

__all__ = [
    "Cell",
    "CriticConfig",
    "OracleBackend",
    "PipelineConfig",
    "RankedResult",
    "RepairResult",
    "ScoredSummary",
    "Sentence",
    "Stage",
    "Summary",
    "Table",
    "Verdict",
    "llm_score",
    "normalize_number",
    "parse_linearized",
    "parse_verdict",
    "repair",
    "run_pipeline",
    "score_summary",
    "segment",
    "serialize",
]
