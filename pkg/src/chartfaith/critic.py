"""Summary-level faithfulness: score sentence by sentence, keep the ones
above the threshold, and report the ratio kept.

A sentence is kept iff its score strictly exceeds the threshold; the
summary score is the fraction of kept sentences. Repair deletes the
dropped sentences and records their provenance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .entailment import CriticConfig, EntailmentBackend
from .segment import Sentence, Summary, segment
from .tables import Table


@dataclass(frozen=True)
class DroppedSentence:
    index: int
    text: str
    score: float


@dataclass(frozen=True)
class ScoredSummary:
    summary: Summary
    sentence_scores: tuple[float, ...]
    kept_mask: tuple[bool, ...]
    faithfulness: float
    threshold: float
    empty: bool = False

    def __post_init__(self) -> None:
        n = len(self.summary.sentences)
        if not (len(self.sentence_scores) == len(self.kept_mask) == n):
            raise ValueError("scores and mask must align with sentences")


def faithfulness_ratio(scores: list[float] | tuple[float, ...], threshold: float) -> float:
    """Fraction of scores strictly above the threshold; 0.0 for empty input."""
    if not scores:
        return 0.0
    return sum(1 for s in scores if s > threshold) / len(scores)


def score_summary(
    summary_text: str,
    table: Table,
    title: str,
    backend: EntailmentBackend,
    config: CriticConfig,
) -> ScoredSummary:
    summary = segment(summary_text)
    scores = tuple(
        backend.score(sentence, table, title) for sentence in summary.sentences
    )
    kept = tuple(s > config.threshold for s in scores)
    return ScoredSummary(
        summary=summary,
        sentence_scores=scores,
        kept_mask=kept,
        faithfulness=faithfulness_ratio(scores, config.threshold),
        threshold=config.threshold,
        empty=len(summary.sentences) == 0,
    )


@dataclass(frozen=True)
class RepairResult:
    summary: Summary
    dropped: tuple[DroppedSentence, ...]


def repair(scored: ScoredSummary) -> RepairResult:
    """Keep only sentences above the threshold, joined with single spaces."""
    kept_texts: list[str] = []
    dropped: list[DroppedSentence] = []
    for sentence, score, keep in zip(
        scored.summary.sentences, scored.sentence_scores, scored.kept_mask
    ):
        if keep:
            kept_texts.append(sentence.text)
        else:
            dropped.append(DroppedSentence(sentence.index, sentence.text, score))
    return RepairResult(
        summary=segment(" ".join(kept_texts)), dropped=tuple(dropped)
    )
