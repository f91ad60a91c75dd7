"""Generate, repair, score and rank candidate summaries for one table.

Four stages: S1 samples N candidates from a generator; every candidate is
scored sentence-wise once. S2 repairs each candidate by dropping
unsupported sentences. S3 ranks candidates by faithfulness (ratio of
original sentences kept) with deterministic tie-breaking. S4 emits the
winner's repaired text. Each stage can be toggled for ablations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .critic import RepairResult, ScoredSummary, repair, score_summary
from .entailment import CriticConfig, EntailmentBackend
from .llm import BackendUnavailable, CompletionClient, CompletionRequest
from .segment import Summary, segment
from .tables import Table, serialize
from .entailment import load_prompt_template


class Stage(str, Enum):
    GENERATE = "S1"
    REPAIR = "S2"
    RANK = "S3"
    FILTER = "S4"


ALL_STAGES = frozenset(Stage)


class PipelineDegenerate(Exception):
    """All candidates empty after scoring."""


@dataclass(frozen=True)
class PipelineConfig:
    num_candidates: int = 10
    generation_temperature: float = 0.7
    critic: CriticConfig = field(default_factory=CriticConfig)
    stage_mask: frozenset[Stage] = ALL_STAGES
    generator_model: str = "default"
    max_tokens: int = 512

    def __post_init__(self) -> None:
        if self.num_candidates < 1:
            raise ValueError("num_candidates must be >= 1")
        if Stage.GENERATE not in self.stage_mask:
            raise ValueError("stage mask must contain S1")


@dataclass(frozen=True)
class RankedResult:
    candidates: tuple[ScoredSummary, ...]
    repairs: tuple[RepairResult, ...]
    ranking: tuple[int, ...]
    winner: int
    final_summary: Summary
    warnings: tuple[str, ...] = ()


def build_generator_prompt(table: Table, title: str) -> str:
    template = load_prompt_template("generator_3shot.txt")
    return template.format(table=serialize(table), title=title or table.title)


def generate_candidates(
    table: Table,
    title: str,
    generator: CompletionClient,
    config: PipelineConfig,
) -> tuple[list[str], list[str]]:
    """Sample N candidate summaries; returns (candidates, warnings)."""
    prompt = build_generator_prompt(table, title)
    candidates: list[str] = []
    warnings: list[str] = []
    for seed in range(config.num_candidates):
        request = CompletionRequest(
            prompt=prompt,
            temperature=config.generation_temperature,
            max_tokens=config.max_tokens,
            sample_seed=seed,
            model_id=config.generator_model,
        )
        try:
            candidates.append(generator.complete(request))
        except BackendUnavailable as exc:
            warnings.append(f"candidate {seed} failed: {exc}")
    if not candidates:
        raise BackendUnavailable("zero candidates obtainable")
    if len(candidates) < config.num_candidates:
        warnings.append(
            f"only {len(candidates)}/{config.num_candidates} candidates generated"
        )
    return candidates, warnings


def ranking_key(scored: ScoredSummary) -> tuple[float, float, int]:
    mean_score = (
        sum(scored.sentence_scores) / len(scored.sentence_scores)
        if scored.sentence_scores
        else 0.0
    )
    return (scored.faithfulness, mean_score, sum(scored.kept_mask))


def run_pipeline(
    table: Table,
    title: str,
    generator: CompletionClient,
    backend: EntailmentBackend,
    config: PipelineConfig,
) -> RankedResult:
    texts, warnings = generate_candidates(table, title, generator, config)

    # Sentence scores are computed once per candidate and shared by the
    # later stages.
    scored = tuple(
        score_summary(text, table, title, backend, config.critic) for text in texts
    )
    if all(s.empty for s in scored):
        raise PipelineDegenerate("all candidates are empty")

    repairs = tuple(repair(s) for s in scored)

    if Stage.RANK in config.stage_mask:
        order = sorted(
            range(len(scored)), key=lambda i: (ranking_key(scored[i]), -i), reverse=True
        )
    else:
        order = list(range(len(scored)))
    winner = order[0]

    if Stage.FILTER in config.stage_mask:
        final = repairs[winner].summary
    else:
        final = scored[winner].summary

    return RankedResult(
        candidates=scored,
        repairs=repairs,
        ranking=tuple(order),
        winner=winner,
        final_summary=final,
        warnings=tuple(warnings),
    )
