"""Sentence-vs-table entailment scoring.

A backend maps (sentence, table) to a faithfulness score in [0, 1]. The
LLM backend prompts a completion endpoint with a 2-shot chain-of-thought
template and averages K binary verdicts; the rule-based oracle backend
lives in chartfaith.oracle.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from typing import Protocol

from .llm import CompletionClient, CompletionRequest, BackendUnavailable
from .segment import Sentence
from .tables import Table, serialize


@dataclass(frozen=True)
class CriticConfig:
    threshold: float = 0.75
    ensemble_size: int = 8
    sample_temperature: float = 0.3

    def __post_init__(self) -> None:
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must be in (0, 1)")
        if self.ensemble_size < 1:
            raise ValueError("ensemble_size must be >= 1")
        if self.sample_temperature < 0:
            raise ValueError("sample_temperature must be >= 0")


@dataclass(frozen=True)
class Verdict:
    entailed: bool
    rationale: str = ""
    sample_index: int = 0
    unparseable: bool = False


class EntailmentBackend(Protocol):
    deterministic: bool
    supports_rationale: bool

    def score(self, sentence: Sentence, table: Table, title: str) -> float: ...


_YES_WORDS = {"yes", "entailed", "supported", "true"}
_NO_WORDS = {"no", "refuted", "unsupported", "false", "not entailed"}


def parse_verdict(completion_text: str, sample_index: int = 0) -> Verdict:
    """Extract a binary verdict from a critic completion.

    Looks for a final case-insensitive "answer: yes/no" marker, or a
    trailing standalone "entailed"/"refuted". Text before the marker is
    kept as the rationale. No marker means refuted, flagged unparseable.
    """
    text = completion_text.strip()
    lowered = text.lower()
    marker = lowered.rfind("answer:")
    if marker >= 0:
        tail = lowered[marker + len("answer:") :].strip()
        word = tail.split()[0].strip(".,!;:") if tail.split() else ""
        rationale = text[:marker].strip()
        if word in _YES_WORDS:
            return Verdict(True, rationale, sample_index)
        if word in _NO_WORDS:
            return Verdict(False, rationale, sample_index)
        return Verdict(False, rationale, sample_index, unparseable=True)
    last_word = lowered.split()[-1].strip(".!,") if lowered.split() else ""
    if last_word in {"entailed", "supported"}:
        return Verdict(True, text, sample_index)
    if last_word in {"refuted", "unsupported"}:
        return Verdict(False, text, sample_index)
    return Verdict(
        False,
        rationale=text + ("\n" if text else "") + "[unparseable completion]",
        sample_index=sample_index,
        unparseable=True,
    )


def load_prompt_template(name: str) -> str:
    return (
        importlib.resources.files("chartfaith.prompts")
        .joinpath(name)
        .read_text(encoding="utf-8")
    )


def build_critic_prompt(sentence_text: str, table: Table, title: str) -> str:
    template = load_prompt_template("critic_2shot.txt")
    return template.format(
        table=serialize(table), title=title or table.title, claim=sentence_text
    )


def llm_score(
    sentence: Sentence,
    table: Table,
    title: str,
    config: CriticConfig,
    client: CompletionClient,
    model_id: str = "default",
) -> tuple[float, list[Verdict]]:
    """Ensemble-score one sentence: K sampled completions, binary votes averaged."""
    prompt = build_critic_prompt(sentence.text, table, title)
    verdicts: list[Verdict] = []
    failures = 0
    for k in range(config.ensemble_size):
        request = CompletionRequest(
            prompt=prompt,
            temperature=config.sample_temperature,
            max_tokens=512,
            sample_seed=k,
            model_id=model_id,
        )
        try:
            completion = client.complete(request)
        except BackendUnavailable:
            failures += 1
            continue
        verdicts.append(parse_verdict(completion, sample_index=len(verdicts)))
    if not verdicts:
        raise BackendUnavailable(
            f"all {config.ensemble_size} critic calls failed ({failures} errors)"
        )
    score = sum(1 for v in verdicts if v.entailed) / len(verdicts)
    return score, verdicts


@dataclass
class LlmBackend:
    """EntailmentBackend adapter around llm_score."""

    client: CompletionClient
    config: CriticConfig = field(default_factory=CriticConfig)
    model_id: str = "default"
    deterministic: bool = False
    supports_rationale: bool = True
    last_verdicts: list[Verdict] = field(default_factory=list)

    def score(self, sentence: Sentence, table: Table, title: str) -> float:
        value, verdicts = llm_score(
            sentence, table, title, self.config, self.client, self.model_id
        )
        self.last_verdicts = verdicts
        return value
