import random

import pytest

from chartfaith.entailment import CriticConfig
from chartfaith.llm import StaticCompletionClient
from chartfaith.oracle import OracleBackend
from chartfaith.pipeline import (
    ALL_STAGES,
    PipelineConfig,
    PipelineDegenerate,
    Stage,
    generate_candidates,
    ranking_key,
    run_pipeline,
)
from chartfaith.tables import parse_linearized

from synth import candidate_text, make_example


TABLE = parse_linearized("title | T\na | b\nx | 1")


class PresetBackend:
    """Scores sentences by exact text lookup."""

    deterministic = True
    supports_rationale = False

    def __init__(self, scores_by_text):
        self.scores_by_text = scores_by_text

    def score(self, sentence, table, title):
        return self.scores_by_text[sentence.text]


def _config(n, stages=ALL_STAGES, threshold=0.75):
    return PipelineConfig(
        num_candidates=n,
        critic=CriticConfig(threshold=threshold),
        stage_mask=frozenset(stages),
    )


def test_generate_candidate_count():
    generator = StaticCompletionClient([f"Candidate {i} text." for i in range(10)])
    texts, warnings = generate_candidates(TABLE, "", generator, _config(10))
    assert len(texts) == 10
    assert warnings == []


def test_generate_deterministic_stub():
    generator = StaticCompletionClient(["Only candidate."])
    a, _ = generate_candidates(TABLE, "", generator, _config(1))
    b, _ = generate_candidates(TABLE, "", generator, _config(1))
    assert a == b == ["Only candidate."]


def test_generate_fixture_order():
    fixtures = ["First fix.", "Second fix.", "Third fix."]
    generator = StaticCompletionClient(fixtures)
    texts, _ = generate_candidates(TABLE, "", generator, _config(3))
    assert texts == fixtures


def test_winner_argmax():
    texts = {
        "Low one.": 0.2,
        "Perfect one.": 1.0,
        "Low again.": 0.2,
        "Mid one.": 1.0,
        "Mid two.": 0.2,
    }
    # candidate 0: F=0.5 (one kept of two); candidate 1: F=1.0; candidate 2: F=0.75-ish
    candidates = [
        "Low one. Perfect one.",
        "Perfect one. Mid one.",
        "Perfect one. Mid two.",
    ]
    generator = StaticCompletionClient(candidates)
    backend = PresetBackend(texts)
    result = run_pipeline(TABLE, "", generator, backend, _config(3))
    assert result.winner == 1
    assert result.ranking[0] == 1
    assert result.final_summary.text == "Perfect one. Mid one."


def test_tie_break_mean_score():
    texts = {"A strong.": 0.9, "B strong.": 1.0}
    generator = StaticCompletionClient(["A strong.", "B strong."])
    backend = PresetBackend(texts)
    result = run_pipeline(TABLE, "", generator, backend, _config(2))
    # both F = 1.0; mean scores 0.9 vs 1.0 -> candidate 1 wins
    assert result.winner == 1


def test_tie_break_lowest_index():
    texts = {"Same one.": 1.0, "Same two.": 1.0}
    generator = StaticCompletionClient(["Same one.", "Same two."])
    backend = PresetBackend(texts)
    result = run_pipeline(TABLE, "", generator, backend, _config(2))
    assert result.winner == 0


def test_rank_disabled_selects_first():
    texts = {"Bad cand.": 0.0, "Good cand.": 1.0}
    generator = StaticCompletionClient(["Bad cand.", "Good cand."])
    backend = PresetBackend(texts)
    result = run_pipeline(
        TABLE, "", generator, backend,
        _config(2, stages={Stage.GENERATE, Stage.REPAIR, Stage.FILTER}),
    )
    assert result.winner == 0
    assert result.final_summary.text == ""  # bad candidate fully repaired away


def test_filter_disabled_keeps_original_text():
    texts = {"Bad cand.": 0.0, "Good cand.": 1.0}
    generator = StaticCompletionClient(["Bad cand. Good cand."])
    backend = PresetBackend(texts)
    result = run_pipeline(
        TABLE, "", generator, backend,
        _config(1, stages={Stage.GENERATE, Stage.REPAIR, Stage.RANK}),
    )
    assert result.final_summary.text == "Bad cand. Good cand."


def test_stage_mask_requires_s1():
    with pytest.raises(ValueError):
        PipelineConfig(stage_mask=frozenset({Stage.REPAIR}))


def test_degenerate_all_empty():
    generator = StaticCompletionClient(["   ", " \n "])
    backend = PresetBackend({})
    with pytest.raises(PipelineDegenerate):
        run_pipeline(TABLE, "", generator, backend, _config(2))


def test_winner_maximality_and_determinism():
    rng = random.Random(17)
    backend = OracleBackend()
    for _ in range(10):
        example = make_example(rng, n_candidates=5)
        fixtures = [candidate_text(c) for c in example.candidates]
        generator = StaticCompletionClient(fixtures)
        config = _config(5)
        result = run_pipeline(example.table, example.title, generator, backend, config)
        again = run_pipeline(example.table, example.title, generator, backend, config)
        assert result == again
        winner_key = ranking_key(result.candidates[result.winner])
        for candidate in result.candidates:
            assert winner_key >= ranking_key(candidate)


def test_final_output_oracle_clean():
    # planted false claims never survive the full pipeline
    rng = random.Random(31)
    backend = OracleBackend()
    config = _config(4)
    for _ in range(15):
        example = make_example(rng, n_candidates=4)
        fixtures = [candidate_text(c) for c in example.candidates]
        generator = StaticCompletionClient(fixtures)
        result = run_pipeline(example.table, example.title, generator, backend, config)
        for sentence in result.final_summary.sentences:
            assert backend.score(sentence, example.table, example.title) == 1.0
