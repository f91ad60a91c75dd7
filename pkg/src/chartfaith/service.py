"""HTTP service backing the annotation frontend.

Serves tasks to raters, accepts per-sentence ratings, reports progress
and inter-rater agreement, and exposes the raw annotation export. The
dataset is read-only; ratings are append-only JSONL.
"""

from __future__ import annotations

import math
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .datastore import (
    AnnotationRecord,
    DuplicateRating,
    ExampleRecord,
    append_annotation,
    load_annotations,
    load_dataset,
)
from .metaeval import cohens_kappa
from .segment import segment


class RatingIn(BaseModel):
    example_id: str
    sentence_index: int
    rater_id: str
    entailed: bool
    relevant: bool
    grammatical: bool


def annotation_target(example: ExampleRecord) -> str:
    """The summary text a rater judges: the reference if present, else the
    first candidate."""
    if example.reference_summary:
        return example.reference_summary
    if example.candidate_summaries:
        return example.candidate_summaries[0]
    return ""


def create_app(
    dataset_path: str | Path,
    output_path: str | Path,
    overlap_fraction: float = 0.0,
    static_dir: Optional[str | Path] = None,
) -> FastAPI:
    examples = load_dataset(dataset_path).records
    by_id = {ex.id: ex for ex in examples}
    n_overlap = math.ceil(overlap_fraction * len(examples))
    output_path = Path(output_path)

    app = FastAPI(title="chart summary annotation service")

    def sentence_texts(example: ExampleRecord) -> list[str]:
        return [s.text for s in segment(annotation_target(example)).sentences]

    def ratings() -> list[AnnotationRecord]:
        return load_annotations(output_path)

    @app.get("/api/tasks/next")
    def next_task(rater: str = Query(...)):
        rated = ratings()
        for idx, example in enumerate(examples):
            sentences = sentence_texts(example)
            if not sentences:
                continue
            mine = {
                r.sentence_index
                for r in rated
                if r.example_id == example.id and r.rater_id == rater
            }
            if len(mine) >= len(sentences):
                continue
            others = {
                r.rater_id
                for r in rated
                if r.example_id == example.id and r.rater_id != rater
            }
            # One rater per example by default; the overlap prefix is open
            # to everyone so agreement can be measured.
            if others and idx >= n_overlap:
                continue
            return {
                "example_id": example.id,
                "title": example.title,
                "table": example.table,
                "image_url": example.image_url,
                "sentences": sentences,
                "rated_indices": sorted(mine),
            }
        raise HTTPException(status_code=404, detail="no tasks remaining")

    @app.post("/api/ratings", status_code=201)
    def post_rating(rating: RatingIn):
        example = by_id.get(rating.example_id)
        if example is None:
            raise HTTPException(status_code=400, detail="unknown example_id")
        sentences = sentence_texts(example)
        if not 0 <= rating.sentence_index < len(sentences):
            raise HTTPException(status_code=400, detail="sentence_index out of range")
        record = AnnotationRecord(
            example_id=rating.example_id,
            sentence_index=rating.sentence_index,
            rater_id=rating.rater_id,
            entailed=rating.entailed,
            relevant=rating.relevant,
            grammatical=rating.grammatical,
            timestamp=time.time(),
        )
        try:
            append_annotation(record, output_path)
        except DuplicateRating as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"status": "recorded"}

    @app.get("/api/progress")
    def progress(rater: Optional[str] = None):
        rated = ratings()
        total_sentences = sum(len(sentence_texts(ex)) for ex in examples)
        per_rater: dict[str, int] = {}
        for r in rated:
            per_rater[r.rater_id] = per_rater.get(r.rater_id, 0) + 1
        if rater is not None:
            return {
                "rater": rater,
                "rated": per_rater.get(rater, 0),
                "total": total_sentences,
            }
        return {"total": total_sentences, "per_rater": per_rater}

    @app.get("/api/export", response_class=PlainTextResponse)
    def export():
        if not output_path.exists():
            return ""
        return output_path.read_text(encoding="utf-8")

    @app.get("/api/agreement")
    def agreement():
        rated = ratings()
        by_item: dict[tuple[str, int], dict[str, AnnotationRecord]] = {}
        for r in rated:
            by_item.setdefault((r.example_id, r.sentence_index), {})[r.rater_id] = r
        pairs_a: list[AnnotationRecord] = []
        pairs_b: list[AnnotationRecord] = []
        for item_ratings in by_item.values():
            if len(item_ratings) >= 2:
                raters = sorted(item_ratings)
                pairs_a.append(item_ratings[raters[0]])
                pairs_b.append(item_ratings[raters[1]])
        if not pairs_a:
            return {"n": 0, "kappa": None}
        out = {"n": len(pairs_a)}
        for axis in ("entailed", "relevant", "grammatical"):
            a = [getattr(r, axis) for r in pairs_a]
            b = [getattr(r, axis) for r in pairs_b]
            kappa = cohens_kappa(a, b)
            out[f"kappa_{axis}"] = None if math.isnan(kappa) else kappa
        out["kappa"] = out["kappa_entailed"]
        return out

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
