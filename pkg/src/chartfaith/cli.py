"""Command-line entry points.

Subcommands: score (critic over a dataset), pipeline (full candidate
generation and ranking), metaeval (metrics against human labels) and
serve (annotation HTTP service). Exit codes: 0 ok, 2 input error,
3 backend error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .critic import repair, score_summary
from .datastore import (
    AllLinesMalformed,
    load_annotations,
    load_dataset,
)
from .entailment import CriticConfig, LlmBackend
from .llm import BackendUnavailable, ClientError, CompletionClient, StaticCompletionClient
from .metaeval import (
    LabeledScores,
    classify_metrics,
    cohens_kappa,
    pearson_with_p,
    precision_recall_curve,
    sweep_threshold,
)
from .oracle import OracleBackend
from .pipeline import PipelineConfig, Stage, run_pipeline
from .service import annotation_target, create_app
from .tables import TableSource, parse_linearized

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BACKEND = 3


def _sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def read_config_file(path: str | Path) -> dict[str, str]:
    """KEY=VALUE lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def write_manifest(path: Path, command: str, config: dict, inputs: list[str], outputs: list[str], seed: int = 0) -> None:
    digests = {p: _sha256_file(p) for p in inputs if Path(p).exists()}
    manifest = {
        "command": command,
        "config": config,
        "input_digests": digests,
        "seed": seed,
        "outputs": outputs,
        "version": __version__,
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _make_client(args) -> CompletionClient:
    cfg = read_config_file(args.config) if getattr(args, "config", None) else {}
    return CompletionClient(
        endpoint=getattr(args, "endpoint", None) or cfg.get("endpoint"),
        api_key=cfg.get("api_key"),
        cache_dir=getattr(args, "cache_dir", None) or cfg.get("cache_dir"),
        cache_only=bool(getattr(args, "cache_only", False)),
    )


def _make_backend(args):
    config = CriticConfig(
        threshold=args.threshold,
        ensemble_size=args.ensemble_size,
        sample_temperature=args.sample_temperature,
    )
    if args.backend == "oracle":
        return OracleBackend(strict=not args.permissive), config
    return LlmBackend(client=_make_client(args), config=config, model_id=args.model), config


def _scored_record(example_id: str, scored, repaired) -> dict:
    return {
        "id": example_id,
        "sentences": [s.text for s in scored.summary.sentences],
        "sentence_scores": list(scored.sentence_scores),
        "kept_mask": list(scored.kept_mask),
        "faithfulness": scored.faithfulness,
        "threshold": scored.threshold,
        "empty": scored.empty,
        "repaired_text": repaired.summary.text,
        "dropped": [asdict(d) for d in repaired.dropped],
    }


def cmd_score(args) -> int:
    try:
        dataset = load_dataset(args.input)
    except (OSError, AllLinesMalformed) as exc:
        print(f"error: cannot load dataset: {exc}", file=sys.stderr)
        return EXIT_INPUT
    backend, config = _make_backend(args)
    source = TableSource(args.table_source)
    records = []
    total = 0.0
    try:
        for example in dataset.records:
            table = parse_linearized(example.table, source=source)
            summary_text = annotation_target(example)
            scored = score_summary(summary_text, table, example.title, backend, config)
            records.append(_scored_record(example.id, scored, repair(scored)))
            total += scored.faithfulness
    except (BackendUnavailable, ClientError) as exc:
        print(f"error: backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    aggregate = {
        "aggregate": True,
        "n_examples": len(records),
        "mean_faithfulness": total / len(records) if records else 0.0,
    }
    out = Path(args.output)
    with open(out, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
        fh.write(json.dumps(aggregate, sort_keys=True) + "\n")
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "score",
        {
            "backend": args.backend,
            "table_source": args.table_source,
            "threshold": args.threshold,
            "ensemble_size": args.ensemble_size,
            "sample_temperature": args.sample_temperature,
        },
        [args.input],
        [str(out)],
    )
    print(f"scored {len(records)} examples; mean F = {aggregate['mean_faithfulness']:.4f}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    try:
        dataset = load_dataset(args.input)
    except (OSError, AllLinesMalformed) as exc:
        print(f"error: cannot load dataset: {exc}", file=sys.stderr)
        return EXIT_INPUT
    backend, critic_config = _make_backend(args)
    stages = frozenset(Stage(s) for s in args.stages.split(","))
    out = Path(args.output)
    results = []
    try:
        for example in dataset.records:
            table = parse_linearized(example.table)
            if args.generator == "fixtures":
                fixtures = list(example.candidate_summaries) or [annotation_target(example)]
                generator = StaticCompletionClient(fixtures)
                n = args.num_candidates or len(fixtures)
            else:
                generator = _make_client(args)
                n = args.num_candidates or 10
            config = PipelineConfig(
                num_candidates=n,
                generation_temperature=args.gen_temperature,
                critic=critic_config,
                stage_mask=stages,
                generator_model=args.model,
            )
            result = run_pipeline(table, example.title, generator, backend, config)
            results.append(
                {
                    "id": example.id,
                    "winner": result.winner,
                    "ranking": list(result.ranking),
                    "final_summary": result.final_summary.text,
                    "candidates": [
                        {
                            "text": c.summary.text,
                            "faithfulness": c.faithfulness,
                            "sentence_scores": list(c.sentence_scores),
                            "kept_mask": list(c.kept_mask),
                        }
                        for c in result.candidates
                    ],
                    "warnings": list(result.warnings),
                }
            )
    except (BackendUnavailable, ClientError) as exc:
        print(f"error: backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    with open(out, "w", encoding="utf-8") as fh:
        for record in results:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "pipeline",
        {
            "backend": args.backend,
            "stages": sorted(s.value for s in stages),
            "num_candidates": args.num_candidates,
            "gen_temperature": args.gen_temperature,
            "threshold": args.threshold,
        },
        [args.input],
        [str(out)],
    )
    print(f"pipeline finished on {len(results)} examples")
    return EXIT_OK


def _load_scores_and_labels(pred_path: str, label_path: str) -> LabeledScores:
    preds: dict[str, float] = {}
    with open(pred_path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            data = json.loads(line)
            if data.get("aggregate"):
                continue
            if "score" in data:
                preds[str(data["id"])] = float(data["score"])
            elif "sentence_scores" in data:
                for i, s in enumerate(data["sentence_scores"]):
                    preds[f"{data['id']}#{i}"] = float(s)
            elif "faithfulness" in data:
                preds[str(data["id"])] = float(data["faithfulness"])
    labels: dict[str, int] = {}
    try:
        for record in load_annotations(label_path):
            labels[f"{record.example_id}#{record.sentence_index}"] = int(record.entailed)
    except (KeyError, ValueError):
        labels = {}
    if not labels:
        with open(label_path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    data = json.loads(line)
                    labels[str(data["id"])] = int(data["label"])
    missing = sorted(set(preds) ^ set(labels))
    if missing:
        raise KeyError(f"id mismatch between predictions and labels: {missing[:20]}")
    ids = sorted(preds)
    return LabeledScores.of([preds[i] for i in ids], [labels[i] for i in ids], ids)


def cmd_metaeval(args) -> int:
    try:
        data = _load_scores_and_labels(args.predictions, args.annotations)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot load inputs: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {
        "n": len(data.scores),
        "classifier": asdict(classify_metrics(data, args.threshold)),
        "correlation": asdict(
            pearson_with_p(
                [1.0 if s > args.threshold else 0.0 for s in data.scores],
                [float(y) for y in data.labels],
            )
        ),
    }
    if args.sweep:
        best_threshold, sweep_report = sweep_threshold(data, list(data.labels))
        report["sweep"] = {"best_threshold": best_threshold, **asdict(sweep_report)}
    if args.pr_csv:
        with open(args.pr_csv, "w", encoding="utf-8") as fh:
            fh.write("threshold,precision,recall\n")
            for thr, precision, recall in precision_recall_curve(data):
                fh.write(f"{thr},{precision},{recall}\n")
    out = Path(args.output)
    out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "metaeval",
        {"threshold": args.threshold, "sweep": bool(args.sweep)},
        [args.predictions, args.annotations],
        [str(out)] + ([args.pr_csv] if args.pr_csv else []),
    )
    print(json.dumps(report["classifier"], sort_keys=True))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    try:
        app = create_app(
            args.dataset,
            args.output,
            overlap_fraction=args.overlap,
            static_dir=args.static_dir,
        )
    except (OSError, AllLinesMalformed) as exc:
        print(f"error: cannot load dataset: {exc}", file=sys.stderr)
        return EXIT_INPUT
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chartfaith")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_backend_flags(p):
        p.add_argument("--backend", choices=["llm", "oracle"], default="oracle")
        p.add_argument("--threshold", type=float, default=0.75)
        p.add_argument("--ensemble-size", type=int, default=8, dest="ensemble_size")
        p.add_argument(
            "--sample-temperature", type=float, default=0.3, dest="sample_temperature"
        )
        p.add_argument("--permissive", action="store_true")
        p.add_argument("--endpoint")
        p.add_argument("--cache-dir", dest="cache_dir")
        p.add_argument("--cache-only", action="store_true", dest="cache_only")
        p.add_argument("--model", default="default")
        p.add_argument("--config")

    p_score = sub.add_parser("score", help="score summaries against their tables")
    p_score.add_argument("--input", required=True)
    p_score.add_argument("--output", required=True)
    p_score.add_argument(
        "--table-source",
        choices=["gold", "derendered"],
        default="gold",
        dest="table_source",
    )
    add_backend_flags(p_score)
    p_score.set_defaults(func=cmd_score)

    p_pipe = sub.add_parser("pipeline", help="generate, repair, rank and select")
    p_pipe.add_argument("--input", required=True)
    p_pipe.add_argument("--output", required=True)
    p_pipe.add_argument("--num-candidates", type=int, default=0, dest="num_candidates")
    p_pipe.add_argument(
        "--gen-temperature", type=float, default=0.7, dest="gen_temperature"
    )
    p_pipe.add_argument("--stages", default="S1,S2,S3,S4")
    p_pipe.add_argument("--generator", choices=["llm", "fixtures"], default="fixtures")
    add_backend_flags(p_pipe)
    p_pipe.set_defaults(func=cmd_pipeline)

    p_meta = sub.add_parser("metaeval", help="metrics against human labels")
    p_meta.add_argument("--predictions", required=True)
    p_meta.add_argument("--annotations", required=True)
    p_meta.add_argument("--output", required=True)
    p_meta.add_argument("--threshold", type=float, default=0.75)
    p_meta.add_argument("--sweep", action="store_true")
    p_meta.add_argument("--pr-csv", dest="pr_csv")
    p_meta.set_defaults(func=cmd_metaeval)

    p_serve = sub.add_parser("serve", help="run the annotation service")
    p_serve.add_argument("--dataset", required=True)
    p_serve.add_argument("--output", required=True)
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--overlap", type=float, default=0.0)
    p_serve.add_argument("--static-dir", dest="static_dir")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
