"""Command-line entry point for the whole pipeline:

    librec ingest    --root src/ --out corpus.jsonl
    librec train     --corpus corpus.jsonl --out model/
    librec index     --catalog catalog.jsonl --out model/
    librec recommend --model model/ --file script.py
    librec project   --model model/ --neighbors "numpy:12,pandas:3"
    librec evaluate  --model model/ --corpus corpus.jsonl --protocol loo
    librec serve     --model model/ --addr 127.0.0.1:8080
    librec feedback-report --log feedback.jsonl

Every randomized subcommand takes --seed and is deterministic under it.
JSON-lines files are the interchange format between stages.
"""
from __future__ import annotations

import argparse
import json
import sys
from functools import partial
from pathlib import Path

from . import altrec, corpus, evaluation, model_store, service
from .complement import recommend_complementary
from .cooccur import build_pair_stats, build_vocabulary
from .embed import ProjectionRequest, TrainConfig, project_out_of_sample, train
from .errors import LibrecError


def _cmd_ingest(args) -> int:
    loaded = corpus.load_corpus(args.root, include_notebooks=args.notebooks)
    corpus.write_records(loaded, args.out)
    print(f"wrote {len(loaded.records)} import records to {args.out} "
          f"({loaded.n_warnings} files skipped)")
    return 0


def _cmd_train(args) -> int:
    loaded = corpus.read_records(args.corpus)
    stop_list = set(args.stop_list.split(",")) if args.stop_list else set()
    vocab = build_vocabulary(loaded, min_count=args.min_count, stop_list=stop_list)
    stats = build_pair_stats(loaded, vocab)
    config = TrainConfig(dim=args.dim, epochs=args.epochs,
                         learning_rate=args.lr, lr_schedule=args.lr_schedule,
                         negatives_per_positive=args.negatives, seed=args.seed)
    model = train(stats, vocab, config)
    bundle = model_store.ModelBundle(vocab=vocab, model=model)
    model_store.save_bundle(bundle, args.out)
    print(f"trained {len(vocab)} packages at dim {args.dim} "
          f"({stats.total_pairs} positive pair occurrences) -> {args.out}")
    print(f"epoch losses: {' '.join(f'{x:.4f}' for x in model.epoch_losses)}")
    return 0


def _cmd_index(args) -> int:
    bundle = model_store.load_bundle(args.out)
    catalog = altrec.load_catalog(args.catalog)
    bundle.catalog = catalog
    bundle.index = altrec.build_index(catalog)
    model_store.save_bundle(bundle, args.out)
    print(f"indexed {len(bundle.index.doc_vectors)} descriptions -> {args.out}")
    return 0


def _read_source(path: Path) -> str:
    text = path.read_text(encoding="utf-8", errors="replace")
    if path.suffix == ".ipynb":
        return corpus.notebook_code_text(text)
    return text


def _summarizer(args):
    if getattr(args, "summarizer", None):
        return partial(altrec.summarize_remote, endpoint=args.summarizer, fallback=True)
    return None


def _cmd_recommend(args) -> int:
    bundle = model_store.load_bundle(args.model)
    code = _read_source(Path(args.file))
    imports = corpus.extract_imports(code)
    result = {"imports_detected": sorted(imports)}

    if args.kind in ("complementary", "both"):
        result["complementary"] = [
            {"rank": r.rank, "package": r.package, "score": r.score}
            for r in recommend_complementary(imports, bundle.model, args.k)
        ]
    if args.kind in ("alternative", "both"):
        if bundle.index is None:
            raise LibrecError("model has no description index; run `librec index` first")
        recs = altrec.recommend_alternative(code, bundle.index,
                                            summarizer=_summarizer(args), k=args.k)
        if args.filter_imported:
            recs = [r for r in recs if not r.already_imported][:args.k]
            for rank, rec in enumerate(recs, start=1):
                rec.rank = rank
        result["alternative"] = [
            {"rank": r.rank, "package": r.package, "score": r.score,
             "already_imported": r.already_imported}
            for r in recs
        ]

    if args.json:
        print(json.dumps(result, sort_keys=True, indent=2))
    else:
        print(f"imports: {', '.join(result['imports_detected']) or '(none)'}")
        for kind in ("complementary", "alternative"):
            if kind in result:
                print(f"\n{kind}:")
                print(f"  {'rank':<5} {'package':<24} score")
                for rec in result[kind]:
                    print(f"  {rec['rank']:<5} {rec['package']:<24} {rec['score']:.4f}")
    return 0


def _parse_neighbors(spec: str) -> list[tuple[str, int]]:
    neighbors = []
    for piece in spec.split(","):
        piece = piece.strip()
        if not piece:
            continue
        name, _, count = piece.partition(":")
        if not count:
            raise LibrecError(f"neighbor {piece!r} is not of the form name:count")
        neighbors.append((name.strip(), int(count)))
    return neighbors


def _cmd_project(args) -> int:
    bundle = model_store.load_bundle(args.model)
    request = ProjectionRequest(neighbors=_parse_neighbors(args.neighbors))
    vector = project_out_of_sample(request, bundle.model)
    print(json.dumps([float(x) for x in vector]))
    return 0


def _cmd_evaluate(args) -> int:
    bundle = model_store.load_bundle(args.model)
    if args.protocol == "loo":
        loaded = corpus.read_records(args.corpus)
        cfg = evaluation.EvalConfig(ks=sorted(int(k) for k in args.ks.split(",")),
                                    seed=args.seed, min_imports=args.min_imports)
        report = evaluation.eval_complementary_leave_one_out(loaded, bundle.model, cfg)
    elif args.protocol == "soft":
        if bundle.index is None:
            raise LibrecError("soft-label evaluation needs a description index")
        if not args.root:
            raise LibrecError("soft-label evaluation needs --root with source files")
        units = list(corpus.iter_source_units(args.root, include_notebooks=args.notebooks))
        report = evaluation.eval_alternative_soft(units, bundle.index,
                                                  summarizer=_summarizer(args),
                                                  k=args.k, k_truth=args.k_truth)
    else:
        if bundle.index is None:
            raise LibrecError("hard-label evaluation needs a description index")
        if not args.labels:
            raise LibrecError("hard-label evaluation needs --labels")
        labels = evaluation.load_hard_labels(args.labels)
        report = evaluation.eval_alternative_hard(labels, bundle.index,
                                                  summarizer=_summarizer(args),
                                                  k=args.k, root=args.root or None)
    print(report.to_json())
    if args.text:
        print(report.to_text(), file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    bundle = model_store.load_bundle(args.model)
    host, _, port = args.addr.rpartition(":")
    app = service.create_app(
        bundle,
        feedback_log=args.feedback_log,
        summarizer_url=args.summarizer or None,
        summarizer_fallback=not args.no_summarizer_fallback,
        cors_origins=tuple(args.cors_origin),
        latency_budget_s=args.latency_budget,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def _cmd_feedback_report(args) -> int:
    summary = service.summarize_feedback_log(args.log)
    if args.json:
        print(json.dumps(summary, sort_keys=True, indent=2))
    else:
        print(f"{'verdict':<24} {'count':>6} {'share':>7}")
        for verdict in service.VERDICTS:
            print(f"{verdict:<24} {summary['counts'][verdict]:>6} "
                  f"{summary['shares'][verdict]:>6.1%}")
        print(f"{'total':<24} {summary['total']:>6}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="librec",
                                     description="library package recommendation engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="scan sources into an import-record corpus")
    p.add_argument("--root", required=True)
    p.add_argument("--notebooks", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("train", help="train co-occurrence embeddings")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--lr-schedule", choices=["constant", "linear_decay"],
                   default="linear_decay")
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--stop-list", default="",
                   help="comma-separated package names to exclude")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("index", help="add a TF-IDF description index to a model")
    p.add_argument("--catalog", required=True)
    p.add_argument("--out", required=True, help="existing model directory")
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("recommend", help="recommend packages for a source file")
    p.add_argument("--model", required=True)
    p.add_argument("--file", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--kind", choices=["complementary", "alternative", "both"],
                   default="both")
    p.add_argument("--json", action="store_true")
    p.add_argument("--filter-imported", action="store_true",
                   help="drop alternatives the file already imports")
    p.add_argument("--summarizer", default="", help="remote summarizer base URL")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("project", help="out-of-sample embedding from neighbors")
    p.add_argument("--model", required=True)
    p.add_argument("--neighbors", required=True, help='e.g. "numpy:12,pandas:3"')
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("evaluate", help="run an evaluation protocol")
    p.add_argument("--model", required=True)
    p.add_argument("--protocol", choices=["loo", "soft", "hard"], required=True)
    p.add_argument("--corpus", default="", help="corpus.jsonl (loo)")
    p.add_argument("--root", default="", help="source root (soft) / label base (hard)")
    p.add_argument("--labels", default="", help="hard-label jsonl (hard)")
    p.add_argument("--notebooks", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ks", default="5,10")
    p.add_argument("--min-imports", type=int, default=2)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--k-truth", type=int, default=5)
    p.add_argument("--summarizer", default="")
    p.add_argument("--text", action="store_true", help="also print a table to stderr")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("serve", help="run the recommendation HTTP service")
    p.add_argument("--model", required=True)
    p.add_argument("--addr", default="127.0.0.1:8080")
    p.add_argument("--summarizer", default="")
    p.add_argument("--feedback-log", default="feedback.jsonl")
    p.add_argument("--no-summarizer-fallback", action="store_true")
    p.add_argument("--cors-origin", action="append", default=["*"])
    p.add_argument("--latency-budget", type=float, default=2.0)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("feedback-report", help="aggregate a feedback log")
    p.add_argument("--log", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_feedback_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LibrecError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
