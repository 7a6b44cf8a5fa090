"""Command-line front end.

Subcommands mirror the pipeline stages: ingest, validate, snapshot, topics,
graph, featurize, train-hindex, train-impact, experiment, jackknife, igr,
correlate, stats, serve. Expensive artifacts (corpus cache, topic model and
its companions, pagerank) land in the output directory and are reused when
their configuration matches; every artifact embeds the config and seed that
produced it, and writes are atomic (temp file, then rename).

Exit codes: 0 success, 1 pipeline error (last stderr line is
``error: <kind>: <message>``), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import collabnet, corpus, evalkit, factorlab, learners, pipeline, scholarmetrics, topicmodel
from .errors import SciImpactError

CACHE_DIR_ENV = "SCIIMPACT_CACHE_DIR"


# ---------------------------------------------------------------------------
# small file helpers


def _write_atomic(path: str, data) -> None:
    tmp = f"{path}.tmp"
    if isinstance(data, bytes):
        with open(tmp, "wb") as fh:
            fh.write(data)
    else:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(data)
    os.replace(tmp, path)


def _write_json(path: str, obj) -> None:
    _write_atomic(path, json.dumps(obj, sort_keys=True, indent=1) + "\n")


def _update_manifest(out_dir: str, *paths: str) -> None:
    manifest_path = os.path.join(out_dir, "manifest.json")
    manifest = {}
    if os.path.exists(manifest_path):
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    for p in paths:
        manifest[os.path.basename(p)] = pipeline.file_version(p)
    _write_json(manifest_path, manifest)


def _out_dir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _cache_dir(args) -> str:
    cache = getattr(args, "cache_dir", None) or os.environ.get(CACHE_DIR_ENV) or args.out
    os.makedirs(cache, exist_ok=True)
    return cache


# ---------------------------------------------------------------------------
# artifact builders (load-if-config-matches, else build and persist)


def _load_store(args):
    cache = os.path.join(_cache_dir(args), os.path.basename(args.corpus) + ".cache")
    return pipeline.corpus_from_path(args.corpus, cache_path=cache)


def _topic_stem(args) -> str:
    joint = "_joint" if getattr(args, "joint", False) else ""
    return f"topics_t{args.t}_k{args.k}_i{args.iters}_s{args.seed}{joint}"


def _get_context(args, store, out_dir: str) -> factorlab.FactorContext:
    """Load the year-t artifact set if it is on disk, else build and persist it."""
    stem = os.path.join(out_dir, _topic_stem(args))
    model_path = stem + ".bin"
    companions = [stem + ".doctopics.tbl", stem + ".popularity.npy", stem + ".authority.tbl"]
    pagerank_path = os.path.join(out_dir, f"pagerank_t{args.t}.json")

    snapshot = corpus.build_snapshot(store, args.t, warn_empty=False)
    snapshot_past = corpus.build_snapshot(store, args.t - 3, warn_empty=False)
    graph = collabnet.build_collab_graph(snapshot)

    if os.path.exists(model_path) and all(os.path.exists(p) for p in companions):
        model = topicmodel.load_topic_model(model_path)
        doc_topics = pipeline.load_doc_topics(companions[0])
        popularity = np.load(companions[1])
        authority = pipeline.load_authority(companions[2])
    else:
        ctx = pipeline.build_context(
            store,
            t=args.t,
            k=args.k,
            iterations=args.iters,
            seed=args.seed,
            joint=getattr(args, "joint", False),
        )
        model, doc_topics = ctx.model, ctx.doc_topics
        popularity, authority = ctx.popularity, ctx.authority
        tmp = model_path + ".tmp"
        topicmodel.save_topic_model(model, tmp)
        os.replace(tmp, model_path)
        pipeline.save_doc_topics(doc_topics, companions[0] + ".tmp")
        os.replace(companions[0] + ".tmp", companions[0])
        with open(companions[1] + ".tmp", "wb") as fh:
            np.save(fh, popularity)
        os.replace(companions[1] + ".tmp", companions[1])
        pipeline.save_authority(authority, companions[2] + ".tmp")
        os.replace(companions[2] + ".tmp", companions[2])
        _update_manifest(out_dir, model_path, *companions)

    if os.path.exists(pagerank_path):
        with open(pagerank_path, "r", encoding="utf-8") as fh:
            pagerank_scores = {k: float(v) for k, v in json.load(fh).items()}
    else:
        pagerank_scores = collabnet.pagerank(graph)
        _write_json(pagerank_path, pagerank_scores)
        _update_manifest(out_dir, pagerank_path)

    return factorlab.FactorContext(
        snapshot=snapshot,
        snapshot_past=snapshot_past,
        model=model,
        doc_topics=doc_topics,
        popularity=popularity,
        authority=authority,
        graph=graph,
        pagerank_scores=pagerank_scores,
    )


def _dataset_spec(args) -> factorlab.DatasetSpec:
    return factorlab.DatasetSpec(
        t=args.t,
        delta_t=args.dt,
        mode={"max": "max-h", "first": "first"}[args.mode],
        set_name=args.set,
        min_h=args.min_h,
    )


def _dataset_path(out_dir: str, spec: factorlab.DatasetSpec) -> str:
    name = f"dataset_{spec.set_name}_{spec.mode}_t{spec.t}_dt{spec.delta_t}_minh{spec.min_h}.tsv"
    return os.path.join(out_dir, name)


def _get_dataset(args, store, out_dir: str):
    spec = _dataset_spec(args)
    path = _dataset_path(out_dir, spec)
    if os.path.exists(path):
        return spec, factorlab.load_dataset(path)
    ctx = _get_context(args, store, out_dir)
    examples = pipeline.featurize_dataset(store, spec, ctx, workers=args.workers)
    tmp = path + ".tmp"
    factorlab.save_dataset(examples, tmp)
    os.replace(tmp, path)
    _update_manifest(out_dir, path)
    return spec, examples


def _echo(args, **extra) -> dict:
    """Logical run configuration embedded in every report.

    Filesystem locations are excluded so the same experiment writes the same
    bytes no matter where its artifacts live; the corpus is identified by
    checksum instead (callers pass it via ``extra``).
    """
    skip = {"func", "corpus", "out", "cache_dir", "static", "bind", "workers"}
    config = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    config.update(extra)
    return config


# ---------------------------------------------------------------------------
# subcommand implementations


def cmd_ingest(args) -> int:
    out = _out_dir(args)
    store, checksum = _load_store(args)
    report = corpus.validate_corpus(store)
    _write_json(os.path.join(out, "validation.json"), {"checksum": checksum, **report.to_dict()})
    _write_atomic(os.path.join(out, "validation.txt"), report.to_text() + "\n")
    _update_manifest(out, os.path.join(out, "validation.json"))
    print(f"ingested {report.n_papers} papers, {report.n_authors} authors "
          f"({report.n_citation_edges} citation edges, checksum {checksum[:12]})")
    return 0


def cmd_validate(args) -> int:
    store, _ = _load_store(args)
    report = corpus.validate_corpus(store)
    print(report.to_text())
    if args.out:
        out = _out_dir(args)
        _write_json(os.path.join(out, "validation.json"), report.to_dict())
    return 0


def cmd_snapshot(args) -> int:
    out = _out_dir(args)
    store, _ = _load_store(args)
    snap = corpus.build_snapshot(store, args.t, warn_empty=False)
    edges = sum(snap.citation_count.values())
    authors = sum(
        1
        for a in store.authors.values()
        if any(p in snap.visible_papers for p in a.paper_ids)
    )
    summary = {
        "t": args.t,
        "visible_papers": len(snap.visible_papers),
        "citation_edges": edges,
        "active_authors": authors,
    }
    path = os.path.join(out, f"snapshot_t{args.t}.json")
    _write_json(path, summary)
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_topics(args) -> int:
    out = _out_dir(args)
    store, _ = _load_store(args)
    ctx = _get_context(args, store, out)
    words_path = os.path.join(out, _topic_stem(args) + ".topwords.txt")
    lines = [
        f"topic {z}: " + " ".join(words)
        for z, words in enumerate(ctx.model.top_words(10))
    ]
    _write_atomic(words_path, "\n".join(lines) + "\n")
    print(f"topic model ready: k={ctx.model.k}, vocabulary {ctx.model.v} words")
    return 0


def cmd_graph(args) -> int:
    out = _out_dir(args)
    store, _ = _load_store(args)
    snap = corpus.build_snapshot(store, args.t, warn_empty=False)
    graph = collabnet.build_collab_graph(snap)
    edges_path = os.path.join(out, f"graph_t{args.t}.edges")
    tmp = edges_path + ".tmp"
    collabnet.write_edge_list(graph, tmp)
    os.replace(tmp, edges_path)
    pagerank_path = os.path.join(out, f"pagerank_t{args.t}.json")
    _write_json(pagerank_path, collabnet.pagerank(graph))
    _update_manifest(out, edges_path, pagerank_path)
    print(f"graph at t={args.t}: {graph.n_nodes} authors, {graph.n_edges} collaboration edges")
    return 0


def cmd_featurize(args) -> int:
    out = _out_dir(args)
    store, _ = _load_store(args)
    spec, examples = _get_dataset(args, store, out)
    positives = sum(ex.label for ex in examples)
    print(
        f"dataset {os.path.basename(_dataset_path(out, spec))}: "
        f"{len(examples)} examples, {100.0 * positives / max(len(examples), 1):.2f}% positive"
    )
    return 0


def cmd_train_hindex(args) -> int:
    out = _out_dir(args)
    store, checksum = _load_store(args)
    examples = pipeline.build_author_examples(store, args.t, args.dt)
    config = _echo(args, corpus_checksum=checksum[:12], task="hindex-regression")
    report = evalkit.run_protocol(
        examples, learner="linear", runs=args.runs, seed=args.seed, config=config
    )
    model = pipeline.train_hindex_model(examples, seed=args.seed)
    model_path = os.path.join(out, f"model_hindex_t{args.t}_dt{args.dt}.json")
    tmp = model_path + ".tmp"
    learners.save_model(model, tmp)
    os.replace(tmp, model_path)
    report_path = os.path.join(out, f"report_hindex_t{args.t}_dt{args.dt}.json")
    _write_json(report_path, report.to_dict())
    _write_atomic(report_path[:-5] + ".txt", evalkit.render_reports_table([report]) + "\n")
    _update_manifest(out, model_path, report_path)
    print(f"R2 {report.mean['r2']:.4f} (sd {report.stdev['r2']:.4f}), "
          f"MAE {report.mean['mae']:.4f} over {args.runs} runs; model -> {model_path}")
    return 0


def cmd_train_impact(args) -> int:
    out = _out_dir(args)
    store, _ = _load_store(args)
    spec, examples = _get_dataset(args, store, out)
    X, y, names, _ = factorlab.to_matrix(examples)
    fit = learners.get_learner(args.learner)
    model = fit(X, y, feature_names=names, seed=args.seed)
    model_path = os.path.join(
        out, f"model_impact_{args.learner}_{spec.set_name}_{spec.mode}_t{args.t}_dt{args.dt}.json"
    )
    tmp = model_path + ".tmp"
    learners.save_model(model, tmp)
    os.replace(tmp, model_path)
    _update_manifest(out, model_path)
    print(f"trained {args.learner} on {len(examples)} examples -> {model_path}")
    return 0


def cmd_experiment(args) -> int:
    out = _out_dir(args)
    store, checksum = _load_store(args)
    spec, examples = _get_dataset(args, store, out)
    config = _echo(args, corpus_checksum=checksum[:12], dataset=spec.to_dict())
    report = evalkit.run_protocol(
        examples, learner=args.learner, runs=args.runs, seed=args.seed, config=config
    )
    baseline = evalkit.random_baseline(examples, seed=args.seed, runs=args.runs, config=config)
    stem = os.path.join(
        out, f"report_experiment_{args.learner}_{spec.set_name}_{spec.mode}_t{args.t}_dt{args.dt}"
    )
    _write_json(stem + ".json", {"baseline": baseline.to_dict(), "learner": report.to_dict()})
    _write_atomic(stem + ".txt", evalkit.render_reports_table([baseline, report]) + "\n")
    _update_manifest(out, stem + ".json")
    print(evalkit.render_reports_table([baseline, report]))
    return 0


def cmd_jackknife(args) -> int:
    out = _out_dir(args)
    store, checksum = _load_store(args)
    spec, examples = _get_dataset(args, store, out)
    report = evalkit.jackknife(
        examples, learner=args.learner, runs=args.runs, seed=args.seed,
        config=_echo(args, corpus_checksum=checksum[:12], dataset=spec.to_dict()),
    )
    stem = os.path.join(
        out, f"report_jackknife_{args.learner}_{spec.set_name}_{spec.mode}_t{args.t}_dt{args.dt}"
    )
    _write_json(stem + ".json", report.to_dict())
    _write_atomic(stem + ".txt", report.to_text() + "\n")
    _update_manifest(out, stem + ".json")
    print(report.to_text())
    return 0


def cmd_igr(args) -> int:
    out = _out_dir(args)
    store, checksum = _load_store(args)
    spec, examples = _get_dataset(args, store, out)
    table = evalkit.igr_table(examples, bins=args.bins)
    stem = os.path.join(out, f"igr_{spec.set_name}_{spec.mode}_t{args.t}_dt{args.dt}")
    _write_json(stem + ".json", {"config": _echo(args, corpus_checksum=checksum[:12]), "table": table})
    rows = [[r["factor"], f"{r['igr']:.4f}", str(r["rank"])] for r in table]
    text = evalkit.format_table(["factor", "IGR", "rank"], rows)
    _write_atomic(stem + ".txt", text + "\n")
    print(text)
    return 0


def cmd_correlate(args) -> int:
    out = _out_dir(args)
    store, checksum = _load_store(args)
    if args.table1:
        examples = pipeline.build_author_examples(store, args.t, args.dt)
        stem = os.path.join(out, f"correlate_authors_t{args.t}_dt{args.dt}")
    else:
        spec, examples = _get_dataset(args, store, out)
        stem = os.path.join(out, f"correlate_{spec.set_name}_{spec.mode}_t{args.t}_dt{args.dt}")
    table = evalkit.correlation_table(examples)
    _write_json(stem + ".json", {"config": _echo(args, corpus_checksum=checksum[:12]), "table": table})
    rows = [[k, "undefined" if v is None else f"{v:.4f}"] for k, v in table.items()]
    text = evalkit.format_table(["factor", "cc"], rows)
    _write_atomic(stem + ".txt", text + "\n")
    if not args.table1:
        _write_atomic(stem + ".curves.tsv", _response_curves_tsv(examples, args.curve_bins))
    print(text)
    return 0


def _response_curves_tsv(examples, bins: int) -> str:
    """Plot-ready factor response curves, one block of rows per factor."""
    columns = ("factor", "bin", "value_lo", "value_hi", "value_mean", "n",
               "positive_fraction", "stderr")
    lines = ["\t".join(columns)]
    for factor in examples[0].factors:
        for row in evalkit.factor_response(examples, factor, bins=bins):
            lines.append(
                "\t".join(
                    [factor] + [repr(row[c]) if isinstance(row[c], float) else str(row[c])
                                for c in columns[1:]]
                )
            )
    return "\n".join(lines) + "\n"


def cmd_stats(args) -> int:
    out = _out_dir(args)
    store, _ = _load_store(args)
    snap = corpus.build_snapshot(store, args.t, warn_empty=False)
    report = scholarmetrics.distribution_stats(snap)
    stem = os.path.join(out, f"stats_t{args.t}")
    _write_json(stem + ".json", report.to_dict())
    _write_atomic(stem + ".txt", report.to_text() + "\n")
    _update_manifest(out, stem + ".json")
    print(report.to_text())
    return 0


def cmd_serve(args) -> int:
    from . import service

    bundle = load_bundle(args)
    host, _, port = args.bind.rpartition(":")
    server = service.make_server(bundle, host or "127.0.0.1", int(port), static_dir=args.static)
    print(f"serving on http://{host or '127.0.0.1'}:{server.server_address[1]}/ "
          f"(artifacts t={bundle.t}, dt={bundle.delta_t})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def load_bundle(args) -> pipeline.ArtifactBundle:
    """Assemble the serving bundle from artifacts in the output directory."""
    out = _out_dir(args)
    store, checksum = _load_store(args)
    ctx = _get_context(args, store, out)
    mode = {"max": "max-h", "first": "first"}[args.mode]
    impact_path = os.path.join(
        out, f"model_impact_{args.learner}_{args.set}_{mode}_t{args.t}_dt{args.dt}.json"
    )
    versions = {"corpus": checksum[:12]}
    impact_model = None
    if os.path.exists(impact_path):
        impact_model = learners.load_model(impact_path)
        versions["impact"] = pipeline.file_version(impact_path)
    hindex_models = {}
    for d in range(1, 11):
        path = os.path.join(out, f"model_hindex_t{args.t}_dt{d}.json")
        if os.path.exists(path):
            hindex_models[d] = learners.load_model(path)
            versions[f"hindex:{d}"] = pipeline.file_version(path)
    return pipeline.ArtifactBundle(
        store=store,
        corpus_checksum=checksum,
        t=args.t,
        delta_t=args.dt,
        context=ctx,
        impact_model=impact_model,
        hindex_models=hindex_models,
        versions=versions,
    )


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser, topics: bool = False, dataset: bool = False):
    p.add_argument("--corpus", required=True, help="corpus flat file")
    p.add_argument("--out", default="out", help="artifact output directory")
    p.add_argument("--cache-dir", default=None,
                   help=f"corpus cache directory (env {CACHE_DIR_ENV} overrides the default)")
    if topics:
        p.add_argument("--k", type=int, default=100, help="topic count")
        p.add_argument("--iters", type=int, default=500, help="Gibbs sweeps")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--joint", action="store_true",
                       help="train the topic model on year-t papers too instead of folding them in")
    if dataset:
        p.add_argument("--t", type=int, required=True, help="observation year")
        p.add_argument("--dt", type=int, required=True, help="prediction horizon in years")
        p.add_argument("--mode", choices=["max", "first"], default="max",
                       help="primary author definition")
        p.add_argument("--set", choices=["new", "old"], default="new",
                       help="papers published at t (new) or before t (old)")
        p.add_argument("--min-h", type=int, default=10, help="primary author h-index floor")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                       help="featurization worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sciimpact",
        description="Citation-corpus analytics: h-index forecasting and "
                    "paper-contribution prediction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse the corpus, build the cache, write a validation report")
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("validate", help="print corpus integrity counts")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("snapshot", help="summarize the corpus as observed at year t")
    _add_common(p)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("topics", help="fit the topic model and content artifacts at year t")
    _add_common(p, topics=True)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("graph", help="build the collaboration network at year t")
    _add_common(p)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("featurize", help="assemble a labeled dataset")
    _add_common(p, topics=True, dataset=True)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train-hindex", help="train and evaluate the future h-index regressor")
    _add_common(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--dt", type=int, required=True)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_hindex)

    p = sub.add_parser("train-impact", help="train a paper-contribution classifier")
    _add_common(p, topics=True, dataset=True)
    p.add_argument("--learner", choices=sorted(learners.LEARNERS), default="lrc")
    p.set_defaults(func=cmd_train_impact)

    p = sub.add_parser("experiment", help="featurize, train, and evaluate over repeated splits")
    _add_common(p, topics=True, dataset=True)
    p.add_argument("--learner", choices=sorted(learners.LEARNERS), default="lrc")
    p.add_argument("--runs", type=int, default=10)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("jackknife", help="factor-group ablation (without / with-only)")
    _add_common(p, topics=True, dataset=True)
    p.add_argument("--learner", choices=sorted(learners.LEARNERS), default="lrc")
    p.add_argument("--runs", type=int, default=10)
    p.set_defaults(func=cmd_jackknife)

    p = sub.add_parser("igr", help="information gain ratio per factor")
    _add_common(p, topics=True, dataset=True)
    p.add_argument("--bins", type=int, default=10)
    p.set_defaults(func=cmd_igr)

    p = sub.add_parser("correlate", help="factor-vs-target correlation table and response curves")
    _add_common(p, topics=True, dataset=True)
    p.add_argument("--table1", action="store_true",
                   help="correlate author profile factors against future h-indices instead")
    p.add_argument("--curve-bins", type=int, default=20,
                   help="bins for the factor response-curve export")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("stats", help="citation and h-index distribution summary at year t")
    _add_common(p)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the what-if prediction HTTP service")
    _add_common(p, topics=True, dataset=True)
    p.add_argument("--learner", choices=sorted(learners.LEARNERS), default="lrc")
    p.add_argument("--bind", default="127.0.0.1:8499", help="host:port to listen on")
    p.add_argument("--static", default=None, help="directory with the built web UI")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SciImpactError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
