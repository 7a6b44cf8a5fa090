"""End-to-end orchestration: artifact building, dataset assembly, and the
what-if prediction paths shared by the CLI and the HTTP service.

Heavy artifacts (topic model, per-document topic distributions, popularity,
authority, collaboration graph) are built once per observation year and
reused by every downstream stage. Every builder is deterministic given its
seed, and target-year papers are folded into the topic space with a seed
derived from their text, so an identical what-if query always reproduces the
same numbers, online or offline.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import collabnet, corpus, factorlab, learners, scholarmetrics, topicmodel
from .corpus import CorpusStore, build_snapshot
from .errors import DependencyError, RangeError, SciImpactError
from .factorlab import (
    FACTORS_NEW,
    DatasetSpec,
    FactorContext,
    LabeledExample,
    normalize_mode,
    ratio_at_least,
)
from .scholarmetrics import REGRESSION_FEATURES


def corpus_from_path(path, cache_path=None):
    """Parse a corpus file, going through the binary cache when it is fresh.

    Returns (store, checksum). The cache is keyed to the source checksum and
    rebuilt whenever the source bytes change.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    checksum = corpus.source_checksum(data)
    if cache_path is not None and os.path.exists(cache_path):
        try:
            return corpus.load_cache(cache_path, expected_checksum=checksum), checksum
        except SciImpactError:
            pass  # stale or foreign cache: fall through to a re-parse
    store = corpus.parse_corpus(data)
    if cache_path is not None:
        tmp = str(cache_path) + ".tmp"
        corpus.save_cache(store, tmp, checksum)
        os.replace(tmp, cache_path)
    return store, checksum


def build_context(
    store: CorpusStore,
    t: int,
    k: int = 100,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 500,
    seed: int = 0,
    joint: bool = False,
    window: int = 3,
    fold_iterations: int = 50,
    include_flags: bool = False,
) -> FactorContext:
    """Build every factor-assembly artifact for observation year ``t``.

    The topic model trains on papers published before ``t``; papers published
    exactly at ``t`` are folded in afterwards (``joint=True`` trains on both
    together instead). Fold-in seeds derive from each paper's tokens.
    """
    snapshot = build_snapshot(store, t, warn_empty=False)
    snapshot_past = build_snapshot(store, t - window, warn_empty=False)

    train_ids = sorted(
        pid
        for pid in snapshot.visible_papers
        if joint or store.papers[pid].year < t
    )
    docs = []
    for pid in train_ids:
        rec = store.papers[pid]
        docs.append(topicmodel.tokenize(rec.title, rec.abstract))
    model, thetas = topicmodel.fit_lda(
        docs, k=k, alpha=alpha, beta=beta, iterations=iterations, seed=seed
    )
    doc_topics = dict(zip(train_ids, thetas))

    if not joint:
        for pid in sorted(snapshot.visible_papers):
            if pid in doc_topics:
                continue
            rec = store.papers[pid]
            tokens = topicmodel.tokenize(rec.title, rec.abstract)
            doc_topics[pid] = topicmodel.infer_doc_topics(
                model, tokens, iterations=fold_iterations
            ).probs

    popularity = topicmodel.topic_popularity(model, snapshot, doc_topics)
    authority = topicmodel.build_authority(model, snapshot, doc_topics)
    graph = collabnet.build_collab_graph(snapshot)
    pagerank_scores = collabnet.pagerank(graph)
    return FactorContext(
        snapshot=snapshot,
        snapshot_past=snapshot_past,
        model=model,
        doc_topics=doc_topics,
        popularity=popularity,
        authority=authority,
        graph=graph,
        pagerank_scores=pagerank_scores,
        include_flags=include_flags,
    )


# ---------------------------------------------------------------------------
# datasets


def _dataset_shard(args):
    store, dspec, ctx, future_h, ids = args
    return factorlab.build_dataset(store, dspec, ctx, future_h=future_h, paper_ids=ids)


def featurize_dataset(
    store: CorpusStore,
    dspec: DatasetSpec,
    ctx: FactorContext,
    future_h: Mapping[str, float] | None = None,
    workers: int = 1,
) -> list[LabeledExample]:
    """Build a labeled dataset, optionally sharding papers across processes.

    Shards merge by sorted paper id, so the worker count never changes the
    output.
    """
    if workers <= 1:
        return factorlab.build_dataset(store, dspec, ctx, future_h=future_h)
    all_ids = sorted(store.papers)
    chunks = [all_ids[i::workers] for i in range(workers)]
    examples: list[LabeledExample] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(
            _dataset_shard, [(store, dspec, ctx, future_h, chunk) for chunk in chunks]
        ):
            examples.extend(part)
    examples.sort(key=lambda ex: ex.paper_id)
    return examples


def build_author_examples(
    store: CorpusStore,
    t: int,
    delta_t: int,
    min_papers: int = 1,
) -> list[LabeledExample]:
    """Author-level regression dataset: profile factors at t, h-index at t+dt.

    Rows reuse the LabeledExample record with the author id in both id slots
    and the future h-index as the label.
    """
    if t + delta_t > store.year_max:
        raise RangeError(
            f"targets need h-indices at {t + delta_t}, but the corpus ends in {store.year_max}"
        )
    snap_now = build_snapshot(store, t, warn_empty=False)
    snap_future = build_snapshot(store, t + delta_t, warn_empty=False)
    examples = []
    for author_id in sorted(store.authors):
        profile = scholarmetrics.author_profile(snap_now, author_id)
        if profile.num_papers < min_papers:
            continue
        examples.append(
            LabeledExample(
                paper_id=author_id,
                primary_author_id=author_id,
                factors=profile.as_features(),
                label=float(scholarmetrics.author_h_index(snap_future, author_id)),
                t=t,
                delta_t=delta_t,
                mode="-",
                set_name="authors",
            )
        )
    return examples


def train_hindex_model(examples: Sequence[LabeledExample], seed: int = 0) -> learners.TrainedModel:
    X, y, names, _ = factorlab.to_matrix(examples, REGRESSION_FEATURES)
    return learners.fit_linear_regression(X, y, feature_names=names, clip_feature="h-index", seed=seed)


def predicted_future_h(
    model: learners.TrainedModel,
    snapshot,
    author_ids: Sequence[str],
) -> dict[str, float]:
    """Problem-1 regressor applied to each author's current profile."""
    out = {}
    for author_id in author_ids:
        features = scholarmetrics.author_profile(snapshot, author_id).as_features()
        out[author_id] = learners.predict_linear(model, features).value
    return out


# ---------------------------------------------------------------------------
# what-if queries (shared by the HTTP service and offline use)


class QueryValidationError(SciImpactError, ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(message)
        self.field = field_name


HINDEX_QUERY_FIELDS = {
    # name -> (kind, min, max)
    "current_h": ("int", 0, None),
    "num_papers": ("int", 0, None),
    "avg_citations": ("number", 0, None),
    "num_coauthors": ("int", 0, None),
    "years_active": ("int", 0, None),
    "horizon_years": ("int", 1, 10),
}


def validate_hindex_query(payload: Mapping) -> dict:
    if not isinstance(payload, Mapping):
        raise QueryValidationError("body", "request body must be a JSON object")
    clean = {}
    for name, (kind, lo, hi) in HINDEX_QUERY_FIELDS.items():
        if name not in payload:
            raise QueryValidationError(name, f"missing field {name}")
        value = payload[name]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise QueryValidationError(name, f"{name} must be a number")
        if kind == "int" and int(value) != value:
            raise QueryValidationError(name, f"{name} must be an integer")
        if lo is not None and value < lo:
            raise QueryValidationError(name, f"{name} must be >= {lo}")
        if hi is not None and value > hi:
            raise QueryValidationError(name, f"{name} must be <= {hi}")
        clean[name] = int(value) if kind == "int" else float(value)
    return clean


def predict_hindex_query(bundle: "ArtifactBundle", payload: Mapping) -> dict:
    query = validate_hindex_query(payload)
    horizon = query["horizon_years"]
    model = bundle.hindex_models.get(horizon)
    if model is None:
        raise QueryValidationError(
            "horizon_years", f"no trained model for horizon {horizon}"
        )
    features = {
        "h-index": float(query["current_h"]),
        "num-papers": float(query["num_papers"]),
        "num-citations": float(query["avg_citations"]),
        "num-co": float(query["num_coauthors"]),
        "num-years": float(query["years_active"]),
    }
    pred = learners.predict_linear(model, features)
    return {
        "predicted_h": pred.value,
        "horizon": horizon,
        "clipped": pred.clipped,
        "model_version": bundle.versions.get(f"hindex:{horizon}", ""),
    }


@dataclass
class ResolvedAuthor:
    """Everything factor assembly needs to know about one query author."""

    name: str
    author_id: str | None
    h: int
    prior_citations: list[int]
    delta_h: int
    degree: float = 0.0
    pagerank: float = 0.0
    coauthor_h: float = 0.0
    coauthor_h_weighted: float = 0.0
    authority: np.ndarray | None = None
    profile_features: dict[str, float] | None = None


def _resolve_author(entry: Mapping, position: int, ctx: FactorContext) -> ResolvedAuthor:
    if not isinstance(entry, Mapping):
        raise QueryValidationError("authors", f"author #{position} must be an object")
    name = str(entry.get("name", f"author-{position}"))
    author_id = entry.get("author_id")
    snapshot = ctx.snapshot
    if author_id is not None:
        if author_id not in snapshot.store.authors:
            raise QueryValidationError(
                "authors", f"unknown author_id {author_id!r} for {name!r}"
            )
        h = scholarmetrics.author_h_index(snapshot, author_id)
        prior = [
            snapshot.citation_count.get(pid, 0)
            for pid in snapshot.store.authors[author_id].paper_ids
            if pid in snapshot.visible_papers
        ]
        past_h = (
            scholarmetrics.author_h_index(ctx.snapshot_past, author_id)
            if ctx.snapshot_past is not None
            else 0
        )
        graph = ctx.require("graph")
        if author_id in graph:
            degree = float(graph.degree(author_id))
            pr = (ctx.pagerank_scores or {}).get(author_id, 0.0)
            ch, chw = collabnet.coauthor_h_stats(graph, snapshot, author_id)
        else:
            degree = pr = ch = chw = 0.0
        return ResolvedAuthor(
            name=name,
            author_id=author_id,
            h=h,
            prior_citations=prior,
            delta_h=h - past_h,
            degree=degree,
            pagerank=pr,
            coauthor_h=ch,
            coauthor_h_weighted=chw,
            authority=ctx.require("authority").vector(author_id),
            profile_features=scholarmetrics.author_profile(snapshot, author_id).as_features(),
        )
    manual = entry.get("manual")
    if not isinstance(manual, Mapping) or "h" not in manual:
        raise QueryValidationError(
            "authors",
            f"author {name!r} is not in the corpus; provide a manual profile with at least 'h'",
        )
    h = int(manual["h"])
    if h < 0:
        raise QueryValidationError("authors", f"manual h for {name!r} must be >= 0")
    prior = [int(c) for c in manual.get("prior_citations", [])]
    model = ctx.require("model")
    profile = {
        "h-index": float(h),
        "num-papers": float(len(prior)),
        "num-citations": float(np.mean(prior)) if prior else 0.0,
        "num-co": float(manual.get("num_coauthors", 0)),
        "num-years": float(manual.get("years_active", 0)),
    }
    return ResolvedAuthor(
        name=name,
        author_id=None,
        h=h,
        prior_citations=prior,
        delta_h=int(manual.get("delta_h", 0)),
        authority=np.zeros(model.k),
        profile_features=profile,
    )


def _resolve_venue(venue: Mapping | str | None, ctx: FactorContext) -> tuple[float, float, bool]:
    """(venue h-index, venue mean citations, resolved?)."""
    snapshot = ctx.snapshot
    if isinstance(venue, Mapping) and isinstance(venue.get("manual"), Mapping):
        manual = venue["manual"]
        return float(manual.get("h_index", 0.0)), float(manual.get("avg_citations", 0.0)), True
    if isinstance(venue, Mapping):
        name = venue.get("name") or venue.get("venue_id")
    else:
        name = venue
    if not name:
        return 0.0, 0.0, False
    vid = str(name).strip().casefold()
    if snapshot.store.venue_papers.get(vid):
        try:
            return (
                float(scholarmetrics.venue_h_index(snapshot, vid)),
                scholarmetrics.venue_avg_citations(snapshot, vid),
                True,
            )
        except KeyError:
            return 0.0, 0.0, False
    return 0.0, 0.0, False


def predict_paper_query(bundle: "ArtifactBundle", payload: Mapping) -> dict:
    """Assemble the new-paper factor vector for a what-if query and score it.

    Pure function of (artifacts, payload); the HTTP handler is a thin wrapper,
    so online and offline answers are bit-identical.
    """
    ctx = bundle.context
    if not isinstance(payload, Mapping):
        raise QueryValidationError("body", "request body must be a JSON object")
    title = str(payload.get("title", "") or "")
    abstract = str(payload.get("abstract", "") or "")
    if not (title.strip() or abstract.strip()):
        raise QueryValidationError("title", "title and abstract are both empty")
    raw_authors = payload.get("authors")
    if not isinstance(raw_authors, Sequence) or not raw_authors:
        raise QueryValidationError("authors", "at least one author is required")
    mode = normalize_mode(str(payload.get("primary_mode", "max-h")))

    authors = [_resolve_author(a, i, ctx) for i, a in enumerate(raw_authors)]
    flags: list[str] = ["no-references"]

    model = ctx.require("model")
    tokens = topicmodel.tokenize(title, abstract)
    inferred = topicmodel.infer_doc_topics(model, tokens)
    theta = inferred.probs
    if inferred.all_oov:
        flags.append("all-tokens-out-of-vocabulary")

    # primary author: position for first mode, max h (earliest wins ties) otherwise
    if mode == factorlab.MODE_FIRST:
        primary_idx = 0
    else:
        primary_idx = max(range(len(authors)), key=lambda i: (authors[i].h, -i))
    primary = authors[primary_idx]

    hs = [float(a.h) for a in authors]
    deltas = [float(a.delta_h) for a in authors]
    max_idx = max(range(len(authors)), key=lambda i: (authors[i].h, -i))
    if not primary.prior_citations:
        flags.append("primary-author-has-no-prior-papers")
    if not authors[0].prior_citations:
        flags.append("first-author-has-no-prior-papers")

    venue_h, venue_cites, venue_ok = _resolve_venue(payload.get("venue"), ctx)
    if not venue_ok:
        flags.append("venue-not-resolved")

    auth_values = [
        topicmodel.c_authority(theta, a.authority) for a in authors
    ]
    factors: dict[str, float] = {
        "A-first-max": hs[0],
        "A-ave-max": float(np.mean(hs)),
        "A-sum-max": float(sum(hs)),
        "A-first-ratio": ratio_at_least(authors[0].prior_citations, primary.h),
        "A-max-ratio": ratio_at_least(primary.prior_citations, primary.h),
        "A-num-authors": float(len(authors)),
        "C-popularity": topicmodel.c_popularity(theta, ctx.require("popularity")),
        "C-novelty": 0.0,
        "C-diversity": topicmodel.c_diversity(theta),
        "C-authority-first": auth_values[0],
        "C-authority-max": auth_values[primary_idx],
        "C-authority-ave": float(np.mean(auth_values)),
        "V-h-index": venue_h,
        "V-citation": venue_cites,
        "S-degree": max(a.degree for a in authors),
        "S-pagerank": max(a.pagerank for a in authors),
        "S-h-coauthor": max(a.coauthor_h for a in authors),
        "S-h-weight": max(a.coauthor_h_weighted for a in authors),
        "R-h-index": 0.0,
        "R-citation": 0.0,
        "T-ave-h": float(np.mean(deltas)),
        "T-max-h": float(max(deltas)),
        "T-h-first": deltas[0],
        "T-h-max": deltas[max_idx],
    }

    impact_model = bundle.impact_model
    if impact_model is None:
        raise DependencyError("bundle has no impact classifier loaded")
    names = list(impact_model.feature_names)
    missing = [n for n in names if n not in factors]
    if missing:
        raise DependencyError(f"impact model expects unavailable factors: {missing}")
    x = np.asarray([[factors[n] for n in names]])
    probability = float(learners.predict_scores(impact_model, x)[0])

    contributions = None
    if impact_model.kind == learners.KIND_LOGISTIC:
        xs = (x[0] - np.asarray(impact_model.standardization["mean"])) / np.asarray(
            impact_model.standardization["std"]
        )
        weights = np.asarray(impact_model.params["weights"])
        contributions = {"intercept": float(impact_model.params["intercept"])}
        contributions.update(
            {n: float(w * v) for n, w, v in zip(names, weights, xs)}
        )

    future_h = None
    hindex_model = bundle.hindex_models.get(bundle.delta_t)
    if hindex_model is not None and primary.profile_features is not None:
        future_h = learners.predict_linear(hindex_model, primary.profile_features).value

    return {
        "probability": probability,
        "factor_breakdown": {n: factors[n] for n in FACTORS_NEW},
        "factor_contributions": contributions,
        "primary_author": {"name": primary.name, "author_id": primary.author_id},
        "predicted_future_h": future_h,
        "model_version": bundle.versions.get("impact", ""),
        "flags": sorted(set(flags)),
    }


# ---------------------------------------------------------------------------
# artifact bundle for serving


@dataclass
class ArtifactBundle:
    """Immutable set of artifacts the prediction service answers from."""

    store: CorpusStore | None = None
    corpus_checksum: str = ""
    t: int = 0
    delta_t: int = 0
    context: FactorContext | None = None
    impact_model: learners.TrainedModel | None = None
    hindex_models: dict[int, learners.TrainedModel] = field(default_factory=dict)
    versions: dict[str, str] = field(default_factory=dict)

    def missing(self) -> list[str]:
        out = []
        if self.store is None:
            out.append("corpus")
        if self.context is None:
            out.append("context")
        if self.impact_model is None:
            out.append("impact-model")
        if not self.hindex_models:
            out.append("hindex-models")
        return out


def file_version(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()[:12]


# id->vector tables are stored as magic + JSON header + one .npy block;
# unlike a zip container this is byte-identical for identical content

_TABLE_MAGIC = b"SITABLE\x01"


def _save_vector_table(ids: list[str], matrix: np.ndarray, meta: dict, path) -> None:
    import json as _json

    header = _json.dumps({"ids": ids, **meta}, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_TABLE_MAGIC)
        fh.write(len(header).to_bytes(8, "big"))
        fh.write(header)
        np.save(fh, matrix)


def _load_vector_table(path) -> tuple[list[str], np.ndarray, dict]:
    import json as _json

    from .errors import CacheError

    with open(path, "rb") as fh:
        if fh.read(len(_TABLE_MAGIC)) != _TABLE_MAGIC:
            raise CacheError(f"{path}: not a vector-table file")
        header = _json.loads(fh.read(int.from_bytes(fh.read(8), "big")).decode("utf-8"))
        matrix = np.load(fh)
    ids = [str(i) for i in header.pop("ids")]
    return ids, matrix, header


def save_doc_topics(doc_topics: Mapping[str, np.ndarray], path) -> None:
    ids = sorted(doc_topics)
    matrix = np.asarray([doc_topics[i] for i in ids])
    _save_vector_table(ids, matrix, {}, path)


def load_doc_topics(path) -> dict[str, np.ndarray]:
    ids, matrix, _ = _load_vector_table(path)
    return {pid: matrix[i] for i, pid in enumerate(ids)}


def save_authority(table: topicmodel.AuthorityTable, path) -> None:
    ids = sorted(a for a, _ in table.items())
    matrix = np.asarray([table.vector(a) for a in ids]) if ids else np.zeros((0, table.k))
    _save_vector_table(ids, matrix, {"k": table.k}, path)


def load_authority(path) -> topicmodel.AuthorityTable:
    ids, matrix, meta = _load_vector_table(path)
    return topicmodel.AuthorityTable(int(meta["k"]), {a: matrix[i] for i, a in enumerate(ids)})
