"""Factor vectors, labels, and experimental dataset construction.

A labeled example pairs one paper with its primary author (first-listed or
highest-h, depending on mode) and carries the full factor catalog computed
from data at year t only. The label records whether the paper's citations
at t + delta_t reached the primary author's future h-index.

Factor catalog (names are the canonical column headers):

    A-*  author factors          C-*  content (topic) factors
    V-*  venue factors           S-*  social (collaboration) factors
    R-*  reference factors       T-*  temporal (h-index growth) factors
    E-*  existing-citation factors, only for papers published before t
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import collabnet, scholarmetrics, topicmodel
from .corpus import CorpusSnapshot, CorpusStore, PaperRecord, build_snapshot, citation_count_at
from .errors import (
    DependencyError,
    InvalidRecordError,
    RangeError,
    SchemaError,
    SetMismatchError,
)

MODE_MAX = "max-h"
MODE_FIRST = "first"
SET_NEW = "new"
SET_OLD = "old"

AUTHOR_FACTORS = ("A-first-max", "A-ave-max", "A-sum-max", "A-first-ratio", "A-max-ratio", "A-num-authors")
CONTENT_FACTORS = ("C-popularity", "C-novelty", "C-diversity", "C-authority-first", "C-authority-max", "C-authority-ave")
VENUE_FACTORS = ("V-h-index", "V-citation")
SOCIAL_FACTORS = ("S-degree", "S-pagerank", "S-h-coauthor", "S-h-weight")
REFERENCE_FACTORS = ("R-h-index", "R-citation")
TEMPORAL_FACTORS = ("T-ave-h", "T-max-h", "T-h-first", "T-h-max")
EXISTING_FACTORS = ("E-numc", "E-numc-ave", "E-num-years")

FACTORS_NEW = AUTHOR_FACTORS + CONTENT_FACTORS + VENUE_FACTORS + SOCIAL_FACTORS + REFERENCE_FACTORS + TEMPORAL_FACTORS
FACTORS_OLD = FACTORS_NEW + EXISTING_FACTORS

FACTOR_GROUPS = {
    "A": AUTHOR_FACTORS,
    "C": CONTENT_FACTORS,
    "V": VENUE_FACTORS,
    "S": SOCIAL_FACTORS,
    "R": REFERENCE_FACTORS,
    "T": TEMPORAL_FACTORS,
    "E": EXISTING_FACTORS,
}

FLAG_FACTORS = ("M-no-prior-first", "M-no-prior-primary", "M-no-references")


def normalize_mode(mode: str) -> str:
    if mode in (MODE_MAX, "max", "max-h-index"):
        return MODE_MAX
    if mode == MODE_FIRST:
        return MODE_FIRST
    raise ValueError(f"unknown primary-author mode {mode!r}")


@dataclass(frozen=True)
class DatasetSpec:
    """Defines one experimental dataset (which papers, which labels)."""

    t: int
    delta_t: int
    mode: str = MODE_MAX
    set_name: str = SET_NEW
    min_h: int = 10
    future_h_source: str = "observed"  # or "predicted"

    def __post_init__(self):
        object.__setattr__(self, "mode", normalize_mode(self.mode))
        if self.set_name not in (SET_NEW, SET_OLD):
            raise ValueError(f"unknown paper set {self.set_name!r}")
        if self.future_h_source not in ("observed", "predicted"):
            raise ValueError(f"unknown future_h_source {self.future_h_source!r}")

    @property
    def factor_names(self) -> tuple[str, ...]:
        return FACTORS_OLD if self.set_name == SET_OLD else FACTORS_NEW

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "delta_t": self.delta_t,
            "mode": self.mode,
            "set": self.set_name,
            "min_h": self.min_h,
            "future_h_source": self.future_h_source,
        }


@dataclass
class FactorContext:
    """All artifacts, built at year t, that factor assembly depends on."""

    snapshot: CorpusSnapshot
    snapshot_past: CorpusSnapshot | None = None
    model: topicmodel.TopicModel | None = None
    doc_topics: Mapping[str, np.ndarray] | None = None
    popularity: np.ndarray | None = None
    authority: topicmodel.AuthorityTable | None = None
    graph: collabnet.CollabGraph | None = None
    pagerank_scores: dict[str, float] | None = None
    include_flags: bool = False
    extra_doc_topics: dict[str, np.ndarray] = field(default_factory=dict)

    def require(self, name: str):
        value = getattr(self, name)
        if value is None:
            raise DependencyError(f"factor context is missing artifact {name!r}")
        return value

    def theta(self, paper_id: str) -> np.ndarray:
        doc_topics = self.require("doc_topics")
        theta = doc_topics.get(paper_id)
        if theta is None:
            theta = self.extra_doc_topics.get(paper_id)
        if theta is None:
            raise DependencyError(f"doc_topics has no distribution for paper {paper_id!r}")
        return theta


def select_primary_author(paper: PaperRecord, snapshot: CorpusSnapshot, mode: str) -> str:
    """First-listed author, or the one with the highest h-index at the snapshot
    (ties broken by earliest list position)."""
    if not paper.author_ids:
        raise InvalidRecordError(f"paper {paper.paper_id!r} has no authors")
    mode = normalize_mode(mode)
    if mode == MODE_FIRST:
        return paper.author_ids[0]
    best = paper.author_ids[0]
    best_h = scholarmetrics.author_h_index(snapshot, best)
    for a in paper.author_ids[1:]:
        h = scholarmetrics.author_h_index(snapshot, a)
        if h > best_h:
            best, best_h = a, h
    return best


def ratio_at_least(counts: Sequence[int], threshold: float) -> float:
    """Fraction of counts >= threshold; 0.0 for an empty sequence."""
    if not counts:
        return 0.0
    return sum(1 for c in counts if c >= threshold) / len(counts)


def _prior_counts(snapshot: CorpusSnapshot, author_id: str, exclude: str) -> list[int]:
    author = snapshot.store.authors[author_id]
    return [
        snapshot.citation_count.get(pid, 0)
        for pid in author.paper_ids
        if pid != exclude and pid in snapshot.visible_papers
    ]


def author_factors(
    paper: PaperRecord,
    snapshot: CorpusSnapshot,
    mode: str,
    ratio_style: str = "prose",
) -> tuple[dict[str, float], dict[str, bool]]:
    """The six A-* factors plus missing-data flags.

    ``ratio_style="prose"`` computes the ratios as the fraction of the
    author's prior papers whose citations reach the primary author's
    h-index; ``"table"`` uses h-index / number-of-papers instead.
    """
    primary = select_primary_author(paper, snapshot, mode)
    hs = [scholarmetrics.author_h_index(snapshot, a) for a in paper.author_ids]
    primary_h = scholarmetrics.author_h_index(snapshot, primary)

    first = paper.author_ids[0]
    first_prior = _prior_counts(snapshot, first, exclude=paper.paper_id)
    primary_prior = _prior_counts(snapshot, primary, exclude=paper.paper_id)

    if ratio_style == "prose":
        first_ratio = ratio_at_least(first_prior, primary_h)
        max_ratio = ratio_at_least(primary_prior, primary_h)
    elif ratio_style == "table":
        first_ratio = primary_h / len(first_prior) if first_prior else 0.0
        max_ratio = primary_h / len(primary_prior) if primary_prior else 0.0
    else:
        raise ValueError(f"unknown ratio_style {ratio_style!r}")

    factors = {
        "A-first-max": float(hs[0]),
        "A-ave-max": float(np.mean(hs)),
        "A-sum-max": float(sum(hs)),
        "A-first-ratio": float(first_ratio),
        "A-max-ratio": float(max_ratio),
        "A-num-authors": float(len(paper.author_ids)),
    }
    flags = {
        "M-no-prior-first": not first_prior,
        "M-no-prior-primary": not primary_prior,
    }
    return factors, flags


def reference_factors(
    paper: PaperRecord,
    snapshot: CorpusSnapshot,
    mode: str,
) -> tuple[dict[str, float], dict[str, bool]]:
    """R-h-index (fraction of visible references at/above the primary author's
    h-index) and R-citation (their mean citation count); 0 when no visible refs."""
    primary = select_primary_author(paper, snapshot, mode)
    primary_h = scholarmetrics.author_h_index(snapshot, primary)
    counts = [
        snapshot.citation_count.get(r, 0)
        for r in paper.reference_ids
        if r in snapshot.visible_papers
    ]
    if counts:
        factors = {
            "R-h-index": ratio_at_least(counts, primary_h),
            "R-citation": float(np.mean(counts)),
        }
    else:
        factors = {"R-h-index": 0.0, "R-citation": 0.0}
    return factors, {"M-no-references": not counts}


def temporal_factors(
    paper: PaperRecord,
    store: CorpusStore,
    t: int,
    snap_now: CorpusSnapshot | None = None,
    snap_past: CorpusSnapshot | None = None,
    window: int = 3,
) -> dict[str, float]:
    """h-index deltas over [t - window, t] for the paper's authors."""
    if snap_now is None:
        snap_now = build_snapshot(store, t, warn_empty=False)
    if snap_past is None:
        snap_past = build_snapshot(store, t - window, warn_empty=False)
    deltas = [
        scholarmetrics.author_h_index(snap_now, a) - scholarmetrics.author_h_index(snap_past, a)
        for a in paper.author_ids
    ]
    max_h_author = select_primary_author(paper, snap_now, MODE_MAX)
    idx = paper.author_ids.index(max_h_author)
    return {
        "T-ave-h": float(np.mean(deltas)),
        "T-max-h": float(max(deltas)),
        "T-h-first": float(deltas[0]),
        "T-h-max": float(deltas[idx]),
    }


def existing_factors(paper: PaperRecord, snapshot: CorpusSnapshot) -> dict[str, float]:
    """Citation history of an already-published paper at the snapshot year."""
    if paper.year >= snapshot.t:
        raise SetMismatchError(
            f"paper {paper.paper_id!r} (year {paper.year}) is not prior to t={snapshot.t}"
        )
    numc = citation_count_at(snapshot, paper.paper_id)
    years = snapshot.t - paper.year
    return {
        "E-numc": float(numc),
        "E-numc-ave": float(numc / max(years, 1)),
        "E-num-years": float(years),
    }


def content_factors(
    paper: PaperRecord,
    mode: str,
    ctx: FactorContext,
) -> dict[str, float]:
    snapshot = ctx.snapshot
    theta = ctx.theta(paper.paper_id)
    popularity = ctx.require("popularity")
    authority = ctx.require("authority")

    ref_thetas = [
        ctx.theta(r) for r in paper.reference_ids if r in snapshot.visible_papers
    ]
    primary = select_primary_author(paper, snapshot, mode)
    first = paper.author_ids[0]
    auth_values = [topicmodel.c_authority(theta, authority.vector(a)) for a in paper.author_ids]

    return {
        "C-popularity": topicmodel.c_popularity(theta, popularity),
        "C-novelty": topicmodel.c_novelty(theta, ref_thetas),
        "C-diversity": topicmodel.c_diversity(theta),
        "C-authority-first": topicmodel.c_authority(theta, authority.vector(first)),
        "C-authority-max": topicmodel.c_authority(theta, authority.vector(primary)),
        "C-authority-ave": float(np.mean(auth_values)),
    }


def venue_factors(paper: PaperRecord, snapshot: CorpusSnapshot) -> dict[str, float]:
    """Venue h-index and mean citations; 0 for papers without a usable venue."""
    vid = paper.venue_id
    if vid and snapshot.store.venue_papers.get(vid):
        try:
            return {
                "V-h-index": float(scholarmetrics.venue_h_index(snapshot, vid)),
                "V-citation": scholarmetrics.venue_avg_citations(snapshot, vid),
            }
        except KeyError:
            pass
    return {"V-h-index": 0.0, "V-citation": 0.0}


def assemble_factors(
    paper: PaperRecord,
    dspec: DatasetSpec,
    ctx: FactorContext,
) -> dict[str, float]:
    """The full ordered factor vector for one paper (E-* only for the old set)."""
    snapshot = ctx.snapshot
    graph = ctx.require("graph")

    a_factors, a_flags = author_factors(paper, snapshot, dspec.mode)
    r_factors, r_flags = reference_factors(paper, snapshot, dspec.mode)
    s = collabnet.social_factors(paper, graph, snapshot, ctx.pagerank_scores)

    out: dict[str, float] = {}
    out.update(a_factors)
    out.update(content_factors(paper, dspec.mode, ctx))
    out.update(venue_factors(paper, snapshot))
    out.update(dict(zip(SOCIAL_FACTORS, s)))
    out.update(r_factors)
    out.update(temporal_factors(paper, snapshot.store, dspec.t, snapshot, ctx.snapshot_past))
    if dspec.set_name == SET_OLD:
        out.update(existing_factors(paper, snapshot))
    if ctx.include_flags:
        flags = {**a_flags, **r_flags}
        for name in FLAG_FACTORS:
            out[name] = 1.0 if flags.get(name, False) else 0.0

    expected = dspec.factor_names + (FLAG_FACTORS if ctx.include_flags else ())
    if tuple(out) != expected:
        raise SchemaError("assembled factor names diverge from the catalog")
    for name, value in out.items():
        if not math.isfinite(value):
            raise SchemaError(f"non-finite value for factor {name}")
    return out


@dataclass(frozen=True)
class LabeledExample:
    """One dataset row. For the author-level regression dataset, paper_id and
    primary_author_id both carry the author id and label holds the target."""

    paper_id: str
    primary_author_id: str
    factors: dict[str, float]
    label: float
    t: int
    delta_t: int
    mode: str
    set_name: str


def build_dataset(
    store: CorpusStore,
    dspec: DatasetSpec,
    ctx: FactorContext,
    future_h: Mapping[str, int] | None = None,
    paper_ids: Sequence[str] | None = None,
) -> list[LabeledExample]:
    """Select qualifying papers, assemble factors at t, and label at t + delta_t.

    ``future_h`` maps primary authors to their future h-index; omit it to use
    the observed value from the corpus. ``paper_ids`` restricts candidates
    (used to shard featurization across workers). Output is sorted by
    paper_id, so sharded builds merge deterministically.
    """
    t, dt = dspec.t, dspec.delta_t
    if not (store.year_min <= t <= store.year_max):
        raise RangeError(f"t={t} outside corpus years [{store.year_min}, {store.year_max}]")
    if t + dt > store.year_max:
        raise RangeError(
            f"labels need citations at {t + dt}, but the corpus ends in {store.year_max}"
        )

    snap_future = build_snapshot(store, t + dt, warn_empty=False)

    if paper_ids is None:
        candidates = (rec for rec in store.papers.values())
    else:
        candidates = (store.papers[pid] for pid in paper_ids)

    examples: list[LabeledExample] = []
    for rec in candidates:
        if dspec.set_name == SET_NEW and rec.year != t:
            continue
        if dspec.set_name == SET_OLD and rec.year >= t:
            continue
        if not rec.author_ids:
            continue
        primary = select_primary_author(rec, ctx.snapshot, dspec.mode)
        if scholarmetrics.author_h_index(ctx.snapshot, primary) < dspec.min_h:
            continue
        if future_h is not None:
            target_h = future_h[primary]
        else:
            target_h = scholarmetrics.author_h_index(snap_future, primary)
        label = 1 if citation_count_at(snap_future, rec.paper_id) >= target_h else 0
        examples.append(
            LabeledExample(
                paper_id=rec.paper_id,
                primary_author_id=primary,
                factors=assemble_factors(rec, dspec, ctx),
                label=label,
                t=t,
                delta_t=dt,
                mode=dspec.mode,
                set_name=dspec.set_name,
            )
        )
    examples.sort(key=lambda ex: ex.paper_id)
    return examples


META_COLUMNS = ("paper_id", "primary_author", "label", "t", "delta_t", "mode", "set")


def save_dataset(examples: Sequence[LabeledExample], path) -> None:
    """Tab-separated matrix with a header row.

    Floats are written with Python's shortest round-trip representation, so
    a load followed by a save reproduces the file byte for byte.
    """
    if not examples:
        raise ValueError("refusing to write an empty dataset")
    factor_names = list(examples[0].factors)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(META_COLUMNS + tuple(factor_names)) + "\n")
        for ex in examples:
            if list(ex.factors) != factor_names:
                raise SchemaError("mixed factor schemas in one dataset")
            row = [
                ex.paper_id,
                ex.primary_author_id,
                repr(float(ex.label)),
                str(ex.t),
                str(ex.delta_t),
                ex.mode,
                ex.set_name,
            ]
            row += [repr(float(v)) for v in ex.factors.values()]
            fh.write("\t".join(row) + "\n")


def load_dataset(path) -> list[LabeledExample]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header[: len(META_COLUMNS)]) != META_COLUMNS:
            raise SchemaError(f"{path}: unexpected dataset header")
        factor_names = header[len(META_COLUMNS):]
        examples = []
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            meta, values = parts[: len(META_COLUMNS)], parts[len(META_COLUMNS):]
            examples.append(
                LabeledExample(
                    paper_id=meta[0],
                    primary_author_id=meta[1],
                    factors=dict(zip(factor_names, (float(v) for v in values))),
                    label=float(meta[2]),
                    t=int(meta[3]),
                    delta_t=int(meta[4]),
                    mode=meta[5],
                    set_name=meta[6],
                )
            )
    return examples


def to_matrix(
    examples: Sequence[LabeledExample],
    feature_names: Sequence[str] | None = None,
) -> tuple[np.ndarray, np.ndarray, list[str], list[str]]:
    """(X, y, feature_names, group_ids) for the learners and the evaluator."""
    if not examples:
        raise ValueError("empty example list")
    if feature_names is None:
        feature_names = list(examples[0].factors)
    else:
        feature_names = list(feature_names)
        missing = [n for n in feature_names if n not in examples[0].factors]
        if missing:
            raise SchemaError(f"unknown factor names: {missing}")
    X = np.asarray([[ex.factors[n] for n in feature_names] for ex in examples])
    y = np.asarray([ex.label for ex in examples], dtype=float)
    groups = [ex.primary_author_id for ex in examples]
    return X, y, feature_names, groups
