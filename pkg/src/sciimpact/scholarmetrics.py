"""Impact metrics over snapshots: h-indices, author profiles, venue stats.

All functions are pure reads of an immutable snapshot and safe to evaluate
in parallel. Author h-indices are memoized per snapshot (write-once dict,
benign under concurrent readers).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .corpus import CorpusSnapshot, CorpusStore, build_snapshot
from .errors import NotFoundError


def h_index(citation_counts: Iterable[int]) -> int:
    """Largest h such that at least h of the counts are >= h (0 for empty input)."""
    counts = sorted(citation_counts, reverse=True)
    h = 0
    for i, c in enumerate(counts):
        if c >= i + 1:
            h = i + 1
        else:
            break
    return h


def _visible_papers(snapshot: CorpusSnapshot, author_id: str) -> list[str]:
    author = snapshot.store.authors.get(author_id)
    if author is None:
        raise NotFoundError(f"unknown author {author_id!r}")
    return [pid for pid in author.paper_ids if pid in snapshot.visible_papers]


def author_h_index(snapshot: CorpusSnapshot, author_id: str) -> int:
    """The author's h-index over papers and citations visible at the snapshot."""
    cached = snapshot._author_h.get(author_id)
    if cached is not None:
        return cached
    counts = [snapshot.citation_count.get(pid, 0) for pid in _visible_papers(snapshot, author_id)]
    h = h_index(counts)
    snapshot._author_h[author_id] = h
    return h


@dataclass(frozen=True)
class AuthorProfile:
    """The five author-level factors used by the h-index regressor."""

    h_index: int
    num_papers: int
    num_citations: float  # mean citations per paper
    num_co: int  # unique co-authors
    num_years: int  # years since first paper

    def as_features(self) -> dict[str, float]:
        return {
            "h-index": float(self.h_index),
            "num-papers": float(self.num_papers),
            "num-citations": float(self.num_citations),
            "num-co": float(self.num_co),
            "num-years": float(self.num_years),
        }


REGRESSION_FEATURES = ("h-index", "num-papers", "num-citations", "num-co", "num-years")


def author_profile(snapshot: CorpusSnapshot, author_id: str) -> AuthorProfile:
    papers = _visible_papers(snapshot, author_id)
    counts = [snapshot.citation_count.get(pid, 0) for pid in papers]
    coauthors: set[str] = set()
    first_year: int | None = None
    for pid in papers:
        rec = snapshot.store.papers[pid]
        coauthors.update(a for a in rec.author_ids if a != author_id)
        if first_year is None or rec.year < first_year:
            first_year = rec.year
    return AuthorProfile(
        h_index=h_index(counts),
        num_papers=len(papers),
        num_citations=(sum(counts) / len(counts)) if counts else 0.0,
        num_co=len(coauthors),
        num_years=(snapshot.t - first_year) if first_year is not None else 0,
    )


def _venue_counts(snapshot: CorpusSnapshot, venue_id: str) -> list[int]:
    pids = snapshot.store.venue_papers.get(venue_id)
    if not pids:
        raise NotFoundError(f"unknown venue {venue_id!r}")
    visible = [pid for pid in pids if pid in snapshot.visible_papers]
    if not visible:
        raise NotFoundError(f"venue {venue_id!r} has no papers visible at t={snapshot.t}")
    return [snapshot.citation_count.get(pid, 0) for pid in visible]


def venue_h_index(snapshot: CorpusSnapshot, venue_id: str) -> int:
    return h_index(_venue_counts(snapshot, venue_id))


def venue_avg_citations(snapshot: CorpusSnapshot, venue_id: str) -> float:
    counts = _venue_counts(snapshot, venue_id)
    return sum(counts) / len(counts)


def venue_hit_ratio(snapshot: CorpusSnapshot, venue_id: str, threshold: int) -> float:
    """Fraction of the venue's visible papers with at least ``threshold`` citations."""
    counts = _venue_counts(snapshot, venue_id)
    return sum(1 for c in counts if c >= threshold) / len(counts)


def delta_h(
    store: CorpusStore,
    author_id: str,
    t: int,
    window: int = 3,
    snap_now: CorpusSnapshot | None = None,
    snap_past: CorpusSnapshot | None = None,
) -> int:
    """h-index growth over [t - window, t]; authors absent back then get h(t) - 0.

    Pass prebuilt snapshots to amortize the cost over many authors.
    """
    if snap_now is None:
        snap_now = build_snapshot(store, t, warn_empty=False)
    if snap_past is None:
        snap_past = build_snapshot(store, t - window, warn_empty=False)
    return author_h_index(snap_now, author_id) - author_h_index(snap_past, author_id)


@dataclass(frozen=True)
class DistributionReport:
    """Corpus-wide citation and h-index distribution summary at one snapshot."""

    t: int
    n_papers: int
    n_authors: int
    papers_over_50: int
    fraction_over_50: float
    authors_h_over_60: int
    citation_histogram: dict[int, int]
    h_histogram: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "n_papers": self.n_papers,
            "n_authors": self.n_authors,
            "papers_over_50": self.papers_over_50,
            "fraction_over_50": self.fraction_over_50,
            "authors_h_over_60": self.authors_h_over_60,
            "citation_histogram": {str(k): v for k, v in sorted(self.citation_histogram.items())},
            "h_histogram": {str(k): v for k, v in sorted(self.h_histogram.items())},
        }

    def to_text(self) -> str:
        lines = [
            f"t                 {self.t}",
            f"papers            {self.n_papers}",
            f"authors           {self.n_authors}",
            f"papers >50 cites  {self.papers_over_50} ({100.0 * self.fraction_over_50:.2f}%)",
            f"authors h>60      {self.authors_h_over_60}",
            "citation_histogram  count n_papers",
        ]
        lines += [f"  {k} {v}" for k, v in sorted(self.citation_histogram.items())]
        lines.append("h_histogram  h n_authors")
        lines += [f"  {k} {v}" for k, v in sorted(self.h_histogram.items())]
        return "\n".join(lines)


def distribution_stats(snapshot: CorpusSnapshot) -> DistributionReport:
    """Histograms plus the two headline tail counts (papers >50 cites, authors h>60)."""
    cite_hist: dict[int, int] = {}
    over_50 = 0
    for pid in snapshot.visible_papers:
        c = snapshot.citation_count.get(pid, 0)
        cite_hist[c] = cite_hist.get(c, 0) + 1
        if c > 50:
            over_50 += 1

    h_hist: dict[int, int] = {}
    over_60 = 0
    n_authors = 0
    for author_id, author in snapshot.store.authors.items():
        if not any(pid in snapshot.visible_papers for pid in author.paper_ids):
            continue
        n_authors += 1
        h = author_h_index(snapshot, author_id)
        h_hist[h] = h_hist.get(h, 0) + 1
        if h > 60:
            over_60 += 1

    n_papers = len(snapshot.visible_papers)
    return DistributionReport(
        t=snapshot.t,
        n_papers=n_papers,
        n_authors=n_authors,
        papers_over_50=over_50,
        fraction_over_50=(over_50 / n_papers) if n_papers else 0.0,
        authors_h_over_60=over_60,
        citation_histogram=cite_hist,
        h_histogram=h_hist,
    )
