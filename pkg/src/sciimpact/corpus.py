"""Citation corpus: flat-file parsing, immutable store, time-filtered snapshots.

The input format is the tag-prefixed flat file used by the big public
citation dumps: one record per blank-line-separated block, UTF-8, with

    #*  title (required)
    #@  authors, semicolon-separated, order preserved
    #t  publication year (required)
    #c  venue
    #index  paper id (required)
    #%  one reference id per line, repeatable
    #!  abstract (optional; bare continuation lines are appended)

Everything downstream works against :class:`CorpusStore` (immutable after
construction) and :class:`CorpusSnapshot` (the corpus as observed at year t).
"""

from __future__ import annotations

import hashlib
import io
import pickle
import warnings
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Mapping

from .errors import CacheError, CorpusFormatError, NotVisibleError

CACHE_MAGIC = b"SIMCORP\x01"
CACHE_VERSION = 2


@dataclass(frozen=True, slots=True)
class PaperRecord:
    """One publication. ``author_ids`` is ordered; index 0 is the first author."""

    paper_id: str
    title: str
    abstract: str
    author_ids: tuple[str, ...]
    venue_id: str
    year: int
    reference_ids: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class AuthorRecord:
    author_id: str
    name: str
    paper_ids: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class ParseIssue:
    line: int
    message: str


class CorpusStore:
    """Immutable paper/author/venue store with an inverse citation index.

    ``in_citations[p]`` lists ``(citing_paper_id, citing_year)`` pairs; a
    citation carries the *citing* paper's publication year because the data
    has no finer timestamp. References to ids absent from the dump are
    counted as dangling and never enter the index.
    """

    def __init__(
        self,
        papers: dict[str, PaperRecord],
        authors: dict[str, AuthorRecord],
        venues: dict[str, str],
        in_citations: dict[str, list[tuple[str, int]]],
        dangling_references: int = 0,
        parse_issues: tuple[ParseIssue, ...] = (),
    ):
        self.papers = papers
        self.authors = authors
        self.venues = venues
        self.in_citations = in_citations
        self.dangling_references = dangling_references
        self.parse_issues = parse_issues

        venue_papers: dict[str, list[str]] = {}
        for pid, rec in papers.items():
            if rec.venue_id:
                venue_papers.setdefault(rec.venue_id, []).append(pid)
        self.venue_papers = venue_papers

        years = [rec.year for rec in papers.values()]
        self.year_min = min(years) if years else 0
        self.year_max = max(years) if years else 0

    @property
    def n_citation_edges(self) -> int:
        return sum(len(v) for v in self.in_citations.values())

    def author_papers(self, author_id: str) -> tuple[str, ...]:
        return self.authors[author_id].paper_ids


@dataclass
class CorpusSnapshot:
    """The corpus restricted to papers published by year ``t``.

    ``citation_count`` counts only citations from citing papers with
    year <= t; visible papers without entries are uncited. The snapshot is
    a view over the shared store, safe for concurrent reads.
    """

    t: int
    store: CorpusStore
    visible_papers: frozenset[str]
    citation_count: dict[str, int]
    _author_h: dict[str, int] = field(default_factory=dict, repr=False)

    def is_visible(self, paper_id: str) -> bool:
        return paper_id in self.visible_papers


class EmptySnapshotWarning(UserWarning):
    pass


def parse_corpus(source: bytes | str | BinaryIO | io.TextIOBase) -> CorpusStore:
    """Parse a flat-format dump into a :class:`CorpusStore`.

    Malformed records (missing title, year, or id, or a duplicate id) are
    skipped and reported with their line numbers via ``store.parse_issues``.
    Reference lists are deduplicated and self-references dropped. Authors
    are deduplicated by exact name into sequential ids, venues by
    casefolded/trimmed name; both assignments are deterministic, so parsing
    the same bytes twice yields identical stores.
    """
    text = _read_source(source)
    if not text.strip():
        raise CorpusFormatError("empty corpus source")

    papers: dict[str, PaperRecord] = {}
    issues: list[ParseIssue] = []
    author_ids: dict[str, str] = {}
    author_names: dict[str, str] = {}
    author_papers: dict[str, list[str]] = {}
    venues: dict[str, str] = {}

    for first_line, block in _blocks(text):
        rec, problem = _parse_block(first_line, block)
        if problem is not None:
            issues.append(problem)
            continue
        assert rec is not None
        if rec["paper_id"] in papers:
            issues.append(ParseIssue(first_line, f"duplicate paper id {rec['paper_id']}"))
            continue

        ids: list[str] = []
        for name in rec["authors"]:
            aid = author_ids.get(name)
            if aid is None:
                aid = f"a{len(author_ids)}"
                author_ids[name] = aid
                author_names[aid] = name
                author_papers[aid] = []
            ids.append(aid)
            author_papers[aid].append(rec["paper_id"])

        venue_id = rec["venue"].strip().casefold()
        if venue_id and venue_id not in venues:
            venues[venue_id] = rec["venue"].strip()

        papers[rec["paper_id"]] = PaperRecord(
            paper_id=rec["paper_id"],
            title=rec["title"],
            abstract=rec["abstract"],
            author_ids=tuple(ids),
            venue_id=venue_id,
            year=rec["year"],
            reference_ids=tuple(rec["references"]),
        )

    in_citations: dict[str, list[tuple[str, int]]] = {}
    dangling = 0
    for rec in papers.values():
        for ref in rec.reference_ids:
            if ref in papers:
                in_citations.setdefault(ref, []).append((rec.paper_id, rec.year))
            else:
                dangling += 1

    authors = {
        aid: AuthorRecord(aid, author_names[aid], tuple(pids))
        for aid, pids in author_papers.items()
    }
    return CorpusStore(papers, authors, venues, in_citations, dangling, tuple(issues))


def _read_source(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8", errors="replace")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8", errors="replace")
    return data


def _blocks(text: str) -> Iterable[tuple[int, list[str]]]:
    """Yield (first line number, lines) for each blank-line-separated block."""
    block: list[str] = []
    start = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            if not block:
                start = lineno
            block.append(line)
        elif block:
            yield start, block
            block = []
    if block:
        yield start, block


def _parse_block(first_line: int, lines: list[str]):
    title = ""
    abstract_parts: list[str] = []
    authors: list[str] = []
    venue = ""
    year: int | None = None
    paper_id = ""
    references: list[str] = []
    in_abstract = False

    for line in lines:
        tag = line[:2]
        body = line[2:].strip()
        if tag == "#*":
            title = body
            in_abstract = False
        elif tag == "#@":
            authors = [a.strip() for a in body.split(";") if a.strip()]
            in_abstract = False
        elif tag == "#t":
            try:
                year = int(body)
            except ValueError:
                year = None
            in_abstract = False
        elif tag == "#c":
            venue = body
            in_abstract = False
        elif tag == "#%":
            if body:
                references.append(body)
            in_abstract = False
        elif tag == "#!":
            abstract_parts.append(body)
            in_abstract = True
        elif line.startswith("#index"):
            paper_id = line[len("#index"):].strip()
            in_abstract = False
        elif not line.startswith("#") and in_abstract:
            abstract_parts.append(line.strip())
        # any other tag: ignored

    if not title:
        return None, ParseIssue(first_line, "missing title")
    if year is None or year <= 0:
        return None, ParseIssue(first_line, "missing or invalid year")
    if not paper_id:
        return None, ParseIssue(first_line, "missing paper id")

    deduped: list[str] = []
    seen: set[str] = set()
    for ref in references:
        if ref != paper_id and ref not in seen:
            seen.add(ref)
            deduped.append(ref)

    return (
        {
            "paper_id": paper_id,
            "title": title,
            "abstract": " ".join(p for p in abstract_parts if p),
            "authors": authors,
            "venue": venue,
            "year": year,
            "references": deduped,
        },
        None,
    )


def build_snapshot(store: CorpusStore, t: int, warn_empty: bool = True) -> CorpusSnapshot:
    """Materialize the corpus as observed at year ``t``.

    Papers with year > t are invisible and uncounted. A ``t`` before the
    earliest publication yields a valid empty snapshot (with a warning).
    """
    visible = frozenset(pid for pid, rec in store.papers.items() if rec.year <= t)
    if not visible and warn_empty:
        warnings.warn(f"snapshot at {t} precedes every publication", EmptySnapshotWarning)
    counts: dict[str, int] = {}
    for pid in visible:
        citers = store.in_citations.get(pid)
        if not citers:
            continue
        c = sum(1 for _, year in citers if year <= t)
        if c:
            counts[pid] = c
    return CorpusSnapshot(t=t, store=store, visible_papers=visible, citation_count=counts)


def citation_count_at(snapshot: CorpusSnapshot, paper_id: str) -> int:
    """Cumulative citations of a visible paper at the snapshot year (0 if uncited)."""
    if paper_id not in snapshot.visible_papers:
        raise NotVisibleError(f"paper {paper_id!r} not visible at t={snapshot.t}")
    return snapshot.citation_count.get(paper_id, 0)


@dataclass(frozen=True)
class ValidationReport:
    n_papers: int
    n_authors: int
    n_venues: int
    n_citation_edges: int
    dangling_references: int
    papers_missing_abstract: int
    papers_empty_authors: int
    year_min: int
    year_max: int
    parse_issues: int

    @property
    def n_defects(self) -> int:
        return self.dangling_references + self.papers_empty_authors + self.parse_issues

    def to_dict(self) -> dict:
        return {
            "n_papers": self.n_papers,
            "n_authors": self.n_authors,
            "n_venues": self.n_venues,
            "n_citation_edges": self.n_citation_edges,
            "dangling_references": self.dangling_references,
            "papers_missing_abstract": self.papers_missing_abstract,
            "papers_empty_authors": self.papers_empty_authors,
            "year_min": self.year_min,
            "year_max": self.year_max,
            "parse_issues": self.parse_issues,
        }

    def to_text(self) -> str:
        d = self.to_dict()
        width = max(len(k) for k in d)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in d.items())


def validate_corpus(store: CorpusStore) -> ValidationReport:
    """Report-only integrity summary; never raises."""
    missing_abs = sum(1 for r in store.papers.values() if not r.abstract)
    empty_auth = sum(1 for r in store.papers.values() if not r.author_ids)
    return ValidationReport(
        n_papers=len(store.papers),
        n_authors=len(store.authors),
        n_venues=len(store.venues),
        n_citation_edges=store.n_citation_edges,
        dangling_references=store.dangling_references,
        papers_missing_abstract=missing_abs,
        papers_empty_authors=empty_auth,
        year_min=store.year_min,
        year_max=store.year_max,
        parse_issues=len(store.parse_issues),
    )


def source_checksum(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def save_cache(store: CorpusStore, path, checksum: str) -> None:
    """Persist the store as a versioned binary cache keyed to its source checksum."""
    payload = {
        "papers": store.papers,
        "authors": store.authors,
        "venues": store.venues,
        "in_citations": store.in_citations,
        "dangling_references": store.dangling_references,
        "parse_issues": store.parse_issues,
    }
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(CACHE_VERSION.to_bytes(2, "big"))
        digest = bytes.fromhex(checksum)
        fh.write(len(digest).to_bytes(2, "big"))
        fh.write(digest)
        pickle.dump(payload, fh, protocol=4)


def load_cache(path, expected_checksum: str | None = None) -> CorpusStore:
    """Load a cached store; raises :class:`CacheError` on any mismatch."""
    with open(path, "rb") as fh:
        magic = fh.read(len(CACHE_MAGIC))
        if magic != CACHE_MAGIC:
            raise CacheError(f"{path}: not a corpus cache (bad magic)")
        version = int.from_bytes(fh.read(2), "big")
        if version != CACHE_VERSION:
            raise CacheError(f"{path}: cache format v{version}, expected v{CACHE_VERSION}")
        n = int.from_bytes(fh.read(2), "big")
        digest = fh.read(n).hex()
        if expected_checksum is not None and digest != expected_checksum:
            raise CacheError(f"{path}: source checksum changed, cache is stale")
        payload = pickle.load(fh)
    return CorpusStore(
        papers=payload["papers"],
        authors=payload["authors"],
        venues=payload["venues"],
        in_citations=payload["in_citations"],
        dangling_references=payload["dangling_references"],
        parse_issues=payload["parse_issues"],
    )


def write_aminer(records: Iterable[Mapping], path=None) -> str:
    """Serialize record dicts back to the flat tag format (testing/synthesis aid).

    Each record needs: paper_id, title, authors (names), venue, year,
    references, abstract.
    """
    out: list[str] = []
    for rec in records:
        out.append(f"#*{rec['title']}")
        if rec.get("authors"):
            out.append("#@" + ";".join(rec["authors"]))
        out.append(f"#t{rec['year']}")
        if rec.get("venue"):
            out.append(f"#c{rec['venue']}")
        out.append(f"#index{rec['paper_id']}")
        for ref in rec.get("references", ()):
            out.append(f"#%{ref}")
        if rec.get("abstract"):
            out.append(f"#!{rec['abstract']}")
        out.append("")
    text = "\n".join(out)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
