"""Corpus ingestion and impact metrics, end to end on synthetic data.

Generates a small seeded corpus in the tag-prefixed flat format, parses it
into the immutable store, and walks through snapshots, h-indices, author
profiles, venue metrics, and the corpus-wide distribution summary.

Run with:  python demos/01_corpus_and_metrics.py
"""

import tempfile
from pathlib import Path

from sciimpact import corpus, scholarmetrics as sm, synth

workdir = Path(tempfile.mkdtemp(prefix="sciimpact-demo-"))
corpus_path = workdir / "corpus.txt"

# ~70 authors, ~260 papers, preferential-attachment citations, one seed
synth.write_corpus(corpus_path, synth.SynthConfig(n_authors=70, n_papers=260, seed=5))
print(f"wrote synthetic corpus to {corpus_path}")
print()

store = corpus.parse_corpus(corpus_path.read_text())
report = corpus.validate_corpus(store)
print("validation summary")
print(report.to_text())
print()

# The corpus "as observed" in two different years. Citations are dated by
# the citing paper's publication year, so counts only ever grow.
for t in (2002, 2007, 2012):
    snap = corpus.build_snapshot(store, t)
    total = sum(snap.citation_count.values())
    print(f"t={t}: {len(snap.visible_papers):4d} visible papers, {total:5d} citation edges")
print()

snap = corpus.build_snapshot(store, 2007)

# The most prolific author's profile at 2007
busiest = max(store.authors.values(), key=lambda a: len(a.paper_ids))
profile = sm.author_profile(snap, busiest.author_id)
print(f"busiest author: {busiest.name}")
print(f"  h-index {profile.h_index}, {profile.num_papers} papers, "
      f"{profile.num_citations:.1f} mean citations, {profile.num_co} co-authors, "
      f"{profile.num_years} years active")
print(f"  h-index growth over the last 3 years: "
      f"{sm.delta_h(store, busiest.author_id, 2007)}")
print()

# Venue metrics for the venue with the most visible papers
venue = max(store.venue_papers, key=lambda v: len(store.venue_papers[v]))
print(f"venue {store.venues[venue]!r}:")
print(f"  h-index {sm.venue_h_index(snap, venue)}, "
      f"mean citations {sm.venue_avg_citations(snap, venue):.2f}, "
      f"share with >=5 citations {sm.venue_hit_ratio(snap, venue, 5):.2f}")
print()

# Tail statistics of the citation and h-index distributions
dist = sm.distribution_stats(snap)
print(f"at t=2007: {dist.papers_over_50} papers above 50 citations "
      f"({100 * dist.fraction_over_50:.2f}%), "
      f"{dist.authors_h_over_60} authors with h-index above 60")
top = sorted(dist.h_histogram.items())[-3:]
print(f"highest h-index buckets: {top}")
