"""Topic modeling and the full factor vector for one paper.

Builds every year-2007 artifact (topic model, per-document distributions,
popularity and authority tables, collaboration graph), then assembles the
24-factor vector for a paper published exactly at the observation year.

Run with:  python demos/02_topics_and_factors.py
"""

import numpy as np

from sciimpact import corpus, factorlab, pipeline, synth, topicmodel

store = corpus.parse_corpus(synth.generate_corpus_text(
    synth.SynthConfig(n_authors=70, n_papers=260, seed=5)
))

# One call builds the whole context; the topic model trains on papers
# published before 2007 and papers from 2007 itself are folded in.
ctx = pipeline.build_context(store, t=2007, k=8, iterations=60, seed=11)
print(f"topic model: k={ctx.model.k}, vocabulary of {ctx.model.v} words")
for z, words in enumerate(ctx.model.top_words(6)):
    print(f"  topic {z}: {' '.join(words)}")
print()

# Per-topic citation mass ("which topics attract citations right now")
order = np.argsort(-ctx.popularity)
print("citation-weighted topic popularity:")
for z in order[:4]:
    print(f"  topic {z}: {ctx.popularity[z]:8.2f}")
print()

# Pick a 2007 paper and walk through its content factors
pid = sorted(p for p in ctx.snapshot.visible_papers if store.papers[p].year == 2007)[0]
rec = store.papers[pid]
theta = ctx.doc_topics[pid]
print(f"paper {pid}: {rec.title!r}")
print(f"  topic distribution peaks at topic {int(np.argmax(theta))} "
      f"(p={theta.max():.2f})")
print(f"  popularity  {topicmodel.c_popularity(theta, ctx.popularity):9.2f}")
refs = [ctx.doc_topics[r] for r in rec.reference_ids if r in ctx.snapshot.visible_papers]
print(f"  novelty     {topicmodel.c_novelty(theta, refs):9.4f}  (mean KL to {len(refs)} references)")
print(f"  diversity   {topicmodel.c_diversity(theta):9.4f}  (entropy, max {np.log(ctx.model.k):.4f})")
first = rec.author_ids[0]
print(f"  authority of first author {store.authors[first].name}: "
      f"{topicmodel.c_authority(theta, ctx.authority.vector(first)):.2f}")
print()

# The full factor vector the classifiers consume
spec = factorlab.DatasetSpec(t=2007, delta_t=4, mode="max-h", set_name="new", min_h=0)
factors = factorlab.assemble_factors(rec, spec, ctx)
print(f"assembled {len(factors)} factors:")
for name, value in factors.items():
    print(f"  {name:18s} {value:10.4f}")
