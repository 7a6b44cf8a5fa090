"""The what-if prediction service, queried over HTTP.

Trains the future h-index regressor and a contribution classifier on the
synthetic corpus, starts the HTTP service on a free port, and exercises all
three endpoints the way the web UI does, including a venue what-if.

Run with:  python demos/04_whatif_service.py
"""

import json
import threading
import urllib.request

from sciimpact import corpus, factorlab, learners, pipeline, service, synth

store = corpus.parse_corpus(synth.generate_corpus_text(
    synth.SynthConfig(n_authors=70, n_papers=260, seed=5)
))
ctx = pipeline.build_context(store, t=2007, k=8, iterations=60, seed=11)

spec = factorlab.DatasetSpec(t=2007, delta_t=4, mode="max-h", set_name="new", min_h=1)
examples = factorlab.build_dataset(store, spec, ctx)
X, y, names, _ = factorlab.to_matrix(examples)
impact = learners.fit_logistic_regression(X, y, feature_names=names, seed=1)

author_examples = pipeline.build_author_examples(store, 2007, 4)
hindex = pipeline.train_hindex_model(author_examples, seed=1)

bundle = pipeline.ArtifactBundle(
    store=store, corpus_checksum="demo", t=2007, delta_t=4, context=ctx,
    impact_model=impact, hindex_models={4: hindex},
    versions={"impact": "demo-impact", "hindex:4": "demo-h4", "corpus": "demo"},
)

server = service.make_server(bundle, "127.0.0.1", 0)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.server_address[1]}"
print(f"service listening at {base}")


def call(path, payload=None):
    if payload is None:
        with urllib.request.urlopen(base + path) as resp:
            return json.loads(resp.read())
    req = urllib.request.Request(
        base + path, data=json.dumps(payload).encode(),
        headers={"Content-Type": "application/json"}, method="POST",
    )
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())


print("\nGET /api/v1/health")
print(json.dumps(call("/api/v1/health"), indent=2))

print("\nPOST /api/v1/predict/hindex  (mid-career author, 4-year horizon)")
answer = call("/api/v1/predict/hindex", {
    "current_h": 8, "num_papers": 25, "avg_citations": 11.0,
    "num_coauthors": 14, "years_active": 7, "horizon_years": 4,
})
print(f"  predicted h in 4 years: {answer['predicted_h']:.2f} "
      f"(clipped: {answer['clipped']})")

# A what-if paper with one corpus author and one manual newcomer
prolific = max(store.authors.values(), key=lambda a: len(a.paper_ids))
paper = {
    "title": store.papers[prolific.paper_ids[0]].title,
    "abstract": store.papers[prolific.paper_ids[0]].abstract,
    "year": 2007,
    "primary_mode": "max-h",
    "authors": [
        {"name": prolific.name, "author_id": prolific.author_id},
        {"name": "Fresh Coauthor", "manual": {"h": 1, "prior_citations": [2], "delta_h": 1}},
    ],
    "venue": {"manual": {"h_index": 4.0, "avg_citations": 2.0}},
}
print("\nPOST /api/v1/predict/paper  (modest venue)")
low = call("/api/v1/predict/paper", paper)
print(f"  probability {low['probability']:.3f}, primary author "
      f"{low['primary_author']['name']}, flags {low['flags']}")

print("\nPOST /api/v1/predict/paper  (same paper, prestigious venue)")
paper["venue"] = {"manual": {"h_index": 25.0, "avg_citations": 14.0}}
high = call("/api/v1/predict/paper", paper)
print(f"  probability {high['probability']:.3f} "
      f"({'+' if high['probability'] >= low['probability'] else '-'} vs modest venue)")

strongest = sorted(
    (k for k, v in high["factor_contributions"].items() if k != "intercept"),
    key=lambda k: -abs(high["factor_contributions"][k]),
)[:5]
print("\n  largest factor contributions to the score:")
for name in strongest:
    print(f"    {name:18s} {high['factor_contributions'][name]:+.3f}")

server.shutdown()
server.server_close()
