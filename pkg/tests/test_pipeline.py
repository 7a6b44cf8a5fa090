import numpy as np
import pytest

from sciimpact import corpus, factorlab as fl, learners, pipeline, scholarmetrics as sm, synth
from sciimpact.pipeline import QueryValidationError


def test_corpus_from_path_cache_cycle(tmp_path):
    path = tmp_path / "corpus.txt"
    synth.write_corpus(path, synth.SynthConfig(n_authors=20, n_papers=60, seed=1))
    cache = tmp_path / "corpus.cache"
    store1, sum1 = pipeline.corpus_from_path(path, cache_path=cache)
    assert cache.exists()
    store2, sum2 = pipeline.corpus_from_path(path, cache_path=cache)
    assert sum1 == sum2
    assert store2.n_citation_edges == store1.n_citation_edges
    # source change invalidates the cache
    path.write_text(path.read_text() + "\n#*Extra\n#@Zed\n#t2012\n#index99999\n")
    store3, sum3 = pipeline.corpus_from_path(path, cache_path=cache)
    assert sum3 != sum1
    assert len(store3.papers) == len(store1.papers) + 1


def test_build_context_covers_all_visible_papers(small_store, small_context):
    ctx = small_context
    assert set(ctx.doc_topics) >= set(ctx.snapshot.visible_papers)
    assert ctx.popularity.shape == (ctx.model.k,)
    assert ctx.graph is not None and ctx.pagerank_scores
    for pid in list(ctx.snapshot.visible_papers)[:20]:
        theta = ctx.doc_topics[pid]
        assert theta.sum() == pytest.approx(1.0, abs=1e-9)
        assert (theta > 0).all()


def test_fold_in_is_content_seeded(small_store, small_context):
    """Re-folding a year-t paper reproduces the stored distribution exactly."""
    from sciimpact import topicmodel

    ctx = small_context
    year_t = [
        pid for pid in ctx.snapshot.visible_papers
        if small_store.papers[pid].year == ctx.snapshot.t
    ]
    pid = sorted(year_t)[0]
    rec = small_store.papers[pid]
    tokens = topicmodel.tokenize(rec.title, rec.abstract)
    redone = topicmodel.infer_doc_topics(ctx.model, tokens)
    assert np.array_equal(redone.probs, ctx.doc_topics[pid])


def test_build_context_joint_training(small_store):
    """With joint=True, year-t papers are trained on rather than folded in."""
    from sciimpact import topicmodel

    ctx = pipeline.build_context(small_store, t=2007, k=4, iterations=10, seed=3, joint=True)
    year_t = [p for p in ctx.snapshot.visible_papers if small_store.papers[p].year == 2007]
    assert year_t
    pid = sorted(year_t)[0]
    rec = small_store.papers[pid]
    tokens = topicmodel.tokenize(rec.title, rec.abstract)
    # in joint mode the stored theta comes from training, not from fold-in
    folded = topicmodel.infer_doc_topics(ctx.model, tokens)
    assert not np.array_equal(folded.probs, ctx.doc_topics[pid]) or len(tokens) == 0


def test_assemble_with_indicator_flags(small_store, small_context):
    ctx = small_context
    flagged = fl.FactorContext(
        snapshot=ctx.snapshot, snapshot_past=ctx.snapshot_past, model=ctx.model,
        doc_topics=ctx.doc_topics, popularity=ctx.popularity, authority=ctx.authority,
        graph=ctx.graph, pagerank_scores=ctx.pagerank_scores, include_flags=True,
    )
    spec = fl.DatasetSpec(t=2007, delta_t=4, set_name="new", min_h=0)
    pid = sorted(
        p for p in ctx.snapshot.visible_papers if small_store.papers[p].year == 2007
    )[0]
    factors = fl.assemble_factors(small_store.papers[pid], spec, flagged)
    assert tuple(factors) == fl.FACTORS_NEW + fl.FLAG_FACTORS
    for name in fl.FLAG_FACTORS:
        assert factors[name] in (0.0, 1.0)


def test_featurize_workers_equivalence(small_store, small_context):
    spec = fl.DatasetSpec(t=2007, delta_t=4, set_name="new", min_h=1)
    serial = pipeline.featurize_dataset(small_store, spec, small_context, workers=1)
    parallel = pipeline.featurize_dataset(small_store, spec, small_context, workers=2)
    assert serial == parallel


def test_author_examples_and_hindex_model(small_store):
    examples = pipeline.build_author_examples(small_store, 2007, 4)
    assert examples
    snap7 = corpus.build_snapshot(small_store, 2007)
    snap11 = corpus.build_snapshot(small_store, 2011)
    for ex in examples[:20]:
        assert ex.label == sm.author_h_index(snap11, ex.paper_id)
        assert ex.factors["h-index"] == sm.author_h_index(snap7, ex.paper_id)
        assert ex.label >= ex.factors["h-index"]  # h never decreases

    model = pipeline.train_hindex_model(examples, seed=3)
    assert model.kind == learners.KIND_LINEAR
    preds = pipeline.predicted_future_h(model, snap7, [ex.paper_id for ex in examples[:10]])
    for aid, value in preds.items():
        assert value >= sm.author_h_index(snap7, aid)  # clip contract


def test_author_examples_range_error(small_store):
    with pytest.raises(Exception, match="ends"):
        pipeline.build_author_examples(small_store, 2011, 5)


def test_validate_hindex_query():
    good = {
        "current_h": 5, "num_papers": 10, "avg_citations": 3.5,
        "num_coauthors": 4, "years_active": 6, "horizon_years": 5,
    }
    assert pipeline.validate_hindex_query(good)["current_h"] == 5
    for field_name, bad in [
        ("current_h", -1),
        ("horizon_years", 0),
        ("horizon_years", 11),
        ("avg_citations", -0.5),
        ("num_papers", 2.5),
    ]:
        payload = dict(good, **{field_name: bad})
        with pytest.raises(QueryValidationError) as err:
            pipeline.validate_hindex_query(payload)
        assert err.value.field == field_name
    with pytest.raises(QueryValidationError) as err:
        pipeline.validate_hindex_query({k: v for k, v in good.items() if k != "num_co" + "authors"})
    assert err.value.field == "num_coauthors"


@pytest.fixture(scope="module")
def bundle(small_store, small_context):
    spec = fl.DatasetSpec(t=2007, delta_t=4, set_name="new", min_h=1)
    examples = fl.build_dataset(small_store, spec, small_context)
    X, y, names, _ = fl.to_matrix(examples)
    impact = learners.fit_logistic_regression(X, y, feature_names=names, seed=1)
    author_examples = pipeline.build_author_examples(small_store, 2007, 4)
    hindex = pipeline.train_hindex_model(author_examples, seed=1)
    return pipeline.ArtifactBundle(
        store=small_store,
        corpus_checksum="f" * 64,
        t=2007,
        delta_t=4,
        context=small_context,
        impact_model=impact,
        hindex_models={4: hindex},
        versions={"impact": "vi", "hindex:4": "vh", "corpus": "f" * 12},
    )


def test_predict_hindex_query(bundle):
    out = pipeline.predict_hindex_query(
        bundle,
        {"current_h": 0, "num_papers": 0, "avg_citations": 0, "num_coauthors": 0,
         "years_active": 0, "horizon_years": 4},
    )
    assert out["horizon"] == 4 and out["model_version"] == "vh"
    assert out["predicted_h"] >= 0.0
    # an all-zero author scores the standardized intercept unless clipped at 0
    model = bundle.hindex_models[4]
    expected = learners.predict_linear(
        model,
        {"h-index": 0.0, "num-papers": 0.0, "num-citations": 0.0, "num-co": 0.0, "num-years": 0.0},
    )
    assert out["predicted_h"] == expected.value and out["clipped"] == expected.clipped

    with pytest.raises(QueryValidationError) as err:
        pipeline.predict_hindex_query(bundle, {**{
            "current_h": 1, "num_papers": 1, "avg_citations": 1.0,
            "num_coauthors": 1, "years_active": 1}, "horizon_years": 7})
    assert "horizon" in str(err.value)


def test_predict_hindex_clips_at_current_h(bundle):
    out = pipeline.predict_hindex_query(
        bundle,
        {"current_h": 500, "num_papers": 1, "avg_citations": 0, "num_coauthors": 0,
         "years_active": 0, "horizon_years": 4},
    )
    assert out["predicted_h"] == 500.0 and out["clipped"]


def _corpus_paper_query(store, ctx, paper_id):
    rec = store.papers[paper_id]
    return {
        "title": rec.title,
        "abstract": rec.abstract,
        "year": rec.year,
        "primary_mode": "max-h",
        "authors": [
            {"name": store.authors[a].name, "author_id": a} for a in rec.author_ids
        ],
        "venue": {"venue_id": rec.venue_id},
    }


def test_predict_paper_query_corpus_authors(small_store, small_context, bundle):
    year_t = sorted(
        pid for pid in small_context.snapshot.visible_papers
        if small_store.papers[pid].year == 2007
    )
    query = _corpus_paper_query(small_store, small_context, year_t[0])
    out = pipeline.predict_paper_query(bundle, query)
    assert 0.0 <= out["probability"] <= 1.0
    assert list(out["factor_breakdown"]) == list(fl.FACTORS_NEW)
    assert "no-references" in out["flags"]
    assert out["predicted_future_h"] is not None
    assert out["factor_contributions"]["intercept"] == bundle.impact_model.params["intercept"]
    # byte-for-byte reproducible
    again = pipeline.predict_paper_query(bundle, query)
    assert out == again


def test_predict_paper_query_factor_parity_with_corpus(small_store, small_context, bundle):
    """For a reference-less corpus paper, query factors equal dataset factors.

    The two A-*-ratio factors are the one deliberate exception: the dataset
    path excludes the target from its authors' prior-paper lists, while a
    what-if query has no corpus identity to exclude, so the query ratio runs
    over the full visible list.
    """
    spec = fl.DatasetSpec(t=2007, delta_t=4, set_name="new", min_h=0)
    refless = sorted(
        pid for pid in small_context.snapshot.visible_papers
        if small_store.papers[pid].year == 2007
        and not small_store.papers[pid].reference_ids
    )
    assert refless, "synthetic corpus should include reference-less papers at t"
    pid = refless[0]
    rec = small_store.papers[pid]
    offline = fl.assemble_factors(rec, spec, small_context)
    out = pipeline.predict_paper_query(bundle, _corpus_paper_query(small_store, small_context, pid))
    snap = small_context.snapshot
    for name in fl.FACTORS_NEW:
        if name in ("A-first-ratio", "A-max-ratio"):
            continue
        assert out["factor_breakdown"][name] == offline[name], name
    primary = fl.select_primary_author(rec, snap, "max-h")
    primary_h = sm.author_h_index(snap, primary)
    for name, author in (("A-first-ratio", rec.author_ids[0]), ("A-max-ratio", primary)):
        full_prior = [
            snap.citation_count.get(p, 0)
            for p in small_store.authors[author].paper_ids
            if p in snap.visible_papers
        ]
        assert out["factor_breakdown"][name] == pytest.approx(
            fl.ratio_at_least(full_prior, primary_h)
        ), name


def test_predict_paper_query_manual_author_and_venue(bundle):
    query = {
        "title": "A manual what-if paper",
        "abstract": "entirely new words not in the vocabulary",
        "year": 2007,
        "primary_mode": "first",
        "authors": [
            {"name": "Stranger", "manual": {"h": 4, "prior_citations": [9, 4, 1], "delta_h": 2}},
        ],
        "venue": {"manual": {"h_index": 12.0, "avg_citations": 7.5}},
    }
    out = pipeline.predict_paper_query(bundle, query)
    fb = out["factor_breakdown"]
    assert fb["A-first-max"] == 4.0
    assert fb["A-max-ratio"] == pytest.approx(2 / 3)  # prior papers cited [9, 4, 1] vs h=4
    assert fb["V-h-index"] == 12.0 and fb["V-citation"] == 7.5
    assert fb["T-h-first"] == 2.0
    assert fb["S-degree"] == 0.0
    assert "all-tokens-out-of-vocabulary" in out["flags"]


def test_predict_paper_query_validation_errors(bundle):
    base = {
        "title": "x", "abstract": "", "year": 2007, "primary_mode": "max-h",
        "authors": [{"name": "A", "manual": {"h": 1}}], "venue": "Venue A0",
    }
    with pytest.raises(QueryValidationError) as err:
        pipeline.predict_paper_query(bundle, {**base, "title": " ", "abstract": ""})
    assert err.value.field == "title"
    with pytest.raises(QueryValidationError) as err:
        pipeline.predict_paper_query(bundle, {**base, "authors": []})
    assert err.value.field == "authors"
    with pytest.raises(QueryValidationError) as err:
        pipeline.predict_paper_query(
            bundle, {**base, "authors": [{"name": "Ghost Writer"}]}
        )
    assert "Ghost Writer" in str(err.value)
    with pytest.raises(QueryValidationError) as err:
        pipeline.predict_paper_query(
            bundle, {**base, "authors": [{"name": "G", "author_id": "not-a-real-id"}]}
        )
    assert "not-a-real-id" in str(err.value)
