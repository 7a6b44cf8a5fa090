"""Shared fixtures: a small seeded synthetic corpus and prebuilt artifacts."""

import pytest

from sciimpact import corpus, factorlab, pipeline, synth

SMALL = synth.SynthConfig(n_authors=70, n_papers=260, seed=5, refless_rate=0.08)


@pytest.fixture(scope="session")
def small_store() -> corpus.CorpusStore:
    return corpus.parse_corpus(synth.generate_corpus_text(SMALL))


@pytest.fixture(scope="session")
def small_context(small_store) -> factorlab.FactorContext:
    return pipeline.build_context(small_store, t=2007, k=6, iterations=30, seed=11)
