"""Seeded synthetic citation corpus for tests and demos.

The generator produces a small scholarly world with the stylized features
the real data shows: a heavy-tailed author activity distribution, venue
prestige tiers, topic-structured text, and preferential-attachment
citations (papers that already have citations attract more; prestigious
venues and topical kinship help). Everything is driven by one seed, so a
given configuration always yields byte-identical corpus text.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import write_aminer


@dataclass(frozen=True)
class SynthConfig:
    n_authors: int = 500
    n_papers: int = 3000
    year_min: int = 1994
    year_max: int = 2012
    n_venues: int = 30
    n_topics: int = 8
    words_per_topic: int = 40
    refless_rate: float = 0.02  # papers that cite nothing at all
    seed: int = 7


_SYLLABLES = (
    "ba be bi bo bu da de di do du ka ke ki ko ku la le li lo lu ma me mi mo "
    "mu na ne ni no nu ra re ri ro ru sa se si so su ta te ti to tu va ve vi "
    "vo vu za ze zi zo zu"
).split()


def _topic_vocab(rng: np.random.Generator, n_topics: int, words_per_topic: int) -> list[list[str]]:
    vocabs: list[list[str]] = []
    seen: set[str] = set()
    for _ in range(n_topics):
        words: list[str] = []
        while len(words) < words_per_topic:
            n_syl = int(rng.integers(2, 4))
            word = "".join(rng.choice(_SYLLABLES) for _ in range(n_syl))
            if word not in seen:
                seen.add(word)
                words.append(word)
        vocabs.append(words)
    return vocabs


def generate_records(config: SynthConfig = SynthConfig()) -> list[dict]:
    """Return corpus records (dicts compatible with :func:`write_aminer`)."""
    rng = np.random.default_rng(config.seed)
    cfg = config

    author_names = [f"Author {i:04d}" for i in range(cfg.n_authors)]
    activity = 1.0 / np.arange(1, cfg.n_authors + 1) ** 0.85
    activity /= activity.sum()

    # a couple of raw venue strings exercise the casefold/trim normalization
    venue_names = [f"Venue {chr(ord('A') + i % 26)}{i // 26}" for i in range(cfg.n_venues)]
    venue_prestige = 1.0 / np.arange(1, cfg.n_venues + 1) ** 0.7
    venue_prestige /= venue_prestige.sum()

    vocabs = _topic_vocab(rng, cfg.n_topics, cfg.words_per_topic)
    author_home_topic = rng.integers(0, cfg.n_topics, size=cfg.n_authors)

    years = np.arange(cfg.year_min, cfg.year_max + 1)
    growth = 1.12 ** np.arange(len(years))
    per_year = np.maximum(1, np.round(cfg.n_papers * growth / growth.sum()).astype(int))

    records: list[dict] = []
    paper_topic: list[int] = []
    paper_year: list[int] = []
    paper_venue: list[int] = []
    citations_so_far: list[int] = []
    pid = 0

    for year, n_year in zip(years, per_year):
        for _ in range(n_year):
            lead = int(rng.choice(cfg.n_authors, p=activity))
            team_size = int(rng.integers(1, 6))
            team = [lead]
            while len(team) < team_size:
                cand = int(rng.choice(cfg.n_authors, p=activity))
                if cand not in team:
                    team.append(cand)

            topic = int(author_home_topic[lead]) if rng.random() < 0.75 else int(rng.integers(cfg.n_topics))
            venue = int(rng.choice(cfg.n_venues, p=venue_prestige))

            n_prior = pid
            refs: list[int] = []
            if n_prior > 0 and rng.random() > cfg.refless_rate:
                weights = np.asarray(citations_so_far[:n_prior], dtype=float) + 1.0
                topical = np.asarray(paper_topic[:n_prior]) == topic
                weights *= np.where(topical, 3.0, 1.0)
                age = year - np.asarray(paper_year[:n_prior])
                weights *= np.exp(-0.35 * np.maximum(age, 0))
                weights /= weights.sum()
                n_refs = min(n_prior, int(rng.poisson(7)) + 1)
                refs = [int(r) for r in rng.choice(n_prior, size=n_refs, replace=False, p=weights)]
                for r in refs:
                    citations_so_far[r] += 1

            title_words = [vocabs[topic][int(i)] for i in rng.integers(0, cfg.words_per_topic, size=5)]
            body_topic = topic if rng.random() < 0.85 else int(rng.integers(cfg.n_topics))
            abstract_words = [
                vocabs[body_topic if rng.random() < 0.8 else topic][int(i)]
                for i in rng.integers(0, cfg.words_per_topic, size=30)
            ]

            records.append(
                {
                    "paper_id": str(pid),
                    "title": " ".join(title_words),
                    "abstract": " ".join(abstract_words),
                    "authors": [author_names[a] for a in team],
                    "venue": venue_names[venue] + ("  " if venue % 7 == 0 else ""),
                    "year": int(year),
                    "references": [str(r) for r in refs],
                }
            )
            paper_topic.append(topic)
            paper_year.append(int(year))
            paper_venue.append(venue)
            citations_so_far.append(0)
            pid += 1

    return records


def generate_corpus_text(config: SynthConfig = SynthConfig()) -> str:
    return write_aminer(generate_records(config))


def write_corpus(path, config: SynthConfig = SynthConfig()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(generate_corpus_text(config))
