"""Topic model and content factors.

A collapsed Gibbs sampler fits a K-topic model over tokenized titles and
abstracts. From the per-document topic distributions p(z|d) and snapshot
citation counts, four content factors are derived for a target paper d_t:

* popularity: corpus-wide citation mass per topic, projected onto d_t;
* novelty: mean KL divergence from d_t to each of its references;
* diversity: Shannon entropy of d_t's topic distribution;
* authority: an author's citation mass per topic, projected onto d_t.

All outputs are Dirichlet-smoothed, so every distribution is strictly
positive and the KL terms are always defined. Fixed seeds give bit-identical
models; unseeded fold-in derives its seed from the token content so the same
text always lands on the same distribution, no matter which process asks.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .corpus import CorpusSnapshot
from .errors import DependencyError, DimensionError, DomainError, EmptyCorpusError
from .stopwords import STOPWORDS

MODEL_MAGIC = b"SITOPIC\x01"
MODEL_VERSION = 1

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(title: str, abstract: str = "") -> list[str]:
    """Case-folded alphanumeric tokens of length >= 2, stopwords removed."""
    text = f"{title} {abstract}".casefold()
    return [tok for tok in _TOKEN_RE.findall(text) if len(tok) >= 2 and tok not in STOPWORDS]


@dataclass
class TopicModel:
    """Fitted topic model; immutable after training."""

    k: int
    vocabulary: dict[str, int]
    topic_word_counts: np.ndarray  # K x V
    topic_totals: np.ndarray  # K
    alpha: float
    beta: float
    seed: int

    @property
    def v(self) -> int:
        return len(self.vocabulary)

    @property
    def topic_word(self) -> np.ndarray:
        """Smoothed K x V word distributions; each row sums to 1."""
        num = self.topic_word_counts + self.beta
        return num / num.sum(axis=1, keepdims=True)

    def top_words(self, n: int = 10) -> list[list[str]]:
        inv = {i: w for w, i in self.vocabulary.items()}
        rows = []
        for z in range(self.k):
            order = np.argsort(-self.topic_word_counts[z], kind="stable")[:n]
            rows.append([inv[int(i)] for i in order])
        return rows


class InferredTopics(NamedTuple):
    probs: np.ndarray
    all_oov: bool


def fit_lda(
    docs: Sequence[Sequence[str]],
    k: int = 100,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 500,
    seed: int = 0,
) -> tuple[TopicModel, list[np.ndarray]]:
    """Collapsed Gibbs sampling over tokenized documents.

    Returns the model and one smoothed topic distribution per input document
    (empty documents get the uniform prior). alpha defaults to 50/k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if alpha is None:
        alpha = 50.0 / k

    vocab = {w: i for i, w in enumerate(sorted({w for doc in docs for w in doc}))}
    if not vocab:
        raise EmptyCorpusError("no tokens survive tokenization; cannot fit a topic model")

    doc_of: list[int] = []
    word_of: list[int] = []
    for d, doc in enumerate(docs):
        for w in doc:
            doc_of.append(d)
            word_of.append(vocab[w])
    doc_idx = np.asarray(doc_of, dtype=np.int32)
    word_idx = np.asarray(word_of, dtype=np.int32)
    n_tokens = len(word_idx)
    n_docs = len(docs)
    v = len(vocab)

    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=n_tokens, dtype=np.int32)

    # V x K / D x K layouts keep the per-token slices contiguous
    nwz = np.zeros((v, k), dtype=np.float64)
    ndz = np.zeros((n_docs, k), dtype=np.float64)
    np.add.at(nwz, (word_idx, z), 1.0)
    np.add.at(ndz, (doc_idx, z), 1.0)
    nz = nwz.sum(axis=0)

    # sampling weights read from prior-shifted copies maintained incrementally;
    # the +-1 updates can drift from a fresh (count + prior) by ~1e-13, which
    # perturbs the sampled distribution immaterially and stays deterministic
    vbeta = v * beta
    nwz_b = nwz + beta
    ndz_a = ndz + alpha
    nz_v = nz + vbeta
    buf = np.empty(k)
    for _ in range(iterations):
        uniforms = rng.random(n_tokens)
        for i in range(n_tokens):
            w = word_idx[i]
            d = doc_idx[i]
            topic = z[i]
            row_w = nwz_b[w]
            row_d = ndz_a[d]
            row_w[topic] -= 1.0
            row_d[topic] -= 1.0
            nz_v[topic] -= 1.0

            np.multiply(row_w, row_d, out=buf)
            np.divide(buf, nz_v, out=buf)
            np.cumsum(buf, out=buf)
            topic = int(np.searchsorted(buf, uniforms[i] * buf[-1], side="right"))
            if topic >= k:  # numeric edge when the draw hits the total exactly
                topic = k - 1

            z[i] = topic
            row_w[topic] += 1.0
            row_d[topic] += 1.0
            nz_v[topic] += 1.0

    # exact integer counts recovered from the final assignments
    nwz[:] = 0.0
    ndz[:] = 0.0
    np.add.at(nwz, (word_idx, z), 1.0)
    np.add.at(ndz, (doc_idx, z), 1.0)
    nz = nwz.sum(axis=0)

    model = TopicModel(
        k=k,
        vocabulary=vocab,
        topic_word_counts=nwz.T.astype(np.int64).copy(),
        topic_totals=nz.astype(np.int64).copy(),
        alpha=alpha,
        beta=beta,
        seed=seed,
    )
    doc_lengths = ndz.sum(axis=1, keepdims=True)
    thetas = (ndz + alpha) / (doc_lengths + k * alpha)
    return model, [thetas[d] for d in range(n_docs)]


def content_seed(model_seed: int, tokens: Iterable[str]) -> int:
    """Deterministic fold-in seed derived from the model seed and token content."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(model_seed).encode())
    for tok in tokens:
        h.update(b"\x00")
        h.update(tok.encode())
    return int.from_bytes(h.digest(), "big") % (2**32)


def infer_doc_topics(
    model: TopicModel,
    tokens: Sequence[str],
    iterations: int = 50,
    seed: int | None = None,
) -> InferredTopics:
    """Fold a document into the trained topic space with frozen word counts.

    Out-of-vocabulary tokens are ignored; a document with no in-vocabulary
    tokens gets the uniform distribution with ``all_oov=True``. The returned
    distribution averages the smoothed estimate over the second half of the
    sweeps. ``seed=None`` derives the seed from the token content.
    """
    word_ids = np.asarray([model.vocabulary[w] for w in tokens if w in model.vocabulary], dtype=np.int32)
    if word_ids.size == 0:
        return InferredTopics(np.full(model.k, 1.0 / model.k), True)
    if seed is None:
        seed = content_seed(model.seed, tokens)

    k = model.k
    alpha = model.alpha
    beta = model.beta
    vbeta = model.v * beta
    # V x K, contiguous per-word rows; topic-word mass stays frozen
    word_weight = ((model.topic_word_counts + beta) / (model.topic_totals[:, None] + vbeta)).T.copy()

    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=word_ids.size, dtype=np.int32)
    ndz_a = np.bincount(z, minlength=k).astype(np.float64) + alpha

    n = word_ids.size
    burn_in = iterations // 2
    acc = np.zeros(k)
    samples = 0
    buf = np.empty(k)
    for sweep in range(iterations):
        uniforms = rng.random(n)
        for i in range(n):
            w = word_ids[i]
            topic = z[i]
            ndz_a[topic] -= 1.0
            np.multiply(word_weight[w], ndz_a, out=buf)
            np.cumsum(buf, out=buf)
            topic = int(np.searchsorted(buf, uniforms[i] * buf[-1], side="right"))
            if topic >= k:
                topic = k - 1
            z[i] = topic
            ndz_a[topic] += 1.0
        if sweep >= burn_in:
            acc += ndz_a / (n + k * alpha)
            samples += 1
    probs = acc / samples
    return InferredTopics(probs, False)


def topic_popularity(
    model: TopicModel,
    snapshot: CorpusSnapshot,
    doc_topics: Mapping[str, np.ndarray],
) -> np.ndarray:
    """Citation mass per topic: sum over visible papers of p(z|d) * citations(d)."""
    pop = np.zeros(model.k)
    for pid in snapshot.visible_papers:
        c = snapshot.citation_count.get(pid, 0)
        theta = doc_topics.get(pid)
        if theta is None:
            raise DependencyError(f"doc_topics does not cover visible paper {pid!r}")
        if c:
            pop += theta * c
    return pop


def c_popularity(doc_topic: np.ndarray, popularity: np.ndarray) -> float:
    """Dot product of the target paper's distribution with the popularity vector."""
    if len(doc_topic) != len(popularity):
        raise DimensionError(f"length mismatch: {len(doc_topic)} vs {len(popularity)}")
    return float(np.dot(popularity, doc_topic))


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """KL(p || q) with natural logarithm; inputs must be strictly positive."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionError(f"shape mismatch: {p.shape} vs {q.shape}")
    if np.any(p <= 0) or np.any(q <= 0):
        raise DomainError("KL divergence requires strictly positive entries (smoothed input)")
    return float(np.sum(p * np.log(p / q)))


def c_novelty(doc_topic: np.ndarray, reference_topics: Sequence[np.ndarray]) -> float:
    """Mean KL divergence from the paper to its references; 0 when there are none."""
    if not reference_topics:
        return 0.0
    return float(np.mean([kl_divergence(doc_topic, ref) for ref in reference_topics]))


def c_diversity(doc_topic: np.ndarray) -> float:
    """Shannon entropy (natural log) of the paper's topic distribution."""
    p = np.asarray(doc_topic, dtype=float)
    mask = p > 0
    return float(-np.sum(p[mask] * np.log(p[mask])))


class AuthorityTable:
    """Per-author topical authority vectors; absent authors read as zeros."""

    def __init__(self, k: int, table: dict[str, np.ndarray] | None = None):
        self.k = k
        self._table = table if table is not None else {}

    def vector(self, author_id: str) -> np.ndarray:
        vec = self._table.get(author_id)
        return vec if vec is not None else np.zeros(self.k)

    def __len__(self) -> int:
        return len(self._table)

    def items(self):
        return self._table.items()


def build_authority(
    model: TopicModel,
    snapshot: CorpusSnapshot,
    doc_topics: Mapping[str, np.ndarray],
) -> AuthorityTable:
    """authority(a, z) = sum over a's visible papers of p(z|d) * citations(d)."""
    table: dict[str, np.ndarray] = {}
    for author_id, author in snapshot.store.authors.items():
        acc = None
        for pid in author.paper_ids:
            if pid not in snapshot.visible_papers:
                continue
            c = snapshot.citation_count.get(pid, 0)
            if not c:
                continue
            theta = doc_topics.get(pid)
            if theta is None:
                raise DependencyError(f"doc_topics does not cover visible paper {pid!r}")
            acc = theta * c if acc is None else acc + theta * c
        if acc is not None:
            table[author_id] = acc
    return AuthorityTable(model.k, table)


def c_authority(doc_topic: np.ndarray, authority_vector: np.ndarray) -> float:
    """Author's authority mass projected onto the paper's topic distribution."""
    if len(doc_topic) != len(authority_vector):
        raise DimensionError(f"length mismatch: {len(doc_topic)} vs {len(authority_vector)}")
    return float(np.dot(doc_topic, authority_vector))


def save_topic_model(model: TopicModel, path) -> None:
    """Versioned binary dump: magic, header JSON, then the count arrays."""
    vocab_list = [None] * model.v
    for w, i in model.vocabulary.items():
        vocab_list[i] = w
    header = json.dumps(
        {
            "k": model.k,
            "v": model.v,
            "alpha": model.alpha,
            "beta": model.beta,
            "seed": model.seed,
            "vocabulary": vocab_list,
        },
        sort_keys=True,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(MODEL_VERSION.to_bytes(2, "big"))
        fh.write(len(header).to_bytes(8, "big"))
        fh.write(header)
        np.save(fh, model.topic_word_counts)
        np.save(fh, model.topic_totals)


def load_topic_model(path) -> TopicModel:
    from .errors import CacheError

    with open(path, "rb") as fh:
        if fh.read(len(MODEL_MAGIC)) != MODEL_MAGIC:
            raise CacheError(f"{path}: not a topic model file")
        version = int.from_bytes(fh.read(2), "big")
        if version != MODEL_VERSION:
            raise CacheError(f"{path}: topic model format v{version}, expected v{MODEL_VERSION}")
        header = json.loads(fh.read(int.from_bytes(fh.read(8), "big")).decode("utf-8"))
        counts = np.load(fh)
        totals = np.load(fh)
    vocab = {w: i for i, w in enumerate(header["vocabulary"])}
    return TopicModel(
        k=header["k"],
        vocabulary=vocab,
        topic_word_counts=counts,
        topic_totals=totals,
        alpha=header["alpha"],
        beta=header["beta"],
        seed=header["seed"],
    )
