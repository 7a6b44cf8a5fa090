"""Weighted co-authorship network and the four social factors.

Edge weight is the number of co-authored papers visible at the snapshot.
The graph is immutable after construction; PageRank over the default
parameters is computed once and cached on the graph.
"""

from __future__ import annotations

import numpy as np

from .corpus import CorpusSnapshot, PaperRecord
from .errors import EmptyCorpusError, NotFoundError
from .scholarmetrics import author_h_index


class CollabGraph:
    def __init__(self, adjacency: dict[str, dict[str, int]]):
        self.adjacency = adjacency
        self.nodes = sorted(adjacency)
        self.index = {a: i for i, a in enumerate(self.nodes)}
        self._default_pagerank: dict[str, float] | None = None

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency.values()) // 2

    def degree(self, author_id: str) -> int:
        return len(self.adjacency.get(author_id, {}))

    def __contains__(self, author_id: str) -> bool:
        return author_id in self.adjacency


def build_collab_graph(snapshot: CorpusSnapshot) -> CollabGraph:
    """One node per author with a visible paper; one edge per collaborating pair.

    Weight accumulation is commutative, so the result is independent of
    paper iteration order.
    """
    adjacency: dict[str, dict[str, int]] = {}
    for pid in snapshot.visible_papers:
        rec = snapshot.store.papers[pid]
        authors = list(dict.fromkeys(rec.author_ids))  # dedup, keep order
        for a in authors:
            adjacency.setdefault(a, {})
        for i in range(len(authors)):
            for j in range(i + 1, len(authors)):
                a, b = authors[i], authors[j]
                adjacency[a][b] = adjacency[a].get(b, 0) + 1
                adjacency[b][a] = adjacency[b].get(a, 0) + 1
    return CollabGraph(adjacency)


def pagerank(
    graph: CollabGraph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> dict[str, float]:
    """Weighted PageRank by power iteration; scores sum to 1.

    Transition probability is proportional to edge weight; isolated nodes
    spread their mass uniformly (teleport). Stops when the L1 change drops
    below ``tol`` or after ``max_iter`` sweeps.
    """
    n = graph.n_nodes
    if n == 0:
        raise EmptyCorpusError("pagerank on an empty graph")

    index = graph.index
    src: list[int] = []
    dst: list[int] = []
    prob: list[float] = []
    dangling = np.zeros(n, dtype=bool)
    for a, nbrs in graph.adjacency.items():
        i = index[a]
        total = sum(nbrs.values())
        if total == 0:
            dangling[i] = True
            continue
        for b, w in nbrs.items():
            src.append(i)
            dst.append(index[b])
            prob.append(w / total)
    src_a = np.asarray(src, dtype=np.int64)
    dst_a = np.asarray(dst, dtype=np.int64)
    prob_a = np.asarray(prob)

    rank = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = np.zeros(n)
        np.add.at(nxt, dst_a, rank[src_a] * prob_a)
        nxt += rank[dangling].sum() / n
        nxt = (1.0 - damping) / n + damping * nxt
        if np.abs(nxt - rank).sum() < tol:
            rank = nxt
            break
        rank = nxt
    return {a: float(rank[index[a]]) for a in graph.nodes}


def _default_pagerank(graph: CollabGraph) -> dict[str, float]:
    if graph._default_pagerank is None:
        graph._default_pagerank = pagerank(graph)
    return graph._default_pagerank


def coauthor_h_stats(
    graph: CollabGraph,
    snapshot: CorpusSnapshot,
    author_id: str,
) -> tuple[float, float]:
    """(mean, edge-weighted mean) h-index of the author's collaborators."""
    if author_id not in graph:
        raise NotFoundError(f"author {author_id!r} not in collaboration graph")
    nbrs = graph.adjacency[author_id]
    if not nbrs:
        return 0.0, 0.0
    hs = np.asarray([author_h_index(snapshot, b) for b in nbrs], dtype=float)
    ws = np.asarray(list(nbrs.values()), dtype=float)
    return float(hs.mean()), float(np.dot(hs, ws) / ws.sum())


def social_factors(
    paper: PaperRecord,
    graph: CollabGraph,
    snapshot: CorpusSnapshot,
    pagerank_scores: dict[str, float] | None = None,
) -> tuple[float, float, float, float]:
    """Per-author (degree, pagerank, coauthor-h, weighted coauthor-h), maxed
    over the paper's authors. Authors missing from the graph contribute 0."""
    if pagerank_scores is None:
        pagerank_scores = _default_pagerank(graph)
    degree = pr = avg_h = w_h = 0.0
    for a in paper.author_ids:
        if a not in graph:
            continue
        degree = max(degree, float(graph.degree(a)))
        pr = max(pr, pagerank_scores.get(a, 0.0))
        ah, wh = coauthor_h_stats(graph, snapshot, a)
        avg_h = max(avg_h, ah)
        w_h = max(w_h, wh)
    return degree, pr, avg_h, w_h


def write_edge_list(graph: CollabGraph, path) -> None:
    """Plain text export: one ``author_id author_id weight`` line per edge."""
    with open(path, "w", encoding="utf-8") as fh:
        for a in graph.nodes:
            for b, w in sorted(graph.adjacency[a].items()):
                if a < b:
                    fh.write(f"{a} {b} {w}\n")
