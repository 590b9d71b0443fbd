"""Per-edge removal scores: shortest-path betweenness and cycle-based
clustering coefficients.

All scoring is restricted to a vertex subset (the community currently being
bisected) and to non-removed edges of the working graph.  Clustering scores
use an explicit +infinity sentinel for edges whose endpoint degrees make the
denominator zero; the sentinel orders above every finite value, so
lowest-score selection can never pick such an edge while a finite-scored
edge remains.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .graph import WorkingGraph

BETWEENNESS = "betweenness"
CLUSTERING_G3 = "clustering_g3"
CLUSTERING_G4 = "clustering_g4"

MEASURE_KINDS = (BETWEENNESS, CLUSTERING_G3, CLUSTERING_G4)
CLUSTERING_KINDS = (CLUSTERING_G3, CLUSTERING_G4)


@dataclass(frozen=True)
class EdgeScoreTable:
    """Scores for every non-removed edge inside one vertex subset.

    `scores` maps edge id to a finite non-negative value, or `math.inf` for
    clustering kinds when the denominator degenerates.
    """

    kind: str
    scores: dict[int, float]

    def removal_candidate(self) -> int:
        """Edge id the divisive step should remove next.

        Clustering kinds remove the lowest score, betweenness the highest;
        ties break toward the smallest edge id.
        """
        if not self.scores:
            raise ValueError("score table is empty")
        if self.kind == BETWEENNESS:
            best = None
            best_score = -1.0
            for eid in sorted(self.scores):
                s = self.scores[eid]
                if s > best_score:
                    best, best_score = eid, s
            return best
        best = None
        best_score = math.inf
        for eid in sorted(self.scores):
            s = self.scores[eid]
            if s < best_score:
                best, best_score = eid, s
        if best is None:  # all +inf: fall back to smallest edge id
            best = min(self.scores)
        return best

    def to_tsv(self, graph) -> str:
        """TSV dump (label, label, score) sorted by score then edge id."""
        lines = ["# u\tv\tscore"]
        for eid in sorted(self.scores, key=lambda e: (self.scores[e], e)):
            lu, lv = graph.edge_label_pair(eid)
            s = self.scores[eid]
            text = "inf" if math.isinf(s) else repr(s)
            lines.append(f"{lu}\t{lv}\t{text}")
        return "\n".join(lines) + "\n"


def _subset_view(g: WorkingGraph, within) -> tuple[list[int], dict[int, set[int]], list[int]]:
    """Sorted subset vertices, their in-subset neighbor sets, and internal edge ids."""
    verts = sorted(set(within))
    if not verts:
        raise ValueError("vertex subset must be nonempty")
    vset = set(verts)
    nbrs: dict[int, set[int]] = {v: set() for v in verts}
    internal: list[int] = []
    for v in verts:
        for w, eid in g.neighbors(v):
            if w in vset:
                nbrs[v].add(w)
                if v < w:
                    internal.append(eid)
    internal.sort()
    return verts, nbrs, internal


def edge_betweenness(g: WorkingGraph, within) -> EdgeScoreTable:
    """Shortest-path betweenness of every internal edge of the subset.

    For each unordered vertex pair {s, t} inside the subset, every edge e
    accumulates the fraction of shortest s-t paths passing through it.
    Single-source breadth-first searches with dependency back-propagation;
    each pair is visited from both endpoints, so totals are halved.
    """
    verts = sorted(set(within))
    if not verts:
        raise ValueError("vertex subset must be nonempty")
    k = len(verts)
    pos = {v: i for i, v in enumerate(verts)}

    # Local compressed adjacency: (neighbor local index, edge id) pairs.
    local_adj: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    scores: dict[int, float] = {}
    for v in verts:
        i = pos[v]
        for w, eid in g.neighbors(v):
            j = pos.get(w)
            if j is not None:
                local_adj[i].append((j, eid))
                if i < j:
                    scores[eid] = 0.0

    dist = [0] * k
    sigma = [0.0] * k
    preds: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    delta = [0.0] * k

    for src in range(k):
        for i in range(k):
            dist[i] = -1
            sigma[i] = 0.0
            preds[i].clear()
            delta[i] = 0.0
        dist[src] = 0
        sigma[src] = 1.0
        order: list[int] = []
        queue = deque([src])
        while queue:
            v = queue.popleft()
            order.append(v)
            dv = dist[v]
            sv = sigma[v]
            for w, eid in local_adj[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sv
                    preds[w].append((v, eid))
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v, eid in preds[w]:
                c = sigma[v] * coeff
                scores[eid] += c
                delta[v] += c

    for eid in scores:
        scores[eid] /= 2.0
    return EdgeScoreTable(BETWEENNESS, scores)


def _triangle_score(nbrs: dict[int, set[int]], u: int, v: int) -> float:
    shared = len(nbrs[u] & nbrs[v])
    denom = min(len(nbrs[u]), len(nbrs[v])) - 1
    if denom <= 0:
        return math.inf
    return (shared + 1) / denom


def _four_cycle_score(nbrs: dict[int, set[int]], u: int, v: int) -> float:
    du = len(nbrs[u])
    dv = len(nbrs[v])
    shared = len(nbrs[u] & nbrs[v])
    # Maximum possible distinct-endpoint pairings; shared neighbors close
    # triangles, not 4-cycles, so they cannot be paired with themselves.
    denom = (du - 1) * (dv - 1) - shared
    if denom <= 0:
        return math.inf
    cycles = 0
    for a in nbrs[u]:
        if a == v:
            continue
        na = nbrs[a]
        for b in nbrs[v]:
            if b != u and b != a and b in na:
                cycles += 1
    return (cycles + 1) / denom


def edge_clustering_g3(g: WorkingGraph, within) -> EdgeScoreTable:
    """Triangle-based clustering coefficient of every internal edge.

    score(u, v) = (triangles through the edge + 1) / (min degree - 1), with
    degrees and triangles restricted to the subset and non-removed edges.
    """
    _, nbrs, internal = _subset_view(g, within)
    scores: dict[int, float] = {}
    for eid in internal:
        u, v = g.base.edges[eid]
        scores[eid] = _triangle_score(nbrs, u, v)
    return EdgeScoreTable(CLUSTERING_G3, scores)


def edge_clustering_g4(g: WorkingGraph, within) -> EdgeScoreTable:
    """4-cycle generalization of the edge clustering coefficient.

    score(u, v) = (4-cycles through the edge + 1) / S, where S is the
    largest number of 4-cycles the endpoint degrees would allow: every
    pairing of distinct non-shared neighbors of u and v.
    """
    _, nbrs, internal = _subset_view(g, within)
    scores: dict[int, float] = {}
    for eid in internal:
        u, v = g.base.edges[eid]
        scores[eid] = _four_cycle_score(nbrs, u, v)
    return EdgeScoreTable(CLUSTERING_G4, scores)


def compute_scores(kind: str, g: WorkingGraph, within) -> EdgeScoreTable:
    if kind == BETWEENNESS:
        return edge_betweenness(g, within)
    if kind == CLUSTERING_G3:
        return edge_clustering_g3(g, within)
    if kind == CLUSTERING_G4:
        return edge_clustering_g4(g, within)
    raise ValueError(f"unknown measure kind: {kind!r}")


def rescore_after_removal(
    prev: EdgeScoreTable, g: WorkingGraph, removed_edge: int, within
) -> EdgeScoreTable:
    """Score table after one more edge removal, equal to full recomputation.

    Betweenness is recomputed outright.  For clustering kinds only edges
    whose cycle counts or endpoint degrees could have changed are rescored:
    edges incident to the removed edge's endpoints, plus (for 4-cycles)
    edges incident to their remaining neighbors.
    """
    if prev.kind == BETWEENNESS:
        return edge_betweenness(g, within)

    vset = set(within)
    u, v = g.base.edges[removed_edge]
    touched = {u, v}
    if prev.kind == CLUSTERING_G4:
        for x in (u, v):
            for w, _ in g.neighbors(x):
                if w in vset:
                    touched.add(w)

    affected: set[int] = set()
    for x in touched:
        for w, eid in g.neighbors(x):
            if w in vset and eid in prev.scores:
                affected.add(eid)

    nbrs = _LazyNeighborSets(g, vset)
    scorer = _triangle_score if prev.kind == CLUSTERING_G3 else _four_cycle_score
    scores = dict(prev.scores)
    scores.pop(removed_edge, None)
    for eid in sorted(affected):
        a, b = g.base.edges[eid]
        scores[eid] = scorer(nbrs, a, b)
    return EdgeScoreTable(prev.kind, scores)


class _LazyNeighborSets(dict):
    """Subset-restricted neighbor sets, materialized on first access."""

    def __init__(self, g: WorkingGraph, vset: set[int]):
        super().__init__()
        self._g = g
        self._vset = vset

    def __missing__(self, x: int) -> set[int]:
        val = {w for w, _ in self._g.neighbors(x) if w in self._vset}
        self[x] = val
        return val
