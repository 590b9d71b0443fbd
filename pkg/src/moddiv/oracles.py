"""Slow reference implementations and the self-verification suite.

Everything here is deliberately naive: per-pair path enumeration instead of
dependency accumulation, full set-partition search instead of divisive
splitting, literal cycle counting instead of incremental bookkeeping.  The
fast code in the other modules must agree with these within the stated
tolerances; `run_verification_suite` checks that on seeded random corpora
and is what the `verify` CLI subcommand runs.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field

from .engine import run_ccr, run_ccr_ebr
from .graph import Graph, WorkingGraph, connected_components
from .measures import (
    BETWEENNESS,
    CLUSTERING_G3,
    CLUSTERING_G4,
    EdgeScoreTable,
    compute_scores,
    edge_betweenness,
    rescore_after_removal,
)
from .modularity import (
    MoveContext,
    Partition,
    apply_move,
    modularity_q,
    modularity_q_pairwise,
    move_q,
)

DEFAULT_SEED = 4129

SUITE_CHECKS = (
    "q-fast-vs-pairwise",
    "moveq-vs-recompute",
    "betweenness-vs-naive",
    "betweenness-sum-law",
    "rescore-vs-full",
    "engine-vs-exhaustive",
)


@dataclass
class OracleReport:
    """Outcome of one verification check.

    `failures` holds (input digest, expected, got) triples; it is empty
    exactly when `max_abs_diff` stayed within `tolerance`.
    """

    name: str
    cases: int
    max_abs_diff: float
    tolerance: float
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, diff: float, digest: str, expected, got) -> None:
        if diff > self.max_abs_diff:
            self.max_abs_diff = diff
        if diff > self.tolerance:
            self.failures.append((digest, expected, got))

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "cases": self.cases,
            "max_abs_diff": self.max_abs_diff,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "failures": [
                {"input": digest, "expected": expected, "got": got}
                for digest, expected, got in self.failures
            ],
        }


# ---------------------------------------------------------------------------
# Seeded corpora


def gnp_pairs(rng: random.Random, n: int, p: float) -> list:
    return [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]


def gnp_graph(rng: random.Random, n: int, p: float) -> Graph:
    """Random graph with at least one edge (one is forced if the draw is empty)."""
    pairs = gnp_pairs(rng, n, p)
    if not pairs:
        pairs = [(0, rng.randrange(1, n))]
    return Graph(n, pairs)


def gnp_connected(rng: random.Random, n: int, p: float) -> Graph:
    """Random connected graph: resample a few times, then stitch components."""
    g = gnp_graph(rng, n, p)
    for _ in range(40):
        if connected_components(WorkingGraph(g)).count == 1:
            return g
        g = gnp_graph(rng, n, p)
    groups = connected_components(WorkingGraph(g)).groups()
    pairs = [g.edges[eid] for eid in range(g.m)]
    base = list(groups[0])
    for other in groups[1:]:
        pairs.append((rng.choice(base), rng.choice(sorted(other))))
        base.extend(other)
    return Graph(n, pairs)


def planted_two_cluster(
    rng: random.Random, n: int, p_in: float = 0.6, p_out: float = 0.05
) -> Graph:
    """Two equal-ish blocks, dense inside and sparse across."""
    half = n // 2
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            same = (i < half) == (j < half)
            if rng.random() < (p_in if same else p_out):
                pairs.append((i, j))
    if not any(i < half <= j for i, j in pairs):
        pairs.append((rng.randrange(half), rng.randrange(half, n)))
    g = Graph(n, pairs)
    if connected_components(WorkingGraph(g)).count == 1:
        return g
    return gnp_connected(rng, n, p_in / 2)


def random_dense_assignment(rng: random.Random, n: int, k: int) -> list:
    """Assignment of n vertices to at most k groups, relabeled densely."""
    raw = [rng.randrange(k) for _ in range(n)]
    seen: dict[int, int] = {}
    out = []
    for c in raw:
        if c not in seen:
            seen[c] = len(seen)
        out.append(seen[c])
    return out


# ---------------------------------------------------------------------------
# Reference implementations


def _bfs_counts(g: WorkingGraph, source: int, vset: set):
    """Distance and shortest-path counts from `source`, restricted to vset."""
    dist = {source: 0}
    sigma = {source: 1}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        dv = dist[v]
        for w, _ in g.neighbors(v):
            if w not in vset:
                continue
            if w not in dist:
                dist[w] = dv + 1
                sigma[w] = sigma[v]
                queue.append(w)
            elif dist[w] == dv + 1:
                sigma[w] += sigma[v]
    return dist, sigma


def betweenness_naive(g: WorkingGraph, within) -> EdgeScoreTable:
    """Edge betweenness by literal per-pair shortest-path counting.

    For every unordered pair (s, t) and every edge (u, v) on some shortest
    s-t route, the edge receives sigma_s(u) * sigma_t(v) / sigma_s(t): the
    fraction of the pair's shortest paths crossing it.  Cross-check for the
    fast accumulation; quadratic in pairs, so capped at 60 vertices.
    """
    verts = sorted(set(within))
    if len(verts) > 60:
        raise ValueError("naive betweenness is capped at 60 vertices")
    vset = set(verts)
    internal = []
    for v in verts:
        for w, eid in g.neighbors(v):
            if v < w and w in vset:
                internal.append((eid, v, w))
    scores = {eid: 0.0 for eid, _, _ in internal}
    info = {s: _bfs_counts(g, s, vset) for s in verts}
    for i, s in enumerate(verts):
        dist_s, sig_s = info[s]
        for t in verts[i + 1 :]:
            if t not in dist_s:
                continue
            d_st = dist_s[t]
            total = sig_s[t]
            dist_t, sig_t = info[t]
            for eid, u, v in internal:
                for x, y in ((u, v), (v, u)):
                    if (
                        x in dist_s
                        and y in dist_t
                        and dist_s[x] + 1 + dist_t[y] == d_st
                    ):
                        scores[eid] += sig_s[x] * sig_t[y] / total
    return EdgeScoreTable(BETWEENNESS, scores)


def _set_partitions(n: int):
    """All set partitions of range(n) as restricted-growth strings."""
    a = [0] * n
    peak = [0] * n
    while True:
        yield a
        i = n - 1
        while i > 0 and a[i] == peak[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        peak[i] = max(peak[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            peak[j] = peak[i]


def exhaustive_best_partition(g: Graph):
    """Globally best partition by scoring every set partition of V.

    Returns (partition, q) where q comes from the pairwise scorer.  Guarded
    at n <= 10 (Bell numbers explode past that)."""
    n = g.n
    if n < 1:
        raise ValueError("empty graph")
    if n > 10:
        raise ValueError("exhaustive search is capped at 10 vertices")
    if g.m < 1:
        raise ValueError("graph has no edges")
    adj = [set() for _ in range(n)]
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    degrees = g.degrees
    two_m = 2.0 * g.m

    def score(assign) -> float:
        q = 0.0
        for v in range(n):
            av = assign[v]
            dv = degrees[v]
            row = adj[v]
            for w in range(n):
                if assign[w] == av:
                    a_vw = 1.0 if w in row else 0.0
                    q += a_vw - dv * degrees[w] / two_m
        return q / two_m

    best_assign = None
    best_score = -math.inf
    for assign in _set_partitions(n):
        s = score(assign)
        if s > best_score:
            best_score = s
            best_assign = list(assign)
    best = Partition(g, best_assign)
    return best, modularity_q_pairwise(g, best)


def cycle_count_naive(g: WorkingGraph, edge_id: int, order: int) -> int:
    """Count triangles (order 3) or 4-cycles (order 4) through a present edge."""
    if g.base.n > 60:
        raise ValueError("naive cycle counting is capped at 60 vertices")
    if order not in (3, 4):
        raise ValueError("order must be 3 or 4")
    if g.is_removed(edge_id):
        raise ValueError("edge is removed")
    u, v = g.base.edges[edge_id]
    nbr_u = {w for w, _ in g.neighbors(u)}
    nbr_v = {w for w, _ in g.neighbors(v)}
    if order == 3:
        return len(nbr_u & nbr_v)
    present = set()
    for eid, (a, b) in enumerate(g.base.edges):
        if not g.is_removed(eid):
            present.add((a, b))
    count = 0
    for a in nbr_u - {v}:
        for b in nbr_v - {u}:
            if a != b and (min(a, b), max(a, b)) in present:
                count += 1
    return count


# ---------------------------------------------------------------------------
# Verification checks


def check_q_fast_vs_pairwise(seed: int, cases: int = 1000) -> OracleReport:
    rng = random.Random(seed)
    report = OracleReport("q-fast-vs-pairwise", cases, 0.0, 1e-12)
    for i in range(cases):
        n = rng.randint(2, 30)
        p = rng.choice((0.1, 0.3, 0.6))
        g = gnp_graph(rng, n, p)
        k = rng.randint(1, n)
        part = Partition(g, random_dense_assignment(rng, n, k))
        fast = modularity_q(g, part)
        slow = modularity_q_pairwise(g, part)
        report.record(
            abs(fast - slow), f"case={i} n={n} m={g.m} k={part.n_communities}", slow, fast
        )
    return report


def check_moveq_vs_recompute(seed: int, cases: int = 10000, move_q_fn=move_q) -> OracleReport:
    """Random move sequences: the predicted gain must match a full recompute.

    `move_q_fn` is injectable so the harness itself can be exercised with a
    deliberately corrupted gain function.
    """
    rng = random.Random(seed)
    report = OracleReport("moveq-vs-recompute", cases, 0.0, 1e-12)
    done = 0
    while done < cases:
        n = rng.randint(3, 30)
        p = rng.choice((0.1, 0.3, 0.6))
        g = gnp_graph(rng, n, p)
        k = rng.randint(2, min(n, 8))
        part = Partition(g, random_dense_assignment(rng, n, k))
        q = modularity_q(g, part)
        for _ in range(20):
            if done >= cases or part.n_communities < 2:
                break
            v = rng.randrange(n)
            source = part.assignment[v]
            targets = [c for c in sorted(part.communities) if c != source]
            target = rng.choice(targets)
            to_source = 0
            to_target = 0
            for w, _ in g.adj[v]:
                cw = part.assignment[w]
                if cw == source:
                    to_source += 1
                elif cw == target:
                    to_target += 1
            ctx = MoveContext(v, source, target, to_source, to_target, g.degrees[v])
            gain = move_q_fn(ctx, part.communities[source], part.communities[target], g.m)
            apply_move(part, ctx)
            q_after = modularity_q(g, part)
            report.record(
                abs((q_after - q) - gain),
                f"case={done} n={n} m={g.m} v={v} {source}->{target}",
                q_after - q,
                gain,
            )
            q = q_after
            done += 1
    return report


def _betweenness_corpus(seed: int, cases: int):
    rng = random.Random(seed)
    for i in range(cases):
        n = rng.randint(4, 40)
        p = rng.choice((0.1, 0.3, 0.6))
        yield i, gnp_connected(rng, n, p)


def check_betweenness_vs_naive(seed: int, cases: int = 200, fast_fn=edge_betweenness) -> OracleReport:
    report = OracleReport("betweenness-vs-naive", cases, 0.0, 1e-9)
    for i, g in _betweenness_corpus(seed, cases):
        wg = WorkingGraph(g)
        verts = range(g.n)
        fast = fast_fn(wg, verts)
        slow = betweenness_naive(wg, verts)
        for eid in sorted(slow.scores):
            report.record(
                abs(fast.scores[eid] - slow.scores[eid]),
                f"case={i} n={g.n} m={g.m} edge={eid}",
                slow.scores[eid],
                fast.scores[eid],
            )
    return report


def check_betweenness_sum_law(seed: int, cases: int = 200, fast_fn=edge_betweenness) -> OracleReport:
    """Total edge betweenness of a connected graph equals the sum of all
    pairwise shortest-path distances (each pair's unit of flow crosses
    exactly d(s, t) edges, however it splits across routes)."""
    report = OracleReport("betweenness-sum-law", cases, 0.0, 1e-9)
    for i, g in _betweenness_corpus(seed, cases):
        wg = WorkingGraph(g)
        table = fast_fn(wg, range(g.n))
        total = sum(table.scores[eid] for eid in sorted(table.scores))
        dist_sum = 0
        vset = set(range(g.n))
        for s in range(g.n):
            dist, _ = _bfs_counts(wg, s, vset)
            dist_sum += sum(d for t, d in dist.items() if t > s)
        report.record(
            abs(total - dist_sum), f"case={i} n={g.n} m={g.m}", dist_sum, total
        )
    return report


def check_rescore_vs_full(seed: int, cases: int = 50) -> OracleReport:
    """Incremental clustering rescoring must equal a full recompute exactly."""
    rng = random.Random(seed)
    report = OracleReport("rescore-vs-full", cases, 0.0, 0.0)
    for i in range(cases):
        kind = CLUSTERING_G3 if i % 2 == 0 else CLUSTERING_G4
        n = rng.randint(5, 40 if kind == CLUSTERING_G3 else 25)
        p = rng.choice((0.1, 0.3))
        g = gnp_connected(rng, n, p)
        if rng.random() < 0.5:
            within = list(range(g.n))
        else:
            size = rng.randint(3, g.n)
            within = rng.sample(range(g.n), size)
        wg = WorkingGraph(g)
        table = compute_scores(kind, wg, within)
        for step in range(6):
            if not table.scores:
                break
            eid = rng.choice(sorted(table.scores))
            wg.remove_edge(eid)
            table = rescore_after_removal(table, wg, eid, within)
            full = compute_scores(kind, wg, within)
            digest = f"case={i} kind={kind} n={g.n} step={step} removed={eid}"
            if set(table.scores) != set(full.scores):
                report.record(math.inf, digest, sorted(full.scores), sorted(table.scores))
                break
            for e in sorted(full.scores):
                a, b = table.scores[e], full.scores[e]
                if a == b:
                    diff = 0.0
                elif math.isinf(a) or math.isinf(b):
                    diff = math.inf
                else:
                    diff = abs(a - b)
                report.record(diff, digest + f" edge={e}", b, a)
    return report


def check_engine_vs_exhaustive(seed: int, cases: int = 100) -> OracleReport:
    """The divisive engine may never beat the exhaustive optimum, and should
    land within 90% of it on at least 90% of the sample."""
    rng = random.Random(seed)
    report = OracleReport("engine-vs-exhaustive", cases, 0.0, 1e-12)
    in_band = 0
    for i in range(cases):
        n = rng.randint(3, 8)
        p = rng.choice((0.3, 0.6))
        g = gnp_connected(rng, n, p)
        _, opt_q = exhaustive_best_partition(g)
        digest = f"case={i} n={g.n} m={g.m}"
        best_seen = -math.inf
        for label, runner in (("ccr", run_ccr), ("ccr-ebr", run_ccr_ebr)):
            got = runner(g).best_q
            best_seen = max(best_seen, got)
            excess = got - opt_q
            report.record(max(0.0, excess), f"{digest} algo={label}", opt_q, got)
        if best_seen >= 0.9 * opt_q - 1e-12:
            in_band += 1
    if in_band < 0.9 * cases:
        report.failures.append(
            (f"band-rate seed={seed}", ">=90% within 0.9x optimum", f"{in_band}/{cases}")
        )
    return report


def run_verification_suite(seed: int = DEFAULT_SEED) -> list:
    """All checks with deterministic seeds; betweenness checks share a corpus."""
    return [
        check_q_fast_vs_pairwise(seed),
        check_moveq_vs_recompute(seed + 1),
        check_betweenness_vs_naive(seed + 2),
        check_betweenness_sum_law(seed + 2),
        check_rescore_vs_full(seed + 3),
        check_engine_vs_exhaustive(seed + 4),
    ]
