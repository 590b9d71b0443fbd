"""Divisive community detection with modularity-guided refinement.

Two pipelines share one engine:

* clustering-coefficient removal (`run_ccr`): repeatedly delete the
  lowest-scoring edge of a community until it falls apart into two pieces,
  then let borderline vertices migrate wherever that improves modularity,
  and keep the split only if global modularity improved;
* betweenness re-division (`run_ccr_ebr`): run the clustering pipeline
  first, then re-divide its communities the same way using edge
  betweenness (removing the highest score), and finish with one global
  refinement pass over every boundary vertex.

Every choice the engine makes is deterministic: candidate edges tie-break
toward the smallest edge id, borderline vertices are visited in ascending
id order, move destinations tie-break toward the smallest community id,
and the work queue is FIFO ordered by each community's smallest vertex.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field, replace

from .graph import Graph, WorkingGraph, connected_components, reachable_within
from .measures import (
    BETWEENNESS,
    CLUSTERING_G3,
    CLUSTERING_KINDS,
    MEASURE_KINDS,
    compute_scores,
    rescore_after_removal,
)
from .modularity import (
    MoveContext,
    Partition,
    apply_move,
    modularity_q,
    move_q,
)


class ConfigError(Exception):
    """Engine configuration is inconsistent or out of range."""


@dataclass(frozen=True)
class EngineConfig:
    """Knobs for the divisive engine; defaults reproduce the benchmarks."""

    measure: str = CLUSTERING_G3
    refine_max_passes: int = 100
    min_community_size: int = 1
    tie_break: str = "min-edge-id"
    q_improvement_eps: float = 1e-12

    def validate(self) -> None:
        if self.measure not in MEASURE_KINDS:
            raise ConfigError(f"unknown measure {self.measure!r}")
        if self.refine_max_passes < 1:
            raise ConfigError("refine_max_passes must be >= 1")
        if self.min_community_size < 1:
            raise ConfigError("min_community_size must be >= 1")
        if self.tie_break != "min-edge-id":
            raise ConfigError("only the 'min-edge-id' tie-break is supported")
        if self.q_improvement_eps < 0:
            raise ConfigError("q_improvement_eps must be >= 0")


class BorderlineSets:
    """Per-community sets of vertices incident to a removed edge.

    These are the refinement candidates: exactly the vertices that gained an
    inter-community incidence when the divisive step cut their edge.
    """

    __slots__ = ("sets",)

    def __init__(self):
        self.sets: dict[int, set[int]] = {}

    def add(self, cid: int, v: int) -> None:
        self.sets.setdefault(cid, set()).add(v)

    def sorted_vertices(self) -> list[int]:
        out: set[int] = set()
        for s in self.sets.values():
            out |= s
        return sorted(out)

    def after_move(self, g: Graph, p: Partition, ctx: MoveContext) -> None:
        """Update the sets once `ctx` has been applied.

        The moved vertex switches to the destination's set, and its former
        neighbors left behind in the source community become borderline
        there (each of them now has an inter-community edge to the vertex).
        """
        if ctx.source in p.communities:
            src = self.sets.get(ctx.source)
            if src is not None:
                src.discard(ctx.vertex)
            for w, _ in g.adj[ctx.vertex]:
                if p.assignment[w] == ctx.source:
                    self.add(ctx.source, w)
        else:
            self.sets.pop(ctx.source, None)
        self.add(ctx.target, ctx.vertex)


@dataclass(frozen=True)
class RefinementMove:
    vertex: int
    source: int
    target: int
    gain: float


@dataclass(frozen=True)
class Bisection:
    """Outcome of one divisive split: two sides plus the removals that caused it."""

    side_a: tuple[int, ...]
    side_b: tuple[int, ...]
    removals: tuple[tuple[int, float], ...]  # (edge id, score at removal time)


@dataclass
class DendrogramNode:
    node_id: int
    members: set[int]
    parent: int | None = None
    children: tuple[int, ...] = ()
    split_q: float | None = None
    split_moves: tuple[RefinementMove, ...] = ()


@dataclass(frozen=True)
class TraceEntry:
    """One accepted state of the run: its modularity and full assignment."""

    step: str
    q: float
    n_communities: int
    assignment: tuple[int, ...]


class Dendrogram:
    """Split tree of the run, plus the modularity trace of accepted states.

    A node's member set stays live while its community exists: refinement
    moves that touch the community keep it current, and it freezes when the
    community splits (becoming an internal node) or the run ends.  So every
    internal node's children partition its members exactly, and the leaves
    partition the vertex set.
    """

    def __init__(self, graph: Graph):
        self.graph = graph
        self.nodes: list[DendrogramNode] = [
            DendrogramNode(0, set(range(graph.n)))
        ]
        self.root_id = 0
        self.node_for_community: dict[int, int] = {}
        self.trace: list[TraceEntry] = []
        self.final_moves: tuple[RefinementMove, ...] = ()

    def add_child(self, parent_id: int, community: int, members) -> int:
        node = DendrogramNode(len(self.nodes), set(members), parent=parent_id)
        self.nodes.append(node)
        parent = self.nodes[parent_id]
        parent.children = parent.children + (node.node_id,)
        self.node_for_community[community] = node.node_id
        return node.node_id

    def record_split(
        self,
        community: int,
        new_a: int,
        new_b: int,
        members_a,
        members_b,
        q_after: float,
        moves,
    ) -> None:
        parent_id = self.node_for_community.pop(community)
        self.add_child(parent_id, new_a, members_a)
        self.add_child(parent_id, new_b, members_b)
        parent = self.nodes[parent_id]
        parent.split_q = q_after
        parent.split_moves = tuple(moves)

    def apply_move(self, vertex: int, source: int, target: int) -> None:
        """Mirror a refinement move onto the tree.

        The vertex is discarded from the source community's node and every
        ancestor, then added to the target's node and every ancestor; the
        shared ancestors get it straight back, so exactly the nodes between
        the two communities change and partitioning is preserved.
        """
        src = self.node_for_community.get(source)
        if src is not None:
            nid = src
            while nid is not None:
                self.nodes[nid].members.discard(vertex)
                nid = self.nodes[nid].parent
        dst = self.node_for_community.get(target)
        if dst is not None:
            nid = dst
            while nid is not None:
                self.nodes[nid].members.add(vertex)
                nid = self.nodes[nid].parent

    def drop_community(self, community: int) -> None:
        self.node_for_community.pop(community, None)

    def leaves(self) -> list[DendrogramNode]:
        return [n for n in self.nodes if not n.children]

    # -- export -------------------------------------------------------------

    def _node_obj(self, node: DendrogramNode) -> dict:
        labels = self.graph.labels
        obj: dict = {
            "members": [labels[v] for v in sorted(node.members)],
            "split_q": node.split_q,
            "moves": [
                {
                    "vertex": labels[mv.vertex],
                    "source": mv.source,
                    "target": mv.target,
                    "gain": mv.gain,
                }
                for mv in node.split_moves
            ],
            "children": [self._node_obj(self.nodes[c]) for c in node.children],
        }
        return obj

    def to_json_obj(self) -> dict:
        labels = self.graph.labels
        return {
            "n_vertices": self.graph.n,
            "root": self._node_obj(self.nodes[self.root_id]),
            "final_moves": [
                {
                    "vertex": labels[mv.vertex],
                    "source": mv.source,
                    "target": mv.target,
                    "gain": mv.gain,
                }
                for mv in self.final_moves
            ],
            "trace": [
                {"step": t.step, "q": t.q, "n_communities": t.n_communities}
                for t in self.trace
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"

    def to_newick(self) -> str:
        labels = self.graph.labels

        def clean(text: str) -> str:
            return "".join("_" if ch in " \t,():;[]'" else ch for ch in text)

        def render(node: DendrogramNode) -> str:
            if node.children:
                parts = [
                    render(self.nodes[c])
                    for c in node.children
                    if self.nodes[c].children or self.nodes[c].members
                ]
                return "(" + ",".join(parts) + ")"
            members = sorted(node.members)
            if len(members) == 1:
                return clean(labels[members[0]])
            return "(" + ",".join(clean(labels[v]) for v in members) + ")"

        return render(self.nodes[self.root_id]) + ";\n"


@dataclass
class DetectionResult:
    """Best partition found along the run, with its full provenance."""

    best_partition: Partition
    best_q: float
    dendrogram: Dendrogram
    history: list[dict] = field(repr=False, default_factory=list)

    @property
    def trace(self) -> list[TraceEntry]:
        return self.dendrogram.trace


def _best_trace_entry(trace: list[TraceEntry]) -> TraceEntry:
    if not trace:
        raise ValueError("empty trace")
    best = trace[0]
    for entry in trace[1:]:
        if entry.q > best.q or (entry.q == best.q and entry.n_communities < best.n_communities):
            best = entry
    return best


def _partition_from_assignment(g: Graph, assignment) -> Partition:
    order: dict[int, int] = {}
    for c in assignment:
        if c not in order:
            order[c] = len(order)
    return Partition(g, [order[c] for c in assignment])


def best_cut(d: Dendrogram) -> Partition:
    """Partition along the recorded trace with maximal modularity.

    Ties break toward fewer communities, then toward the earlier state.
    """
    entry = _best_trace_entry(d.trace)
    return _partition_from_assignment(d.graph, entry.assignment)


# ---------------------------------------------------------------------------
# Core operations


def bisect_community(g: WorkingGraph, community, cfg: EngineConfig) -> Bisection:
    """Remove edges inside `community` until it splits into two components.

    Clustering measures remove the lowest-scoring edge, betweenness the
    highest; after each removal the scores are brought back in line with a
    full recomputation.  The removals are left applied on the working graph
    so the caller can inspect the split; restore them afterwards.

    `side_a` is the side containing the smallest vertex id.
    """
    members = sorted(set(community))
    if len(members) < 2:
        raise ValueError("community must contain at least two vertices")
    vset = set(members)
    has_internal = any(
        w in vset for v in members for w, _ in g.neighbors(v)
    )
    if not has_internal:
        raise ValueError("community has no internal edges")
    reach = reachable_within(g, members[0], vset)
    if len(reach) != len(members):
        raise ValueError("community is not connected in the working graph")

    table = compute_scores(cfg.measure, g, members)
    removals: list[tuple[int, float]] = []
    while True:
        eid = table.removal_candidate()
        score = table.scores[eid]
        g.remove_edge(eid)
        removals.append((eid, score))
        u, v = g.base.edges[eid]
        side = reachable_within(g, u, vset, stop_at=v)
        if v not in side:
            side_a = sorted(side)
            side_b = sorted(vset - side)
            if side_b[0] < side_a[0]:
                side_a, side_b = side_b, side_a
            return Bisection(tuple(side_a), tuple(side_b), tuple(removals))
        table = rescore_after_removal(table, g, eid, members)
        if not table.scores:
            raise RuntimeError("ran out of edges before the community split")


def refine(g: Graph, p: Partition, borderline: BorderlineSets, cfg: EngineConfig):
    """Move borderline vertices wherever modularity strictly improves.

    Passes over the borderline vertices in ascending id order; each vertex
    is offered to every community holding at least one of its neighbors and
    takes the best strictly-positive gain (ties toward the smaller community
    id).  Stops after a pass with no moves, or at the pass cap.  Mutates and
    returns the partition, together with the applied moves.
    """
    moves: list[RefinementMove] = []
    eps = cfg.q_improvement_eps
    m = g.m
    for _ in range(cfg.refine_max_passes):
        moved = False
        for v in borderline.sorted_vertices():
            source = p.assignment[v]
            tally: dict[int, int] = {}
            for w, _ in g.adj[v]:
                cw = p.assignment[w]
                tally[cw] = tally.get(cw, 0) + 1
            to_source = tally.get(source, 0)
            degree = g.degrees[v]
            src_stats = p.communities[source]
            best_gain = -math.inf
            best_target = None
            for target in sorted(tally):
                if target == source:
                    continue
                ctx = MoveContext(v, source, target, to_source, tally[target], degree)
                gain = move_q(ctx, src_stats, p.communities[target], m)
                if gain > best_gain:
                    best_gain = gain
                    best_target = target
            if best_target is not None and best_gain > eps:
                ctx = MoveContext(v, source, best_target, to_source, tally[best_target], degree)
                apply_move(p, ctx)
                borderline.after_move(g, p, ctx)
                moves.append(RefinementMove(v, source, best_target, best_gain))
                moved = True
        if not moved:
            break
    return p, moves


# ---------------------------------------------------------------------------
# Pipelines


class _DivisiveRun:
    def __init__(self, g: Graph, cfg: EngineConfig):
        if g.n == 0:
            raise ValueError("graph has no vertices")
        if g.m == 0:
            raise ValueError("graph has no edges")
        cfg.validate()
        self.g = g
        self.cfg = cfg
        self.wg = WorkingGraph(g)
        components = connected_components(self.wg)
        self.partition = Partition(g, components.labels)
        self.q = modularity_q(g, self.partition)
        self.history: list[dict] = []
        self.dendrogram = Dendrogram(g)
        if components.count == 1:
            self.dendrogram.node_for_community[0] = self.dendrogram.root_id
        else:
            # Disconnected input: each component is an initial community.
            for cid in self.partition.community_ids():
                self.dendrogram.add_child(
                    self.dendrogram.root_id, cid, self.partition.members(cid)
                )
            root = self.dendrogram.nodes[self.dendrogram.root_id]
            root.split_q = self.q
        self._trace("init")

    def _trace(self, step: str) -> None:
        self.dendrogram.trace.append(
            TraceEntry(step, self.q, self.partition.n_communities, tuple(self.partition.assignment))
        )

    def _event(self, kind: str, payload: dict, q_after: float) -> None:
        record = {"type": kind}
        record.update(payload)
        record["q_after"] = q_after
        self.history.append(record)

    def _queue_order(self, cids) -> list[int]:
        return sorted(cids, key=lambda c: min(self.partition._members[c]))

    def run_phase(self, phase: int, measure: str) -> None:
        phase_cfg = replace(self.cfg, measure=measure)
        queue = deque(self._queue_order(self.partition.communities))
        while queue:
            cid = queue.popleft()
            if cid not in self.partition.communities:
                continue  # retired by refinement moves in the meantime
            members = self.partition.members(cid)
            if len(members) < 2:
                continue

            vset = set(members)
            reach = reachable_within(self.wg, members[0], vset)
            if len(reach) < len(members):
                # cross-community moves can leave a community disconnected;
                # peeling off a component costs nothing and always helps Q
                bis = Bisection(
                    tuple(sorted(reach)), tuple(sorted(vset - reach)), ()
                )
            else:
                bis = bisect_community(self.wg, members, phase_cfg)
                self.wg.restore_all()
            for eid, score in bis.removals:
                lu, lv = self.g.edge_label_pair(eid)
                self._event(
                    "remove",
                    {
                        "phase": phase,
                        "community": cid,
                        "edge_id": eid,
                        "edge": [lu, lv],
                        "score": "inf" if math.isinf(score) else score,
                    },
                    self.q,
                )

            tentative = self.partition.copy()
            new_a, new_b = tentative.split_community(cid, bis.side_a, bis.side_b)
            side_a = set(bis.side_a)
            borderline = BorderlineSets()
            for eid, _ in bis.removals:
                for x in self.g.edges[eid]:
                    borderline.add(new_a if x in side_a else new_b, x)

            q_split = modularity_q(self.g, tentative)
            tentative, mvs = refine(self.g, tentative, borderline, self.cfg)
            q_running = q_split
            for mv in mvs:
                q_running += mv.gain
                self._event(
                    "move",
                    {
                        "phase": phase,
                        "vertex": self.g.labels[mv.vertex],
                        "source": mv.source,
                        "target": mv.target,
                        "gain": mv.gain,
                    },
                    q_running,
                )
            q_new = modularity_q(self.g, tentative)

            sides_ok = all(
                tentative.communities[c].size >= self.cfg.min_community_size
                for c in (new_a, new_b)
                if c in tentative.communities
            )
            if q_new > self.q + self.cfg.q_improvement_eps and sides_ok:
                self.partition = tentative
                self.q = q_new
                # children start as the raw bisection sides; replaying the
                # refinement moves brings every touched node up to date
                self.dendrogram.record_split(
                    cid, new_a, new_b, bis.side_a, bis.side_b, q_new, mvs
                )
                for mv in mvs:
                    self.dendrogram.apply_move(mv.vertex, mv.source, mv.target)
                for touched in {mv.source for mv in mvs} | {mv.target for mv in mvs}:
                    if touched not in tentative.communities:
                        self.dendrogram.drop_community(touched)
                members_a = tentative._members.get(new_a, set())
                members_b = tentative._members.get(new_b, set())
                self._event(
                    "accept",
                    {
                        "phase": phase,
                        "community": cid,
                        "children": [new_a, new_b],
                        "sizes": [len(members_a), len(members_b)],
                    },
                    self.q,
                )
                self._trace("split")
                live = [c for c in (new_a, new_b) if c in tentative.communities]
                for child in self._queue_order(live):
                    queue.append(child)
            else:
                self._event(
                    "reject",
                    {"phase": phase, "community": cid, "q_tentative": q_new},
                    self.q,
                )

    def global_refine(self) -> None:
        """Final refinement over every vertex with an inter-community edge."""
        borderline = BorderlineSets()
        assignment = self.partition.assignment
        for v in range(self.g.n):
            cv = assignment[v]
            if any(assignment[w] != cv for w, _ in self.g.adj[v]):
                borderline.add(cv, v)
        q_before = self.q
        _, mvs = refine(self.g, self.partition, borderline, self.cfg)
        if not mvs:
            return
        q_running = q_before
        for mv in mvs:
            q_running += mv.gain
            self._event(
                "move",
                {
                    "phase": 2,
                    "stage": "final-refine",
                    "vertex": self.g.labels[mv.vertex],
                    "source": mv.source,
                    "target": mv.target,
                    "gain": mv.gain,
                },
                q_running,
            )
            self.dendrogram.apply_move(mv.vertex, mv.source, mv.target)
        for touched in {mv.source for mv in mvs} | {mv.target for mv in mvs}:
            if touched not in self.partition.communities:
                self.dendrogram.drop_community(touched)
        self.q = modularity_q(self.g, self.partition)
        self.dendrogram.final_moves = tuple(mvs)
        self._trace("final-refine")

    def result(self) -> DetectionResult:
        entry = _best_trace_entry(self.dendrogram.trace)
        best = _partition_from_assignment(self.g, entry.assignment)
        return DetectionResult(best, modularity_q(self.g, best), self.dendrogram, self.history)


def run_ccr(g: Graph, cfg: EngineConfig | None = None) -> DetectionResult:
    """Divisive detection by clustering-coefficient removal with refinement."""
    cfg = cfg or EngineConfig()
    if cfg.measure not in CLUSTERING_KINDS:
        raise ConfigError("the clustering pipeline requires a clustering measure")
    run = _DivisiveRun(g, cfg)
    run.run_phase(1, cfg.measure)
    return run.result()


def run_ccr_ebr(g: Graph, cfg: EngineConfig | None = None) -> DetectionResult:
    """Clustering-coefficient phase, then betweenness re-division of its
    communities, then a global refinement pass."""
    cfg = cfg or EngineConfig()
    if cfg.measure not in CLUSTERING_KINDS:
        raise ConfigError("the clustering pipeline requires a clustering measure")
    run = _DivisiveRun(g, cfg)
    run.run_phase(1, cfg.measure)
    run.run_phase(2, BETWEENNESS)
    run.global_refine()
    return run.result()


def history_to_jsonl(history: list[dict]) -> str:
    if not history:
        return ""
    return "\n".join(json.dumps(event) for event in history) + "\n"
