"""Partition bookkeeping, exact modularity, and single-vertex move gains.

A partition keeps, per community, twice its internal edge count and the
total degree of its members, so modularity and move gains never require a
full rescan.  All formulas operate on the immutable base graph; edge
removals performed during bisection do not affect modularity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graph import Graph


@dataclass
class CommunityStats:
    """Running totals for one community.

    `internal_twice` is twice the number of edges with both endpoints in the
    community; `total_degree` is the sum of the members' degrees.
    """

    internal_twice: int
    total_degree: int
    size: int

    def copy(self) -> "CommunityStats":
        return CommunityStats(self.internal_twice, self.total_degree, self.size)


@dataclass(frozen=True)
class MoveContext:
    """One candidate relocation of a vertex between two communities.

    `edges_to_source` counts edges from the vertex to its current community
    (excluding itself); `edges_to_target` counts edges to the destination.
    """

    vertex: int
    source: int
    target: int
    edges_to_source: int
    edges_to_target: int
    degree: int

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError("move source and target must differ")
        if self.edges_to_source > self.degree or self.edges_to_target > self.degree:
            raise ValueError("community edge counts cannot exceed the vertex degree")


class Partition:
    """Assignment of every vertex to a community, with incremental stats.

    Community ids are dense at construction; ids retired by moves are not
    reused, and `renumbered()` restores density for export.
    """

    __slots__ = ("graph", "assignment", "communities", "_members", "_next_id")

    def __init__(self, graph: Graph, assignment: list[int]):
        if len(assignment) != graph.n:
            raise ValueError("assignment length must equal the vertex count")
        ids = sorted(set(assignment))
        if ids != list(range(len(ids))):
            raise ValueError("community ids must be dense 0..k-1")
        self.graph = graph
        self.assignment = list(assignment)
        self._members: dict[int, set[int]] = {c: set() for c in ids}
        for v, c in enumerate(assignment):
            self._members[c].add(v)
        self.communities: dict[int, CommunityStats] = {}
        for c, members in self._members.items():
            internal_twice = 0
            total_degree = 0
            for v in members:
                total_degree += graph.degrees[v]
                for w, _ in graph.adj[v]:
                    if assignment[w] == c:
                        internal_twice += 1
            self.communities[c] = CommunityStats(internal_twice, total_degree, len(members))
        self._next_id = len(ids)

    # -- constructors ------------------------------------------------------

    @classmethod
    def single_community(cls, graph: Graph) -> "Partition":
        return cls(graph, [0] * graph.n)

    @classmethod
    def singletons(cls, graph: Graph) -> "Partition":
        return cls(graph, list(range(graph.n)))

    # -- queries -----------------------------------------------------------

    def community_of(self, v: int) -> int:
        return self.assignment[v]

    def community_ids(self) -> list[int]:
        return sorted(self.communities)

    @property
    def n_communities(self) -> int:
        return len(self.communities)

    def members(self, cid: int) -> list[int]:
        return sorted(self._members[cid])

    def copy(self) -> "Partition":
        clone = object.__new__(Partition)
        clone.graph = self.graph
        clone.assignment = list(self.assignment)
        clone.communities = {c: s.copy() for c, s in self.communities.items()}
        clone._members = {c: set(s) for c, s in self._members.items()}
        clone._next_id = self._next_id
        return clone

    def recount(self) -> dict[int, CommunityStats]:
        """Recompute all stats from scratch; reference for property tests."""
        fresh: dict[int, CommunityStats] = {
            c: CommunityStats(0, 0, 0) for c in self.communities
        }
        for v, c in enumerate(self.assignment):
            st = fresh[c]
            st.size += 1
            st.total_degree += self.graph.degrees[v]
            for w, _ in self.graph.adj[v]:
                if self.assignment[w] == c:
                    st.internal_twice += 1
        return fresh

    def renumbered(self) -> "Partition":
        """Equivalent partition with dense ids, ordered by smallest member."""
        order = sorted(self.communities, key=lambda c: min(self._members[c]))
        remap = {c: i for i, c in enumerate(order)}
        return Partition(self.graph, [remap[c] for c in self.assignment])

    # -- engine-facing mutations --------------------------------------------

    def split_community(self, cid: int, side_a, side_b) -> tuple[int, int]:
        """Replace community `cid` by two new communities; returns their ids.

        The two sides must partition the community's member set exactly.
        """
        members = self._members[cid]
        sa, sb = set(side_a), set(side_b)
        if sa | sb != members or sa & sb:
            raise ValueError("sides must partition the community exactly")
        id_a = self._next_id
        id_b = self._next_id + 1
        self._next_id += 2
        del self.communities[cid]
        del self._members[cid]
        for new_id, side in ((id_a, sa), (id_b, sb)):
            internal_twice = 0
            total_degree = 0
            for v in side:
                self.assignment[v] = new_id
                total_degree += self.graph.degrees[v]
            for v in side:
                for w, _ in self.graph.adj[v]:
                    if w in side:
                        internal_twice += 1
            self._members[new_id] = side
            self.communities[new_id] = CommunityStats(internal_twice, total_degree, len(side))
        return id_a, id_b


def modularity_q(g: Graph, p: Partition) -> float:
    """Exact modularity of the partition, from the per-community totals."""
    if p.graph is not g:
        raise ValueError("partition was built for a different graph")
    if g.m < 1:
        raise ValueError("modularity requires at least one edge")
    two_m = 2.0 * g.m
    q = 0.0
    for c in sorted(p.communities):
        st = p.communities[c]
        q += st.internal_twice / two_m - (st.total_degree / two_m) ** 2
    return q


def modularity_q_pairwise(g: Graph, p: Partition) -> float:
    """Modularity by the ordered-pair definition; slow oracle for `modularity_q`.

    Sums (adjacency - expected under the degree-preserving null model) over
    all ordered vertex pairs sharing a community, including the diagonal.
    """
    if p.graph is not g:
        raise ValueError("partition was built for a different graph")
    if g.m < 1:
        raise ValueError("modularity requires at least one edge")
    two_m = 2.0 * g.m
    adjacency = [set(w for w, _ in g.adj[v]) for v in range(g.n)]
    total = 0.0
    for v in range(g.n):
        cv = p.assignment[v]
        dv = g.degrees[v]
        for w in range(g.n):
            if p.assignment[w] != cv:
                continue
            a = 1.0 if w in adjacency[v] else 0.0
            total += a - dv * g.degrees[w] / two_m
    return total / two_m


def move_q(ctx: MoveContext, source_stats: CommunityStats, target_stats: CommunityStats,
           edge_count: int) -> float:
    """Exact modularity change from moving one vertex between communities.

    `source_stats` must still include the vertex; `target_stats` must not.
    Positive values mean the move improves modularity.
    """
    m = float(edge_count)
    d_v = ctx.degree
    d_src = source_stats.total_degree
    d_dst = target_stats.total_degree
    return (ctx.edges_to_target - ctx.edges_to_source) / m + (
        d_src * d_v - d_v * d_v - d_dst * d_v
    ) / (2.0 * m * m)


def move_context(p: Partition, v: int, target: int) -> MoveContext:
    """Build the move bookkeeping for relocating `v` into community `target`."""
    source = p.assignment[v]
    to_source = 0
    to_target = 0
    for w, _ in p.graph.adj[v]:
        cw = p.assignment[w]
        if cw == source:
            to_source += 1
        elif cw == target:
            to_target += 1
    return MoveContext(v, source, target, to_source, to_target, p.graph.degrees[v])


def apply_move(p: Partition, ctx: MoveContext) -> Partition:
    """Apply a vertex move in place with O(1) stats updates.

    A community emptied by the move is retired (its id is dropped).
    Returns the same partition object.
    """
    src = p.communities[ctx.source]
    dst = p.communities[ctx.target]
    src.internal_twice -= 2 * ctx.edges_to_source
    dst.internal_twice += 2 * ctx.edges_to_target
    src.total_degree -= ctx.degree
    dst.total_degree += ctx.degree
    src.size -= 1
    dst.size += 1
    p.assignment[ctx.vertex] = ctx.target
    p._members[ctx.source].discard(ctx.vertex)
    p._members[ctx.target].add(ctx.vertex)
    if src.size == 0:
        del p.communities[ctx.source]
        del p._members[ctx.source]
    return p


# ---------------------------------------------------------------------------
# Export


def partition_to_tsv(p: Partition) -> str:
    """Vertex label and community id, one row per vertex."""
    dense = p.renumbered()
    lines = ["# vertex\tcommunity"]
    for v in range(dense.graph.n):
        lines.append(f"{dense.graph.labels[v]}\t{dense.assignment[v]}")
    return "\n".join(lines) + "\n"


def partition_to_json_obj(p: Partition) -> dict:
    """JSON-ready summary with per-community stats and modularity."""
    dense = p.renumbered()
    g = dense.graph
    communities = []
    for c in dense.community_ids():
        st = dense.communities[c]
        communities.append(
            {
                "id": c,
                "size": st.size,
                "internal_edges": st.internal_twice // 2,
                "total_degree": st.total_degree,
                "members": [g.labels[v] for v in dense.members(c)],
            }
        )
    return {
        "q": modularity_q(g, dense),
        "n_communities": dense.n_communities,
        "communities": communities,
    }


def partition_to_json(p: Partition) -> str:
    return json.dumps(partition_to_json_obj(p), indent=2) + "\n"
