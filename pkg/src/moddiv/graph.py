"""Graph representation, file loaders, and connectivity queries.

The whole library works on a simple undirected graph with dense vertex ids
0..n-1 and dense edge ids 0..m-1.  Vertex and edge ids are assigned in
first-appearance order of the input file, which makes every downstream
tie-break (and therefore every run) reproducible for a given input.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass


class GraphLoadError(Exception):
    """Input file could not be parsed into a valid simple graph."""


@dataclass(frozen=True)
class LoadWarnings:
    """Counters for input constructs dropped during canonicalization."""

    duplicates: int = 0
    self_loops: int = 0
    unknown_keys: tuple[str, ...] = ()

    def any(self) -> bool:
        return bool(self.duplicates or self.self_loops or self.unknown_keys)


class Graph:
    """Immutable simple undirected graph.

    Attributes:
        n: vertex count.
        m: edge count.
        labels: per-vertex display label (defaults to the vertex id as text).
        edges: edge id -> (u, v) with u < v.
        adj: per-vertex list of (neighbor, edge id), sorted by neighbor.
        degrees: per-vertex degree.
        warnings: canonicalization counters from the loader, if any.
    """

    __slots__ = ("n", "m", "labels", "edges", "adj", "degrees", "warnings")

    def __init__(
        self,
        n: int,
        pairs: list[tuple[int, int]],
        labels: list[str] | None = None,
        extra_warnings: LoadWarnings | None = None,
    ):
        if labels is not None and len(labels) != n:
            raise ValueError("labels length must equal vertex count")
        self.n = n
        self.labels = list(labels) if labels is not None else [str(v) for v in range(n)]

        edges: list[tuple[int, int]] = []
        seen: set[tuple[int, int]] = set()
        duplicates = 0
        self_loops = 0
        for u, v in pairs:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                self_loops += 1
                continue
            key = (u, v) if u < v else (v, u)
            if key in seen:
                duplicates += 1
                continue
            seen.add(key)
            edges.append(key)
        self.edges = edges
        self.m = len(edges)

        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(edges):
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        for lst in adj:
            lst.sort()
        self.adj = adj
        self.degrees = [len(lst) for lst in adj]

        unknown = extra_warnings.unknown_keys if extra_warnings else ()
        self.warnings = LoadWarnings(duplicates, self_loops, unknown)

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        """(neighbor, edge id) pairs of v, sorted by neighbor id."""
        return self.adj[v]

    def degree(self, v: int) -> int:
        return self.degrees[v]

    def endpoints(self, eid: int) -> tuple[int, int]:
        return self.edges[eid]

    def edge_label_pair(self, eid: int) -> tuple[str, str]:
        u, v = self.edges[eid]
        return self.labels[u], self.labels[v]

    def validate(self) -> None:
        """Assert the simple-graph invariants; used by tests."""
        assert sum(self.degrees) == 2 * self.m
        for u, v in self.edges:
            assert u != v
        assert len(set(self.edges)) == self.m
        for v in range(self.n):
            for w, eid in self.adj[v]:
                assert (v, eid) in self.adj[w]


class WorkingGraph:
    """Mutable edge-deletion overlay used during bisection.

    Queries reflect the base graph minus the removed edge set.  Removal is
    reversible; the engine restores edges between bisections.
    """

    __slots__ = ("base", "removed")

    def __init__(self, base: Graph):
        self.base = base
        self.removed: set[int] = set()

    def remove_edge(self, eid: int) -> None:
        self.removed.add(eid)

    def restore_edge(self, eid: int) -> None:
        self.removed.discard(eid)

    def restore_all(self) -> None:
        self.removed.clear()

    def is_removed(self, eid: int) -> bool:
        return eid in self.removed

    def neighbors(self, v: int):
        """Yield (neighbor, edge id) pairs of v, skipping removed edges."""
        removed = self.removed
        for w, eid in self.base.adj[v]:
            if eid not in removed:
                yield w, eid

    def degree(self, v: int) -> int:
        removed = self.removed
        return sum(1 for _, eid in self.base.adj[v] if eid not in removed)


@dataclass(frozen=True)
class ComponentLabeling:
    """Connected-component labels for (a subset of) a working graph.

    Vertices outside the queried subset carry label -1.
    """

    labels: list[int]
    count: int

    def groups(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.count)]
        for v, c in enumerate(self.labels):
            if c >= 0:
                out[c].append(v)
        return out


def connected_components(g: WorkingGraph, within=None) -> ComponentLabeling:
    """Label connected components, restricted to non-removed edges.

    If `within` is given, traversal is confined to that vertex subset and all
    other vertices are labeled -1.
    """
    n = g.base.n
    if within is None:
        allowed = None
        order = range(n)
    else:
        allowed = set(within)
        if not allowed:
            raise ValueError("vertex subset must be nonempty")
        order = sorted(allowed)

    labels = [-1] * n
    count = 0
    for start in order:
        if labels[start] != -1:
            continue
        labels[start] = count
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w, _ in g.neighbors(v):
                if labels[w] == -1 and (allowed is None or w in allowed):
                    labels[w] = count
                    queue.append(w)
        count += 1
    return ComponentLabeling(labels, count)


def reachable_within(g: WorkingGraph, start: int, allowed: set[int], stop_at: int | None = None) -> set[int]:
    """Vertices reachable from `start` inside `allowed` over non-removed edges.

    When `stop_at` is supplied the search aborts as soon as that vertex is
    reached (the returned set is then partial); bisection uses this to test
    cheaply whether an edge removal disconnected its endpoints.
    """
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w, _ in g.neighbors(v):
            if w not in seen and w in allowed:
                if w == stop_at:
                    seen.add(w)
                    return seen
                seen.add(w)
                queue.append(w)
    return seen


# ---------------------------------------------------------------------------
# Loading


def load_edge_list(path, delimiter: str | None = None, comment_prefix: str = "#") -> Graph:
    """Load a graph from a text edge list.

    One edge per line, two whitespace- (or `delimiter`-) separated vertex
    tokens; lines starting with `comment_prefix` are ignored.  Tokens become
    vertex labels; ids are assigned in first-appearance order.  Self-loops
    and duplicate edges are dropped and counted in `Graph.warnings`.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise GraphLoadError(f"cannot read {path}: {exc}") from exc

    index: dict[str, int] = {}
    labels: list[str] = []
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith(comment_prefix):
            continue
        tokens = line.split(delimiter) if delimiter else line.split()
        if len(tokens) != 2:
            raise GraphLoadError(f"{path}:{lineno}: expected 2 vertex tokens, got {len(tokens)}")
        ids = []
        for tok in tokens:
            if tok not in index:
                index[tok] = len(labels)
                labels.append(tok)
            ids.append(index[tok])
        pairs.append((ids[0], ids[1]))

    g = Graph(len(labels), pairs, labels)
    if g.m == 0:
        raise GraphLoadError(f"{path}: no edges left after canonicalization")
    return g


_GML_TOKEN = re.compile(r'"[^"]*"|\[|\]|[^\s\[\]]+')

_GML_KNOWN_GRAPH_KEYS = {"node", "edge", "directed", "id", "label", "comment"}
_GML_KNOWN_NODE_KEYS = {"id", "label"}
_GML_KNOWN_EDGE_KEYS = {"source", "target"}


def _gml_parse_block(tokens: list[str], pos: int) -> tuple[list[tuple[str, object]], int]:
    """Parse tokens after '[' until the matching ']'; returns (entries, next pos)."""
    entries: list[tuple[str, object]] = []
    while pos < len(tokens):
        tok = tokens[pos]
        if tok == "]":
            return entries, pos + 1
        key = tok
        pos += 1
        if pos >= len(tokens):
            raise GraphLoadError(f"malformed GML: key {key!r} has no value")
        val_tok = tokens[pos]
        if val_tok == "[":
            sub, pos = _gml_parse_block(tokens, pos + 1)
            entries.append((key, sub))
        else:
            if val_tok.startswith('"'):
                value: object = val_tok[1:-1]
            else:
                try:
                    value = int(val_tok)
                except ValueError:
                    try:
                        value = float(val_tok)
                    except ValueError:
                        value = val_tok
            entries.append((key, value))
            pos += 1
    raise GraphLoadError("malformed GML: unterminated block")


def load_gml(path) -> Graph:
    """Load a graph from a GML file.

    Supports the common subset `graph [ node [ id N label "..." ] edge [
    source N target N ] ]`.  Unknown keys are ignored and reported through
    `Graph.warnings`; a `directed 1` flag is accepted but edges are
    symmetrized and deduplicated.  Node labels are preserved for output.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise GraphLoadError(f"cannot read {path}: {exc}") from exc

    tokens = _GML_TOKEN.findall(text)
    try:
        graph_at = tokens.index("graph")
    except ValueError:
        raise GraphLoadError(f"{path}: no 'graph' block found") from None
    if graph_at + 1 >= len(tokens) or tokens[graph_at + 1] != "[":
        raise GraphLoadError(f"{path}: 'graph' is not followed by a block")
    entries, _ = _gml_parse_block(tokens, graph_at + 2)

    index: dict[int, int] = {}
    labels: list[str] = []
    raw_edges: list[tuple[int, int]] = []
    unknown: list[str] = []

    for key, value in entries:
        if key == "node":
            if not isinstance(value, list):
                raise GraphLoadError(f"{path}: 'node' is not a block")
            node_id = None
            label = None
            for k, v in value:
                if k == "id":
                    node_id = v
                elif k == "label":
                    label = str(v)
                elif k not in _GML_KNOWN_NODE_KEYS and k not in unknown:
                    unknown.append(k)
            if not isinstance(node_id, int):
                raise GraphLoadError(f"{path}: node without an integer id")
            if node_id in index:
                raise GraphLoadError(f"{path}: duplicate node id {node_id}")
            index[node_id] = len(labels)
            labels.append(label if label is not None else str(node_id))
        elif key == "edge":
            if not isinstance(value, list):
                raise GraphLoadError(f"{path}: 'edge' is not a block")
            source = target = None
            for k, v in value:
                if k == "source":
                    source = v
                elif k == "target":
                    target = v
                elif k not in _GML_KNOWN_EDGE_KEYS and k not in unknown:
                    unknown.append(k)
            if not isinstance(source, int) or not isinstance(target, int):
                raise GraphLoadError(f"{path}: edge without integer source/target")
            raw_edges.append((source, target))
        elif key not in _GML_KNOWN_GRAPH_KEYS and key not in unknown:
            unknown.append(key)

    pairs = []
    for source, target in raw_edges:
        for ref in (source, target):
            if ref not in index:
                raise GraphLoadError(f"{path}: edge references unknown node id {ref}")
        pairs.append((index[source], index[target]))

    g = Graph(len(labels), pairs, labels, LoadWarnings(unknown_keys=tuple(unknown)))
    if g.m == 0:
        raise GraphLoadError(f"{path}: no edges left after canonicalization")
    return g


# ---------------------------------------------------------------------------
# Writing


def write_edge_list(g: Graph, path, delimiter: str = "\t") -> None:
    """Write one `label<delimiter>label` line per edge, in edge-id order."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edges:
            fh.write(f"{g.labels[u]}{delimiter}{g.labels[v]}\n")


def write_gml(g: Graph, path) -> None:
    """Write the graph in the GML subset understood by `load_gml`."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("graph [\n")
        for v in range(g.n):
            label = g.labels[v].replace('"', "'")
            fh.write(f'  node [\n    id {v}\n    label "{label}"\n  ]\n')
        for u, v in g.edges:
            fh.write(f"  edge [\n    source {u}\n    target {v}\n  ]\n")
        fh.write("]\n")
