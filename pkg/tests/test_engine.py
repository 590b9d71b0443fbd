from __future__ import annotations

import json
import math
import random

import pytest

from moddiv import (
    BETWEENNESS,
    CLUSTERING_G3,
    ConfigError,
    EngineConfig,
    Graph,
    Partition,
    WorkingGraph,
    best_cut,
    bisect_community,
    modularity_q,
    refine,
    run_ccr,
    run_ccr_ebr,
)
from moddiv.engine import BorderlineSets, Dendrogram, TraceEntry, history_to_jsonl
from moddiv.modularity import MoveContext, apply_move
from moddiv.oracles import exhaustive_best_partition, gnp_connected


def _cfg(**kw) -> EngineConfig:
    return EngineConfig(**kw)


# -- config ------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ConfigError):
        _cfg(measure="nonsense").validate()
    with pytest.raises(ConfigError):
        _cfg(refine_max_passes=0).validate()
    with pytest.raises(ConfigError):
        _cfg(min_community_size=0).validate()
    with pytest.raises(ConfigError):
        _cfg(tie_break="random").validate()
    with pytest.raises(ConfigError):
        _cfg(q_improvement_eps=-1.0).validate()
    _cfg().validate()


def test_pipelines_reject_betweenness_for_phase_one(k3):
    with pytest.raises(ConfigError):
        run_ccr(k3, _cfg(measure=BETWEENNESS))
    with pytest.raises(ConfigError):
        run_ccr_ebr(k3, _cfg(measure=BETWEENNESS))


# -- bisect ------------------------------------------------------------------


def test_bisect_barbell_cuts_the_bridge(barbell):
    wg = WorkingGraph(barbell)
    bis = bisect_community(wg, range(6), _cfg())
    assert bis.side_a == (0, 1, 2)
    assert bis.side_b == (3, 4, 5)
    assert [eid for eid, _ in bis.removals] == [3]
    assert bis.removals[0][1] == 0.5
    # removals stay applied for inspection; the caller restores
    assert wg.is_removed(3)
    wg.restore_all()
    assert not wg.is_removed(3)


def test_bisect_path_betweenness_tie_breaks_low_edge_id(path3):
    bis = bisect_community(
        WorkingGraph(path3), range(3), _cfg(measure=BETWEENNESS)
    )
    assert [eid for eid, _ in bis.removals] == [0]
    assert bis.side_a == (0,)
    assert bis.side_b == (1, 2)


def test_bisect_k3_walks_through_infinities(k3):
    bis = bisect_community(WorkingGraph(k3), range(3), _cfg())
    assert [eid for eid, _ in bis.removals] == [0, 1]
    assert bis.removals[0][1] == 2.0
    assert math.isinf(bis.removals[1][1])
    assert bis.side_a == (0,)
    assert bis.side_b == (1, 2)


def test_bisect_preconditions(barbell, two_triangles):
    with pytest.raises(ValueError):
        bisect_community(WorkingGraph(barbell), [0], _cfg())
    with pytest.raises(ValueError):
        bisect_community(WorkingGraph(two_triangles), range(6), _cfg())
    lone = Graph(3, [(0, 1)])
    with pytest.raises(ValueError):
        bisect_community(WorkingGraph(lone), [0, 2], _cfg())


# -- refine ------------------------------------------------------------------


def test_refine_pulls_misassigned_bridge_endpoint_back(barbell):
    p = Partition(barbell, [0, 0, 0, 0, 1, 1])  # vertex 3 on the wrong side
    q_before = modularity_q(barbell, p)
    borderline = BorderlineSets()
    borderline.add(0, 3)
    p, moves = refine(barbell, p, borderline, _cfg())
    assert [(m.vertex, m.source, m.target) for m in moves] == [(3, 0, 1)]
    q_after = modularity_q(barbell, p)
    assert abs((q_after - q_before) - moves[0].gain) < 1e-12
    assert abs(q_after - 5.0 / 14.0) < 1e-12


def test_refine_is_a_fixed_point_on_good_partitions(barbell):
    p = Partition(barbell, [0, 0, 0, 1, 1, 1])
    borderline = BorderlineSets()
    borderline.add(0, 2)
    borderline.add(1, 3)
    p, moves = refine(barbell, p, borderline, _cfg())
    assert moves == []
    assert p.assignment == [0, 0, 0, 1, 1, 1]


def test_refine_never_lowers_q():
    rng = random.Random(13)
    for _ in range(25):
        g = gnp_connected(rng, rng.randint(5, 30), rng.choice((0.2, 0.4)))
        k = rng.randint(2, 4)
        raw = [rng.randrange(k) for _ in range(g.n)]
        seen: dict[int, int] = {}
        dense = []
        for c in raw:
            seen.setdefault(c, len(seen))
            dense.append(seen[c])
        p = Partition(g, dense)
        q_before = modularity_q(g, p)
        borderline = BorderlineSets()
        for v in range(g.n):
            borderline.add(p.community_of(v), v)
        p, _ = refine(g, p, borderline, _cfg())
        assert modularity_q(g, p) >= q_before - 1e-12


def test_borderline_update_after_move(barbell):
    p = Partition(barbell, [0, 0, 0, 0, 1, 1])
    borderline = BorderlineSets()
    borderline.add(0, 3)
    ctx = MoveContext(3, 0, 1, 1, 2, 3)
    apply_move(p, ctx)
    borderline.after_move(barbell, p, ctx)
    # the mover joined the destination set, its abandoned neighbor became
    # borderline on the source side
    assert borderline.sets[1] == {3}
    assert borderline.sets[0] == {2}


# -- pipelines ---------------------------------------------------------------


def test_two_disjoint_triangles(two_triangles):
    r = run_ccr(two_triangles)
    assert r.best_partition.n_communities == 2
    assert abs(r.best_q - 0.5) < 1e-12
    # the split was free: both communities exist from the start
    assert r.trace[0].n_communities == 2


def test_k3_stays_whole(k3):
    r = run_ccr(k3)
    assert r.best_partition.n_communities == 1
    assert r.best_q == 0.0


def test_barbell_both_pipelines(barbell):
    for runner in (run_ccr, run_ccr_ebr):
        r = runner(barbell)
        assert abs(r.best_q - 5.0 / 14.0) < 1e-12
        assert r.best_partition.n_communities == 2
        first_remove = next(e for e in r.history if e["type"] == "remove")
        assert first_remove["edge_id"] == 3


def test_isolated_vertex_is_its_own_community():
    g = Graph(4, [(1, 2), (2, 3)])
    r = run_ccr(g)
    lone = r.best_partition.community_of(0)
    assert r.best_partition.members(lone) == [0]


def test_engine_rejects_empty_graphs():
    with pytest.raises(ValueError):
        run_ccr(Graph(0, []))


def test_min_community_size_blocks_small_splits(path3):
    r = run_ccr(path3, _cfg(min_community_size=3))
    assert r.best_partition.n_communities == 1
    assert any(e["type"] == "reject" for e in r.history)


def test_trace_is_strictly_increasing_and_deterministic():
    rng = random.Random(29)
    for _ in range(15):
        g = gnp_connected(rng, rng.randint(6, 35), rng.choice((0.15, 0.35)))
        for runner in (run_ccr, run_ccr_ebr):
            r1 = runner(g)
            r2 = runner(g)
            assert r1.best_partition.assignment == r2.best_partition.assignment
            assert r1.history == r2.history
            qs = [t.q for t in r1.trace]
            assert all(b > a for a, b in zip(qs, qs[1:]))


def test_ebr_never_loses_to_ccr():
    rng = random.Random(37)
    for _ in range(15):
        g = gnp_connected(rng, rng.randint(6, 35), rng.choice((0.15, 0.35)))
        assert run_ccr_ebr(g).best_q >= run_ccr(g).best_q - 1e-12


def test_engine_never_beats_exhaustive_search():
    rng = random.Random(43)
    for _ in range(25):
        g = gnp_connected(rng, rng.randint(3, 8), rng.choice((0.3, 0.6)))
        _, opt = exhaustive_best_partition(g)
        for runner in (run_ccr, run_ccr_ebr):
            assert runner(g).best_q <= opt + 1e-12


def test_dendrogram_nodes_partition_their_parents():
    rng = random.Random(53)
    for _ in range(10):
        g = gnp_connected(rng, rng.randint(8, 40), 0.2)
        r = run_ccr_ebr(g)
        d = r.dendrogram
        for node in d.nodes:
            if node.children:
                union: set = set()
                for c in node.children:
                    child = d.nodes[c].members
                    assert not (union & child)
                    union |= child
                assert union == node.members
        leaves: set = set()
        for leaf in d.leaves():
            leaves |= leaf.members
        assert leaves == set(range(g.n))


def test_best_cut_takes_argmax_then_fewest_communities(path3):
    d = Dendrogram(path3)
    d.trace = [
        TraceEntry("init", 0.0, 1, (0, 0, 0)),
        TraceEntry("split", 0.31, 2, (0, 1, 1)),
        TraceEntry("split", 0.42, 2, (0, 0, 1)),
        TraceEntry("split", 0.40, 3, (0, 1, 2)),
    ]
    assert best_cut(d).assignment == [0, 0, 1]
    d.trace.append(TraceEntry("split", 0.42, 3, (0, 1, 2)))
    assert best_cut(d).assignment == [0, 0, 1]  # tie goes to fewer communities


def test_best_cut_on_run_matches_reported_best(barbell):
    r = run_ccr_ebr(barbell)
    cut = best_cut(r.dendrogram)
    assert cut.assignment == r.best_partition.assignment


def test_history_serializes_as_json_lines(barbell):
    r = run_ccr(barbell)
    text = history_to_jsonl(r.history)
    events = [json.loads(line) for line in text.strip().splitlines()]
    assert events == r.history
    assert all("q_after" in e and "type" in e for e in events)
    assert {e["type"] for e in events} <= {"remove", "move", "accept", "reject"}


def test_dendrogram_exports(barbell):
    r = run_ccr(barbell)
    obj = r.dendrogram.to_json_obj()
    assert obj["n_vertices"] == 6
    assert json.loads(json.dumps(obj)) == obj
    newick = r.dendrogram.to_newick()
    assert newick.endswith(";\n")
    assert newick.count("(") == newick.count(")")


def test_detection_result_q_matches_partition(barbell, two_triangles):
    for g in (barbell, two_triangles):
        for runner in (run_ccr, run_ccr_ebr):
            r = runner(g)
            assert r.best_q == modularity_q(g, r.best_partition)
            assert r.best_q >= r.trace[0].q
