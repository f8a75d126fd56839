import random

import pytest

from ledgergraph.graph import (
    AddArcResult,
    DirectedGraph,
    induced_subgraph,
    main_component,
    strongly_connected_components,
    undirected_projection,
    weakly_connected_components,
)

from synth import random_digraph


def graph_from(arcs, n=None):
    n = n if n is not None else (max((max(a, b) for a, b in arcs), default=-1) + 1)
    g = DirectedGraph.with_node_count(n)
    for a, b in arcs:
        g.add_arc(a, b)
    return g


class TestInterning:
    def test_first_insertion_gets_id_zero(self):
        g = DirectedGraph()
        assert g.intern_address("0xabc") == 0
        assert g.node_count == 1

    def test_idempotent(self):
        g = DirectedGraph()
        g.intern_address("0xabc")
        assert g.intern_address("0xabc") == 0
        assert g.node_count == 1

    def test_incremental_assignment(self):
        g = DirectedGraph()
        g.intern_address("0xabc")
        assert g.intern_address("rXYZ") == 1

    def test_empty_address_rejected(self):
        with pytest.raises(ValueError):
            DirectedGraph().intern_address("")

    def test_ids_follow_first_seen_order(self):
        rng = random.Random(5)
        addresses = [f"a{i}" for i in range(200)]
        rng.shuffle(addresses)
        g = DirectedGraph()
        for addr in addresses:
            g.intern_address(addr)
        for addr in addresses:
            g.intern_address(addr)  # idempotent second pass
        assert [g.address_of(i) for i in range(200)] == addresses
        assert g.node_count == 200


class TestAddArc:
    def test_insert(self):
        g = DirectedGraph.with_node_count(2)
        assert g.add_arc(0, 1) is AddArcResult.INSERTED
        assert g.arc_count == 1

    def test_duplicate_increments_multiplicity(self):
        g = DirectedGraph.with_node_count(2)
        g.add_arc(0, 1)
        assert g.add_arc(0, 1) is AddArcResult.DUPLICATED
        assert g.arc_count == 1
        assert g.multiplicity(0, 1) == 2

    def test_self_loop_discarded_but_counted(self):
        g = DirectedGraph.with_node_count(3)
        assert g.add_arc(2, 2) is AddArcResult.SELF_LOOP_DISCARDED
        assert g.arc_count == 0
        assert g.self_loop_count == 1

    def test_out_of_range_rejected(self):
        g = DirectedGraph.with_node_count(2)
        with pytest.raises(ValueError):
            g.add_arc(0, 2)
        with pytest.raises(ValueError):
            g.add_arc(-1, 0)

    def test_submission_accounting(self):
        rng = random.Random(11)
        g = DirectedGraph.with_node_count(10)
        submissions = 0
        loops = 0
        for _ in range(500):
            a, b = rng.randrange(10), rng.randrange(10)
            g.add_arc(a, b)
            if a == b:
                loops += 1
            else:
                submissions += 1
        assert g.pair_submissions == submissions
        assert g.self_loop_count == loops
        assert g.arc_count <= submissions
        total_multiplicity = sum(g.multiplicity(a, b) for a, b in g.arcs())
        assert total_multiplicity == submissions
        expected = (submissions - g.arc_count) / submissions
        assert g.edge_reuse_ratio() == pytest.approx(expected)


class TestComponents:
    def test_weak_single_chain(self):
        g = graph_from([(0, 1), (1, 2)])
        comps = weakly_connected_components(g)
        assert len(comps) == 1
        assert comps[0].members == frozenset({0, 1, 2})
        assert comps[0].is_main

    def test_strong_chain_is_singletons(self):
        g = graph_from([(0, 1), (1, 2)])
        comps = strongly_connected_components(g)
        assert sorted(len(c) for c in comps) == [1, 1, 1]

    def test_strong_cycle_plus_arc(self):
        g = graph_from([(0, 1), (1, 0), (2, 3)])
        comps = strongly_connected_components(g)
        members = sorted(sorted(c.members) for c in comps)
        assert members == [[0], [1], [2], [3]] or members == [[0, 1], [2], [3]]
        assert members == [[0, 1], [2], [3]]
        main = main_component(g, "strong")
        assert main.members == frozenset({0, 1})

    def test_main_tie_broken_by_lowest_node(self):
        # two weak components of equal size
        g = graph_from([(2, 3), (0, 1)])
        main = main_component(g, "weak")
        assert main.members == frozenset({0, 1})

    def test_partitions(self):
        for seed in range(10):
            g = random_digraph(60, 150, seed)
            for comps in (weakly_connected_components(g), strongly_connected_components(g)):
                covered = sorted(v for c in comps for v in c.members)
                assert covered == list(range(60))
                assert sum(c.is_main for c in comps) == 1
                assert len(comps[0]) == max(len(c) for c in comps)

    def test_strong_inside_weak(self):
        g = random_digraph(80, 200, 3)
        weak_of = {}
        for c in weakly_connected_components(g):
            for v in c.members:
                weak_of[v] = c.members
        for c in strongly_connected_components(g):
            homes = {frozenset(weak_of[v]) for v in c.members}
            assert len(homes) == 1

    def test_weak_components_match_projection(self):
        g = random_digraph(50, 90, 9)
        direct = {frozenset(c.members) for c in weakly_connected_components(g)}
        projected = {
            frozenset(c.members)
            for c in weakly_connected_components(undirected_projection(g))
        }
        assert direct == projected

    def test_strong_components_are_maximal_mutual_reachability(self):
        from collections import deque

        for seed in range(6):
            rng = random.Random(seed + 40)
            n = rng.randrange(5, 30)
            m = rng.randrange(n, min(4 * n, n * (n - 1)))
            g = random_digraph(n, m, seed)

            def reachable(start):
                seen = {start}
                queue = deque([start])
                while queue:
                    u = queue.popleft()
                    for v in g.successors(u):
                        if v not in seen:
                            seen.add(v)
                            queue.append(v)
                return seen

            reach = [reachable(v) for v in range(n)]
            comp_of = {}
            for c in strongly_connected_components(g):
                for v in c.members:
                    comp_of[v] = c
            for u in range(n):
                for v in range(n):
                    mutual = v in reach[u] and u in reach[v]
                    assert (comp_of[u] is comp_of[v]) == mutual

    def test_strong_components_iterative_on_long_chain(self):
        # a 5000-cycle would blow the recursion limit in a recursive Tarjan
        n = 5000
        g = graph_from([(i, (i + 1) % n) for i in range(n)])
        comps = strongly_connected_components(g)
        assert len(comps) == 1
        assert len(comps[0]) == n


class TestProjectionAndSubgraph:
    def test_projection_symmetric(self):
        g = graph_from([(0, 1)])
        p = undirected_projection(g)
        assert sorted(p.arcs()) == [(0, 1), (1, 0)]

    def test_projection_idempotent(self):
        g = graph_from([(0, 1), (1, 0), (1, 2)])
        once = undirected_projection(g)
        twice = undirected_projection(once)
        assert sorted(once.arcs()) == sorted(twice.arcs()) == [(0, 1), (1, 0), (1, 2), (2, 1)]

    def test_induced_subgraph_renumbers(self):
        g = graph_from([(0, 2), (2, 4), (4, 0), (1, 3)], n=5)
        sub, original = induced_subgraph(g, {0, 2, 4})
        assert original == [0, 2, 4]
        assert sub.node_count == 3
        assert sorted(sub.arcs()) == [(0, 1), (1, 2), (2, 0)]

    def test_induced_subgraph_keeps_labels(self):
        g = DirectedGraph()
        g.add_interaction("a", "b")
        g.add_interaction("b", "c")
        sub, original = induced_subgraph(g, {1, 2})
        assert [sub.address_of(i) for i in range(2)] == ["b", "c"]
