"""Graph substrate: construction, the moralisation pipeline, exports."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evidentia.errors import CycleError, DuplicateEdge, InvalidQuery, UnknownNode
from evidentia.graphs import (
    CiQuery,
    Dag,
    UGraph,
    ancestral_graph,
    dag_to_dot,
    moralize,
    query_ci,
    separated,
    ugraph_to_dot,
)

from . import genmodels, oracles

COLLIDER = Dag.from_edges([("A", "C"), ("B", "C")])
CHAIN = Dag.from_edges([("A", "B"), ("B", "C")])


@st.composite
def dags_with_query(draw: st.DrawFn) -> tuple[Dag, CiQuery]:
    n = draw(st.integers(min_value=2, max_value=6))
    labels = [f"n{i}" for i in range(n)]
    order = draw(st.permutations(labels))
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                edges.add((order[i], order[j]))
    g = Dag(frozenset(labels), frozenset(edges))
    picks = draw(st.permutations(labels))
    na = draw(st.integers(min_value=1, max_value=max(1, n - 1)))
    nb = draw(st.integers(min_value=1, max_value=max(1, n - na)))
    nc = draw(st.integers(min_value=0, max_value=n - na - nb))
    q = CiQuery(
        frozenset(picks[:na]),
        frozenset(picks[na : na + nb]),
        frozenset(picks[na + nb : na + nb + nc]),
    )
    return g, q


class TestConstruction:
    def test_add_edge_base_case(self):
        g = Dag(frozenset({"A", "B"})).add_edge("A", "B")
        assert g.edges == {("A", "B")}

    def test_two_cycle_rejected(self):
        g = Dag.from_edges([("A", "B")])
        with pytest.raises(CycleError):
            g.add_edge("B", "A")

    def test_three_cycle_rejected(self):
        with pytest.raises(CycleError):
            CHAIN.add_edge("C", "A")

    def test_duplicate_edge_rejected(self):
        with pytest.raises(DuplicateEdge):
            CHAIN.add_edge("A", "B")

    def test_missing_endpoint_rejected(self):
        with pytest.raises(UnknownNode):
            CHAIN.add_edge("A", "Z")

    def test_value_semantics(self):
        g = Dag(frozenset({"A", "B"}))
        g2 = g.add_edge("A", "B")
        assert g.edges == frozenset()
        assert g2.edges == {("A", "B")}
        assert g.add_node("C") is not g2

    def test_self_loop_rejected_at_construction(self):
        with pytest.raises(CycleError):
            Dag(frozenset({"A"}), frozenset({("A", "A")}))

    def test_cyclic_edge_set_rejected_at_construction(self):
        with pytest.raises(CycleError):
            Dag(frozenset({"A", "B", "C"}), frozenset({("A", "B"), ("B", "C"), ("C", "A")}))

    def test_empty_node_id_rejected(self):
        with pytest.raises(UnknownNode):
            Dag(frozenset({""}))


class TestParents:
    def test_collider_parents(self):
        assert COLLIDER.parents("C") == {"A", "B"}

    def test_root_has_no_parents(self):
        assert COLLIDER.parents("A") == frozenset()

    def test_matches_edge_scan(self):
        rng = random.Random(11)
        for _ in range(30):
            g = genmodels.random_dag(rng, 5)
            for v in g.nodes:
                assert g.parents(v) == {t for t, h in g.edges if h == v}
                assert g.children(v) == {h for t, h in g.edges if t == v}

    def test_unknown_node(self):
        with pytest.raises(UnknownNode):
            COLLIDER.parents("Z")


class TestAncestralGraph:
    def test_collider_child_dropped(self):
        g = ancestral_graph(COLLIDER, {"A", "B"})
        assert g.nodes == {"A", "B"}
        assert g.edges == frozenset()

    def test_chain_middle_retained(self):
        g = ancestral_graph(CHAIN, {"A", "C"})
        assert g.nodes == {"A", "B", "C"}
        assert g.edges == CHAIN.edges

    def test_matches_leaf_stripping(self):
        rng = random.Random(23)
        for _ in range(50):
            g = genmodels.random_dag(rng, 6)
            keep = frozenset(rng.sample(sorted(g.nodes), 3))
            got = ancestral_graph(g, keep)
            nodes, edges = oracles.ancestral_by_leaf_stripping(g.nodes, g.edges, keep)
            assert got.nodes == nodes
            assert got.edges == edges

    def test_idempotent(self):
        rng = random.Random(7)
        for _ in range(25):
            g = genmodels.random_dag(rng, 6)
            keep = frozenset(rng.sample(sorted(g.nodes), 2))
            once = ancestral_graph(g, keep)
            assert ancestral_graph(once, keep) == once

    def test_unknown_keep_node(self):
        with pytest.raises(UnknownNode):
            ancestral_graph(CHAIN, {"A", "Z"})


class TestMoralize:
    def test_collider_gains_moral_arc(self):
        assert moralize(COLLIDER).arcs == {("A", "C"), ("B", "C"), ("A", "B")}

    def test_chain_unchanged(self):
        assert moralize(CHAIN).arcs == {("A", "B"), ("B", "C")}

    def test_three_parents_fully_married(self):
        g = Dag.from_edges([("P1", "X"), ("P2", "X"), ("P3", "X")])
        arcs = moralize(g).arcs
        moral = {a for a in arcs if "X" not in a}
        assert moral == {("P1", "P2"), ("P1", "P3"), ("P2", "P3")}

    def test_directed_image_is_skeleton(self):
        rng = random.Random(3)
        for _ in range(30):
            g = genmodels.random_dag(rng, 6)
            assert g.skeleton().arcs <= moralize(g).arcs


class TestSeparated:
    def test_direct_arc_connects(self):
        u = UGraph(frozenset({"A", "B"}), frozenset({("A", "B")}))
        assert separated(u, {"A"}, {"B"}) is False

    def test_blocked_chain(self):
        u = UGraph(frozenset({"A", "B", "C"}), frozenset({("A", "C"), ("C", "B")}))
        assert separated(u, {"A"}, {"B"}, {"C"}) is True

    def test_matches_removal_oracle(self):
        rng = random.Random(41)
        for _ in range(60):
            labels = [f"n{i}" for i in range(8)]
            arcs = frozenset(
                (labels[i], labels[j])
                for i in range(8)
                for j in range(i + 1, 8)
                if rng.random() < 0.3
            )
            u = UGraph(frozenset(labels), arcs)
            a, b, c = genmodels.disjoint_query_sets(rng, labels)
            assert separated(u, a, b, c) == oracles.separated_by_removal(
                labels, arcs, a, b, c
            )

    def test_overlapping_sets_rejected(self):
        u = UGraph(frozenset({"A", "B"}), frozenset({("A", "B")}))
        with pytest.raises(InvalidQuery):
            separated(u, {"A"}, {"A", "B"})


class TestQueryCi:
    def test_chain_screened_by_middle(self):
        assert query_ci(CHAIN, CiQuery(frozenset("A"), frozenset("C"), frozenset("B")))

    def test_collider_opened_by_conditioning(self):
        q = CiQuery(frozenset("A"), frozenset("B"), frozenset("C"))
        assert query_ci(COLLIDER, q) is False

    def test_collider_marginally_independent(self):
        assert query_ci(COLLIDER, CiQuery(frozenset("A"), frozenset("B"))) is True

    def test_conditioning_on_collider_descendant_opens_path(self):
        g = Dag.from_edges([("A", "C"), ("B", "C"), ("C", "D")])
        assert query_ci(g, CiQuery(frozenset("A"), frozenset("B"), frozenset("D"))) is False

    @given(dags_with_query())
    @settings(max_examples=200, deadline=None)
    def test_matches_path_blocking_oracle(self, gq: tuple[Dag, CiQuery]):
        g, q = gq
        expected = oracles.d_separated_by_paths(g.nodes, g.edges, q.a, q.b, q.c)
        assert query_ci(g, q) == expected

    @given(dags_with_query())
    @settings(max_examples=200, deadline=None)
    def test_equals_step_composition(self, gq: tuple[Dag, CiQuery]):
        g, q = gq
        pipeline = separated(
            moralize(ancestral_graph(g, q.a | q.b | q.c)), q.a, q.b, q.c
        )
        assert query_ci(g, q) == pipeline

    @given(dags_with_query())
    @settings(max_examples=100, deadline=None)
    def test_symmetric_in_a_and_b(self, gq: tuple[Dag, CiQuery]):
        g, q = gq
        assert query_ci(g, q) == query_ci(g, CiQuery(q.b, q.a, q.c))

    def test_unknown_node_rejected(self):
        with pytest.raises(InvalidQuery):
            query_ci(CHAIN, CiQuery(frozenset("A"), frozenset("Z")))

    def test_invalid_sets_rejected_at_construction(self):
        with pytest.raises(InvalidQuery):
            CiQuery(frozenset(), frozenset("B"))
        with pytest.raises(InvalidQuery):
            CiQuery(frozenset("A"), frozenset("A"))
        with pytest.raises(InvalidQuery):
            CiQuery(frozenset("A"), frozenset("B"), frozenset("A"))


class TestTopologicalOrder:
    def test_single_edge(self):
        assert Dag.from_edges([("A", "B")]).topological_order() == ("A", "B")

    def test_lexicographic_tie_break(self):
        assert Dag(frozenset({"B", "A"})).topological_order() == ("A", "B")

    def test_edges_point_forward(self):
        rng = random.Random(5)
        for _ in range(40):
            g = genmodels.random_dag(rng, 7)
            order = g.topological_order()
            assert sorted(order) == sorted(g.nodes)
            pos = {v: i for i, v in enumerate(order)}
            assert all(pos[t] < pos[h] for t, h in g.edges)

    def test_reproducible(self):
        g = genmodels.random_dag(random.Random(9), 7)
        assert g.topological_order() == Dag(g.nodes, g.edges).topological_order()


class TestDotExport:
    def test_dag_block(self):
        assert dag_to_dot(CHAIN, name="chain") == (
            'digraph "chain" {\n'
            '  "A";\n'
            '  "B";\n'
            '  "C";\n'
            '  "A" -> "B";\n'
            '  "B" -> "C";\n'
            "}\n"
        )

    def test_ugraph_block(self):
        u = UGraph(frozenset({"A", "B"}), frozenset({("B", "A")}))
        assert ugraph_to_dot(u) == 'graph "ugraph" {\n  "A";\n  "B";\n  "A" -- "B";\n}\n'

    def test_ids_quoted_verbatim(self):
        g = Dag.from_edges([("S knife used?", "40")])
        out = dag_to_dot(g)
        assert '"S knife used?" -> "40";' in out

    def test_quote_escaping(self):
        g = Dag(frozenset({'say "hi"'}))
        assert '"say \\"hi\\"";' in dag_to_dot(g)
