from __future__ import annotations

from itertools import combinations

import json

import networkx as nx
import pytest

from conftest import from_nx, to_nx
from tokengraph.errors import StructureError
from tokengraph.families import complete, cycle, path, petersen, star
from tokengraph.graph import Graph, vertex_connectivity
from tokengraph.iso import are_isomorphic
from tokengraph.ladders import (base_local_graph, class_line_graph, common_4cycle, cycle_key, induced_4cycles,
                                induced_4cycles_bruteforce, invert_line_graph, ladder_classes, local_view,
                                recover_from_ladders, same_base_edge_check)
from tokengraph.oracle import generate_corpus
from tokengraph.token import build_token_graph


def test_induced_4cycle_examples():
    assert len(induced_4cycles(cycle(4))) == 1
    assert induced_4cycles(complete(4)) == []
    f = build_token_graph(path(4), 2).graph
    assert {cycle_key(c) for c in induced_4cycles(f)} == {cycle_key(c) for c in induced_4cycles_bruteforce(f)}


def test_induced_4cycles_are_induced_and_exhaustive_on_corpus():
    for n in range(4, 7):
        for g in generate_corpus(n):
            for k in range(1, n):
                f = build_token_graph(g, k).graph
                ours = induced_4cycles(f)
                for a, b, c, d in ours:
                    sub, _ = f.induced_subgraph([a, b, c, d])
                    assert sorted(sub.degrees()) == [2, 2, 2, 2]
                    assert f.has_edge(a, b) and f.has_edge(b, c) and f.has_edge(c, d) and f.has_edge(d, a)
                assert len(ours) == len({cycle_key(c) for c in ours})
                assert {cycle_key(c) for c in ours} == {cycle_key(c) for c in induced_4cycles_bruteforce(f)}


def test_ladder_class_examples():
    assert len(ladder_classes(build_token_graph(complete(4), 2).graph)) == 6
    tree = path(6)
    classes = ladder_classes(tree)
    assert len(classes) == tree.num_edges()
    assert all(len(c) == 1 for c in classes.classes)


def test_ladder_classes_partition_edges():
    f = build_token_graph(petersen(), 2).graph
    classes = ladder_classes(f)
    seen = [e for c in classes.classes for e in c]
    assert sorted(seen) == f.edges()
    assert len(classes) == 15
    for (u, v) in f.edges():
        assert (u, v) in classes.members(u, v)
    data = json.loads(classes.to_json())
    assert data["schema"] == "1" and len(data["classes"]) == 15


def test_same_base_edge_check():
    assert same_base_edge_check(build_token_graph(complete(4), 2), ladder_classes(build_token_graph(complete(4), 2).graph))
    tg = build_token_graph(path(5), 2)
    assert same_base_edge_check(tg, ladder_classes(tg.graph))


def test_same_base_edge_on_corpus():
    for n in range(3, 8):
        for g in generate_corpus(n):
            for k in range(1, n):
                tg = build_token_graph(g, k)
                assert same_base_edge_check(tg, ladder_classes(tg.graph))


def test_c4_token_graph_merges_base_edges():
    # outside the (C4,diamond)-free class a single ladder class may mix base edges
    tg = build_token_graph(cycle(4), 2)
    assert not same_base_edge_check(tg, ladder_classes(tg.graph))


def test_common_4cycle():
    f = build_token_graph(path(4), 2)
    a = f.vertex_of([0, 2])
    b = f.vertex_of([1, 2])
    c = f.vertex_of([0, 3])
    assert common_4cycle(f.graph, a, b, c)  # moves along disjoint edges 01 and 23
    d = f.vertex_of([0, 1])
    assert not common_4cycle(f.graph, a, b, d)  # both moves touch vertex 1


def test_invert_line_graph_against_networkx():
    for h in (path(5), cycle(6), star(4), petersen(), complete(4)):
        line = from_nx(nx.line_graph(to_nx(h)))
        root, ends = invert_line_graph(line, bipartite=False)
        assert are_isomorphic(root, h)
        for x, y in line.edges():
            assert set(ends[x]) & set(ends[y])


def test_invert_line_graph_bipartite_resolves_triangle():
    root, _ = invert_line_graph(complete(3), bipartite=True)
    assert are_isomorphic(root, star(3))
    root, _ = invert_line_graph(complete(3), bipartite=False)
    assert root.n in (3, 4)
    with pytest.raises(StructureError):
        invert_line_graph(star(3), bipartite=False)  # the claw is not a line graph


def test_local_views_match_base_on_corpus():
    for n in range(3, 7):
        for g in generate_corpus(n):
            for k in range(1, n):
                tg = build_token_graph(g, k)
                classes = ladder_classes(tg.graph)
                for a in range(tg.graph.n):
                    lv = local_view(tg.graph, classes, a)
                    assert are_isomorphic(lv.resolved, base_local_graph(tg, a))
                    assert len(lv.edge_ends) == len(lv.neighbours)


def test_class_line_graph_recovers_three_connected_bases():
    for g in (complete(4), complete(5), petersen()):
        assert vertex_connectivity(g) >= 3
        for k in range(2, g.n - 1):
            if g.n == 10 and k > 3:
                continue
            f = build_token_graph(g, k).graph
            assert len(ladder_classes(f)) == g.num_edges()
            assert are_isomorphic(class_line_graph(f), from_nx(nx.line_graph(to_nx(g))))
            assert are_isomorphic(recover_from_ladders(f), g)


def test_one_token_graphs_carry_no_disjointness_signal():
    # with a single token no two moves are disjoint, so the class graph is complete
    f = build_token_graph(complete(4), 1).graph
    assert class_line_graph(f) == complete(6)
    # so recovery falls back to F itself, which is the base for k in {1, n-1}
    for k in (1, 3):
        assert are_isomorphic(recover_from_ladders(build_token_graph(complete(4), k).graph), complete(4))
