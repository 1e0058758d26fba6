from __future__ import annotations

from math import factorial

import pytest

import networkx as nx

from conftest import nx_iso_count, to_nx
from tokengraph.errors import DomainError, PreconditionError
from tokengraph.families import complete, cycle, path, star
from tokengraph.graph import Graph
from tokengraph.iso import is_isomorphism
from tokengraph.star import (StarSeed, count_star_isomorphisms, default_seed, extend_labeling, iter_star_seeds,
                             recognize_star_token, star_parameters, star_token_graph)
from tokengraph.token import build_token_graph


def test_star_parameters_examples():
    f = build_token_graph(star(4), 2).graph
    p = star_parameters(f)
    assert (p.n, p.k) == (4, 2)
    assert star_parameters(complete(3)) is None
    c6 = star_parameters(cycle(6))
    assert tuple(c6) == (3, 2)


def test_recognize_examples():
    rec = recognize_star_token(build_token_graph(star(5), 3).graph)
    assert rec is not None and tuple(rec[0]) == (5, 3)
    assert recognize_star_token(build_token_graph(cycle(5), 2).graph) is None
    rec = recognize_star_token(star(3))
    assert rec is not None and tuple(rec[0]) == (3, 1)
    assert recognize_star_token(cycle(6)) is not None  # C6 is F_2(K_{1,3})


def test_labeling_is_an_isomorphism():
    for n in range(2, 7):
        for k in range(1, (n + 1) // 2 + 1):
            f = build_token_graph(star(n), k).graph
            relabelled = f.relabel(list(reversed(range(f.n))))
            params, lab = recognize_star_token(relabelled)
            assert is_isomorphism(relabelled, star_token_graph(params.n, params.k).graph, list(lab.labels))
            subsets = lab.subsets()
            for x in range(f.n):
                assert (0 in subsets[x]) == (not params.part0 >> x & 1)


def test_every_seed_extends_uniquely_or_fails():
    f = build_token_graph(star(4), 2).graph
    params = star_parameters(f)
    results = [extend_labeling(f, params, s) for s in iter_star_seeds(f, params)]
    ok = [r for r in results if r is not None]
    assert len({r.labels for r in ok}) == len(ok) == 24


def test_malformed_seed_is_rejected():
    f = build_token_graph(star(4), 2).graph
    params = star_parameters(f)
    seed = default_seed(f, params)
    bad = StarSeed(seed.v_star, seed.w[:-1], seed.v, seed.image)
    with pytest.raises(PreconditionError):
        extend_labeling(f, params, bad)


def test_degree_preserving_mutations_agree_with_bruteforce():
    f = build_token_graph(star(4), 2).graph
    edges = f.edges()
    rejected = 0
    for i, a in enumerate(edges):
        for b in edges[i + 1:]:
            if len({*a, *b}) != 4 or f.has_edge(a[0], b[1]) or f.has_edge(b[0], a[1]):
                continue
            swapped = Graph(f.n, [e for e in edges if e not in (a, b)] + [(a[0], b[1]), (b[0], a[1])])
            assert sorted(swapped.degrees()) == sorted(f.degrees())
            truth = nx.is_isomorphic(to_nx(swapped), to_nx(f))
            assert (recognize_star_token(swapped) is not None) == truth
            rejected += not truth
    assert rejected > 0


@pytest.mark.parametrize("n", range(2, 7))
def test_star_counts_match_bruteforce(n):
    for k in range(1, (n + 1) // 2 + 1):
        f = build_token_graph(star(n), k).graph
        params = star_parameters(f)
        got = count_star_isomorphisms(f, params)
        expected = factorial(n) * (2 if 2 * k == n + 1 else 1)
        assert got == expected
        if f.n <= 20:
            assert got == nx_iso_count(f, star_token_graph(params.n, params.k).graph)


def test_count_rejects_non_star():
    f = build_token_graph(cycle(5), 2).graph
    with pytest.raises(DomainError):
        count_star_isomorphisms(f, star_parameters(build_token_graph(star(4), 2).graph))


def test_recognition_agrees_with_bruteforce_on_bipartite_inputs():
    from tokengraph.graph import is_bipartite
    from tokengraph.iso import are_isomorphic
    from tokengraph.oracle import generate_corpus

    for n in range(2, 7):
        for g in generate_corpus(n):
            for k in range(1, n):
                f = build_token_graph(g, k).graph
                if f.n > 35 or not is_bipartite(f):
                    continue
                truth = any(are_isomorphic(f, build_token_graph(star(m), l).graph)
                            for m in range(2, 8) for l in range(1, m + 1)
                            if build_token_graph(star(m), l).graph.n == f.n)
                assert (recognize_star_token(f) is not None) == truth
