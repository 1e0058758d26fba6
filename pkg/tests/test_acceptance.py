"""Acceptance criteria.  Each test records one pass/fail line, printed at the end of the run."""

from __future__ import annotations

from math import comb, factorial

import networkx as nx

from conftest import ACCEPTANCE, nx_iso_count, to_nx
from tokengraph.factor import cartesian_factorize, reconstruct_disconnected, search_distinct_k_collision
from tokengraph.families import complete_bipartite, cycle, star
from tokengraph.graph import connected_components, is_c4_diamond_free, is_connected, vertex_connectivity
from tokengraph.iso import are_isomorphic
from tokengraph.ladders import ladder_classes, recover_from_ladders
from tokengraph.oracle import (enumerate_isomorphisms, generate_corpus, verify_p1_property,
                               verify_unique_reconstructibility)
from tokengraph.reconstruct import reconstruct
from tokengraph.star import count_star_isomorphisms, star_parameters
from tokengraph.token import build_token_graph, complement_map, lift_isomorphism


def record(key: int, failures: list, text: str) -> None:
    ACCEPTANCE[key] = (not failures, text if not failures else f"{text}; {len(failures)} failures, first {failures[0]}")
    print(f"criterion {key}: {'PASS' if not failures else 'FAIL'}  {ACCEPTANCE[key][1]}")
    assert not failures, failures[:5]


def test_criterion_1_roundtrip():
    failures, cases = [], 0
    for n in range(4, 8):
        for g in generate_corpus(n):
            for k in range(2, n // 2 + 1):
                cases += 1
                out = reconstruct(build_token_graph(g, k).graph).j_forward
                if not nx.is_isomorphic(to_nx(out), to_nx(g)):
                    failures.append((g.edges(), k))
    record(1, failures, f"round-trip on {cases} connected (G, k), 4 <= n <= 7, 2 <= k <= n/2")


def test_criterion_2_automorphism_counts():
    failures, cases = [], 0
    for n in range(3, 7):
        for g in generate_corpus(n):
            aut_g = len(enumerate_isomorphisms(g, g))
            for k in range(1, n):
                cases += 1
                f = build_token_graph(g, k).graph
                want = aut_g * (2 if 2 * k == n else 1)
                got = len(enumerate_isomorphisms(f, f))
                if got != want or nx_iso_count(f, f) != want or not verify_unique_reconstructibility(g, k):
                    failures.append((g.edges(), k, got, want))
    record(2, failures, f"|Aut(F_k(G))| equals the lifted count on {cases} (G, k), 3 <= n <= 6")


def test_criterion_3_strict_inclusions():
    failures = []
    for g, lifted in ((complete_bipartite(2, 3), 12), (cycle(4), 16)):
        f = build_token_graph(g, 2).graph
        aut_f = enumerate_isomorphisms(f, f)
        aut_g = enumerate_isomorphisms(g, g)
        lifts = {tuple(lift_isomorphism(p, 2)) for p in aut_g}
        if 2 * 2 == g.n:
            _, comp = complement_map(build_token_graph(g, 2))
            lifts |= {tuple(comp[x] for x in m) for m in lifts}
        if len(aut_f) != 48 or nx_iso_count(f, f) != 48:
            failures.append(("aut F", g.edges(), len(aut_f)))
        if len(lifts) != lifted or not lifts < {tuple(m) for m in aut_f}:
            failures.append(("lifted", g.edges(), len(lifts)))
    record(3, failures, "|Aut(F_2(K_{2,3}))| = 48 > 12 and |Aut(F_2(C4))| = 48 > 16")


def test_criterion_4_star_counts():
    failures, cases = [], 0
    for n in range(2, 7):
        for k in range(1, (n + 1) // 2 + 1):
            cases += 1
            f = build_token_graph(star(n), k).graph
            want = factorial(n) * (2 if 2 * k == n + 1 else 1)
            params = star_parameters(f)
            counts = (len(enumerate_isomorphisms(f, f)), nx_iso_count(f, f),
                      count_star_isomorphisms(f, params) if params else None)
            if any(c != want for c in counts):
                failures.append((n, k, counts, want))
    record(4, failures, f"star isomorphism counts on {cases} (n, k), 2 <= n <= 6")


def test_criterion_5_primality():
    failures, cases = [], 0
    for n in range(2, 8):
        for g in generate_corpus(n):
            for k in range(1, n):
                cases += 1
                if len(cartesian_factorize(build_token_graph(g, k).graph)) != 1:
                    failures.append((g.edges(), k))
    record(5, failures, f"one Cartesian factor for {cases} corpus token graphs, n <= 7")


def test_criterion_6_ladders_and_line_graph():
    failures, cases, bases = [], 0, 0
    for n in range(4, 8):
        for g in generate_corpus(n):
            conn = vertex_connectivity(g)
            if conn != nx.node_connectivity(to_nx(g)):
                failures.append(("connectivity", g.edges()))
            if conn < 3:
                continue
            bases += 1
            for k in range(1, n):
                cases += 1
                f = build_token_graph(g, k).graph
                if len(ladder_classes(f)) != g.num_edges():
                    failures.append(("classes", g.edges(), k))
                if not are_isomorphic(recover_from_ladders(f), g):
                    failures.append(("inversion", g.edges(), k))
    if not bases:
        failures.append("no 3-connected corpus graph")
    record(6, failures, f"ladder classes = ||G|| and inversion on {cases} (G, k) over {bases} 3-connected bases")


def test_criterion_7_disconnected():
    failures, cases = [], 0
    for n in range(2, 9):
        for g in generate_corpus(n, connected_only=False):
            if is_connected(g):
                continue
            comps = [g.induced_subgraph(c)[0] for c in connected_components(g)]
            want = [c for c in comps if c.n > 1]
            isolated = len(comps) - len(want)
            for k in range(1, n // 2 + 1):
                cases += 1
                out = reconstruct_disconnected(build_token_graph(g, k).graph, n, k)
                left = list(want)
                ok = out.isolated_count == isolated and len(out.nontrivial_components) == len(want)
                for c in out.nontrivial_components if ok else ():
                    hit = next((i for i, w in enumerate(left) if nx.is_isomorphic(to_nx(c), to_nx(w))), None)
                    if hit is None:
                        ok = False
                        break
                    left.pop(hit)
                if not ok:
                    failures.append((g.edges(), k))
    record(7, failures, f"component multiset and isolated count on {cases} disconnected (G, k), n <= 8")


def test_criterion_8_p1_and_safety():
    failures, cases = [], 0
    for n in range(2, 8):
        for g in generate_corpus(n):
            for k in range(1, n):
                cases += 1
                if not verify_p1_property(build_token_graph(g, k)):
                    failures.append(("p1", g.edges(), k))
                if n >= 4 and 2 <= k <= n - 2:
                    out = reconstruct(build_token_graph(g, k).graph).j_forward
                    if not is_c4_diamond_free(out):
                        failures.append(("output", g.edges(), k))
    record(8, failures, f"(P1) and (C4,diamond)-free outputs on {cases} corpus (G, k), n <= 7")


def independent_check(pair) -> bool:
    (g1, k1), (g2, k2) = pair
    a, b = to_nx(g1), to_nx(g2)
    return (k1 != k2 and comb(g1.n, k1) == comb(g2.n, k2) and not nx.is_isomorphic(a, b)
            and not nx.is_connected(a) and not nx.is_connected(b)
            and is_c4_diamond_free(g1) and is_c4_diamond_free(g2)
            and nx.is_isomorphic(to_nx(build_token_graph(g1, k1).graph), to_nx(build_token_graph(g2, k2).graph)))


def test_criterion_9_collision_soundness():
    pairs = search_distinct_k_collision(7) + search_distinct_k_collision(8, min_k=2)
    failures = [p for p in pairs if not independent_check(p)]
    record(9, failures, f"{len(pairs)} collision pairs emitted (n <= 7 any k, n <= 8 with k >= 2), all verified")
