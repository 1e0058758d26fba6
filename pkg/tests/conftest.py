from __future__ import annotations

import networkx as nx
import pytest

from tokengraph.graph import Graph

# filled by test_acceptance.py, printed once at the end of the run
ACCEPTANCE: dict = {}


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def from_nx(h: nx.Graph) -> Graph:
    nodes = sorted(h.nodes())
    pos = {v: i for i, v in enumerate(nodes)}
    return Graph(len(nodes), [(pos[u], pos[v]) for u, v in h.edges()])


def nx_iso_count(g: Graph, h: Graph) -> int:
    return sum(1 for _ in nx.algorithms.isomorphism.GraphMatcher(to_nx(g), to_nx(h)).isomorphisms_iter())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {text}")


@pytest.fixture
def acceptance():
    return ACCEPTANCE
