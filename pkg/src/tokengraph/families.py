"""Named graphs used by tests, examples and the CLI."""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .graph import Graph, disjoint_union


def empty(n: int) -> Graph:
    return Graph(n)


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return Graph(n, combinations(range(n), 2))


def star(m: int) -> Graph:
    """K_{1,m} with centre 0 and leaves 1..m."""
    return Graph(m + 1, [(0, i) for i in range(1, m + 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def diamond() -> Graph:
    return Graph(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """g □ h with vertex (a, b) numbered a * |h| + b."""
    edges = []
    for a in range(g.n):
        for u, v in h.edges():
            edges.append((a * h.n + u, a * h.n + v))
    for u, v in g.edges():
        for b in range(h.n):
            edges.append((u * h.n + b, v * h.n + b))
    return Graph(g.n * h.n, edges)


def cartesian_power(factors: Sequence[Graph]) -> Graph:
    out = Graph(1)
    for f in factors:
        out = cartesian_product(out, f)
    return out


def hypercube(d: int) -> Graph:
    return Graph(1 << d, [(v, v | 1 << i) for v in range(1 << d) for i in range(d) if not v >> i & 1])


__all__ = [
    "empty", "path", "cycle", "complete", "star", "complete_bipartite", "diamond",
    "petersen", "cartesian_product", "cartesian_power", "hypercube", "disjoint_union",
]
