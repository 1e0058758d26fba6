"""Immutable simple graphs on vertices ``0..n-1`` with bitmask adjacency."""

from __future__ import annotations

from collections import deque
from typing import Iterable, List, Sequence, Tuple

Edge = Tuple[int, int]


def bits(mask: int) -> List[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class Graph:
    """Undirected simple graph.  Value semantics: equal iff same n and edges."""

    __slots__ = ("n", "adj", "_edges")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        adj = [0] * n
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.adj: Tuple[int, ...] = tuple(adj)
        self._edges = None

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> "Graph":
        g = cls.__new__(cls)
        g.n = len(masks)
        g.adj = tuple(masks)
        g._edges = None
        for v, m in enumerate(g.adj):
            if m >> v & 1:
                raise ValueError(f"self-loop at {v}")
            for w in bits(m):
                if w >= g.n or not g.adj[w] >> v & 1:
                    raise ValueError("adjacency masks are not symmetric")
        return g

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, v: int) -> List[int]:
        return bits(self.adj[v])

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> List[int]:
        return [m.bit_count() for m in self.adj]

    def edges(self) -> List[Edge]:
        if self._edges is None:
            self._edges = [(u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]
        return list(self._edges)

    def num_edges(self) -> int:
        return sum(m.bit_count() for m in self.adj) // 2

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"

    def induced_subgraph(self, vertices: Iterable[int]) -> Tuple["Graph", List[int]]:
        """Subgraph induced by ``vertices``; returns it with the list old[i]."""
        old = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(old)}
        edges = [(pos[u], pos[w]) for u in old for w in bits(self.adj[u]) if w in pos and u < w]
        return Graph(len(old), edges), old

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex v renamed to perm[v]."""
        return Graph(self.n, [(perm[u], perm[v]) for u, v in self.edges()])

    def complement(self) -> "Graph":
        full = (1 << self.n) - 1
        return Graph.from_masks([full & ~m & ~(1 << v) for v, m in enumerate(self.adj)])

    def without_edges(self, removed: Iterable[Edge]) -> "Graph":
        drop = {tuple(sorted(e)) for e in removed}
        return Graph(self.n, [e for e in self.edges() if e not in drop])


def connected_components(g: Graph) -> List[List[int]]:
    """Vertex sets of the components, each sorted, ordered by smallest vertex."""
    seen = 0
    comps = []
    for s in range(g.n):
        if seen >> s & 1:
            continue
        comp = 1 << s
        frontier = 1 << s
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= g.adj[v]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        comps.append(bits(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


def vertex_connectivity(g: Graph) -> int:
    """Smallest number of vertices whose removal disconnects g (n - 1 for complete graphs).

    Exhaustive over vertex subsets in increasing size; intended for small graphs.
    """
    from itertools import combinations

    if g.n <= 1 or not is_connected(g):
        return 0
    for size in range(g.n - 1):
        for cut in combinations(range(g.n), size):
            rest = [v for v in range(g.n) if v not in cut]
            if not is_connected(g.induced_subgraph(rest)[0]):
                return size
    return g.n - 1


def bfs_distances(g: Graph, source: int) -> List[int]:
    """Distances from ``source``; unreachable vertices get -1."""
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in bits(g.adj[v]):
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def is_bipartite(g: Graph) -> bool:
    return bipartition(g) is not None


def bipartition(g: Graph):
    """Two-colouring as a list of 0/1 per vertex, or None if an odd cycle exists."""
    colour = [-1] * g.n
    for s in range(g.n):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in bits(g.adj[v]):
                if colour[w] < 0:
                    colour[w] = 1 - colour[v]
                    queue.append(w)
                elif colour[w] == colour[v]:
                    return None
    return colour


def is_c4_diamond_free(g: Graph) -> bool:
    """True iff g has no induced 4-cycle and no induced diamond.

    Both forbidden graphs are exactly the 4-vertex graphs containing two
    non-adjacent vertices with two common neighbours, so it suffices to look
    at common neighbourhoods of non-adjacent pairs.
    """
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if not g.adj[u] >> v & 1 and (g.adj[u] & g.adj[v]).bit_count() > 1:
                return False
    return True


def disjoint_union(graphs: Sequence[Graph]) -> Graph:
    edges = []
    offset = 0
    for h in graphs:
        edges.extend((u + offset, v + offset) for u, v in h.edges())
        offset += h.n
    return Graph(offset, edges)
