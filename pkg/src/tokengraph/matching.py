"""Maximum cardinality matching in general graphs (Edmonds' blossom algorithm)."""

from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import List, Optional, Tuple

from .errors import SizeError
from .graph import Edge, Graph


def maximum_matching(g: Graph) -> List[Edge]:
    """A maximum matching of g as a sorted list of edges (u, v) with u < v."""
    n = g.n
    nbrs = [g.neighbors(v) for v in range(n)]
    match = [-1] * n

    def find_path(root: int) -> int:
        used = [False] * n
        parent = [-1] * n
        base = list(range(n))
        used[root] = True
        queue = deque([root])

        def lca(a: int, b: int) -> int:
            seen = [False] * n
            while True:
                a = base[a]
                seen[a] = True
                if match[a] == -1:
                    break
                a = parent[match[a]]
            while True:
                b = base[b]
                if seen[b]:
                    return b
                b = parent[match[b]]

        def mark(v: int, b: int, child: int, blossom: List[bool]) -> None:
            while base[v] != b:
                blossom[base[v]] = blossom[base[match[v]]] = True
                parent[v] = child
                child = match[v]
                v = parent[match[v]]

        while queue:
            v = queue.popleft()
            for to in nbrs[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and parent[match[to]] != -1):
                    cur = lca(v, to)
                    blossom = [False] * n
                    mark(v, cur, to, blossom)
                    mark(to, cur, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if match[to] == -1:
                        # augment along the alternating path ending at `to`
                        w = to
                        while w != -1:
                            pv = parent[w]
                            nxt = match[pv]
                            match[w] = pv
                            match[pv] = w
                            w = nxt
                        return to
                    used[match[to]] = True
                    queue.append(match[to])
        return -1

    # a greedy start keeps the blossom phase short
    for u, v in g.edges():
        if match[u] == -1 and match[v] == -1:
            match[u], match[v] = v, u
    for v in range(n):
        if match[v] == -1:
            find_path(v)
    return sorted((v, match[v]) for v in range(n) if match[v] > v)


def matching_number(g: Graph) -> int:
    return len(maximum_matching(g))


def lexicographic_maximum_matching(g: Graph) -> List[Edge]:
    """The lexicographically smallest maximum matching (edges scanned in sorted order)."""
    target = matching_number(g)
    chosen: List[Edge] = []
    used = 0
    for u, v in g.edges():
        if used >> u & 1 or used >> v & 1 or len(chosen) == target:
            continue
        rest_mask = used | 1 << u | 1 << v
        rest = [w for w in range(g.n) if not rest_mask >> w & 1]
        sub, _ = g.induced_subgraph(rest)
        if len(chosen) + 1 + matching_number(sub) == target:
            chosen.append((u, v))
            used = rest_mask
    return chosen


def is_matching(g: Graph, edges) -> bool:
    seen = set()
    for u, v in edges:
        if not g.has_edge(u, v) or u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


def brute_force_matching_number(g: Graph, max_edges: int = 24) -> int:
    """Exhaustive search over edge subsets; only for small oracle checks."""
    edges = g.edges()
    if len(edges) > max_edges:
        raise SizeError(f"{len(edges)} edges exceeds exhaustive matching guard {max_edges}")
    best = 0
    for size in range(1, g.n // 2 + 1):
        if any(is_matching(g, sub) for sub in combinations(edges, size)):
            best = size
        else:
            break
    return best
