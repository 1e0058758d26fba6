"""Induced 4-cycles, ladder classes and the local views J_A."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import StructureError
from .graph import Edge, Graph, bits
from .token import TokenGraph

Cycle = Tuple[int, int, int, int]


def induced_4cycles(f: Graph) -> List[Cycle]:
    """All induced 4-cycles as (u, a, v, b) in cyclic order.

    Every induced C4 has two non-adjacent diagonal pairs; a cycle is reported
    from the diagonal containing its smallest vertex, with u that vertex.
    """
    out = []
    adj = f.adj
    for u in range(f.n):
        for v in range(u + 1, f.n):
            if adj[u] >> v & 1:
                continue
            common = bits(adj[u] & adj[v])
            for a, b in combinations(common, 2):
                if a > u and b > u and not adj[a] >> b & 1:
                    out.append((u, a, v, b))
    return out


def induced_4cycles_bruteforce(f: Graph) -> List[Cycle]:
    """Scan every 4-subset; used to cross-check the fast enumeration."""
    out = []
    for quad in combinations(range(f.n), 4):
        sub_edges = [(x, y) for x, y in combinations(quad, 2) if f.has_edge(x, y)]
        if len(sub_edges) != 4:
            continue
        deg = {x: 0 for x in quad}
        for x, y in sub_edges:
            deg[x] += 1
            deg[y] += 1
        if all(d == 2 for d in deg.values()):
            u = quad[0]
            a, b = [y for y in quad if f.has_edge(u, y)]
            v = next(y for y in quad if y not in (u, a, b))
            out.append((u, a, v, b))
    return out


def cycle_key(c: Cycle) -> frozenset:
    return frozenset(c)


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if rx < ry:
                self.parent[ry] = rx
            else:
                self.parent[rx] = ry


@dataclass(frozen=True)
class LadderClasses:
    edges: Tuple[Edge, ...]
    class_of: Dict[Edge, int]
    classes: Tuple[Tuple[Edge, ...], ...]

    def cls(self, u: int, v: int) -> int:
        return self.class_of[(u, v) if u < v else (v, u)]

    def members(self, u: int, v: int) -> Tuple[Edge, ...]:
        return self.classes[self.cls(u, v)]

    def __len__(self) -> int:
        return len(self.classes)

    def to_json(self) -> str:
        return json.dumps({"schema": "1", "classes": [[list(e) for e in c] for c in self.classes]})


def ladder_classes(f: Graph, cycles: Optional[Sequence[Cycle]] = None) -> LadderClasses:
    """Transitive closure of "opposite edges of an induced 4-cycle"."""
    edges = f.edges()
    eid = {e: i for i, e in enumerate(edges)}

    def key(x, y):
        return eid[(x, y) if x < y else (y, x)]

    uf = UnionFind(len(edges))
    for u, a, v, b in (induced_4cycles(f) if cycles is None else cycles):
        uf.union(key(u, a), key(v, b))
        uf.union(key(a, v), key(b, u))
    groups: Dict[int, List[Edge]] = {}
    for i, e in enumerate(edges):
        groups.setdefault(uf.find(i), []).append(e)
    # roots are the smallest edge index of each group, so sorting them orders classes by smallest edge
    ordered = [tuple(groups[r]) for r in sorted(groups)]
    class_of = {e: c for c, members in enumerate(ordered) for e in members}
    return LadderClasses(tuple(edges), class_of, tuple(ordered))


def same_base_edge_check(tg: TokenGraph, classes: LadderClasses) -> bool:
    """True iff all edges within each ladder class move a token along the same base edge."""
    for members in classes.classes:
        moves = {tg.subsets[a] ^ tg.subsets[b] for a, b in members}
        if len(moves) > 1:
            return False
    return True


def common_4cycle(f: Graph, a: int, b: int, c: int) -> bool:
    """Whether edges ab and ac lie on a common induced 4-cycle of f."""
    if f.adj[b] >> c & 1:
        return False
    return bool(f.adj[b] & f.adj[c] & ~f.adj[a] & ~(1 << a))


def invert_line_graph(line: Graph, bipartite: bool = True) -> Tuple[Graph, List[Edge]]:
    """A root graph R with L(R) = line, labelled: vertex i of line becomes edge ends[i].

    Backtracks over endpoint assignments in BFS order.  With ``bipartite`` the
    root is required to be bipartite, which removes the triangle/claw ambiguity.
    Raises StructureError when no root exists.
    """
    m = line.n
    order: List[int] = []
    parent: Dict[int, int] = {}
    seen = 0
    for s in range(m):
        if seen >> s & 1:
            continue
        seen |= 1 << s
        parent[s] = -1
        queue = [s]
        for x in queue:
            order.append(x)
            for y in bits(line.adj[x] & ~seen):
                seen |= 1 << y
                parent[y] = x
                queue.append(y)
    ends: List[Optional[Edge]] = [None] * m
    colour: List[int] = []
    incident: List[int] = []  # per root vertex, mask of line vertices using it
    placed = 0

    def consistent(e: int, p: int, q: int) -> bool:
        touching = incident[p] | incident[q]
        return (line.adj[e] & placed) == (touching & placed)

    def go(pos: int) -> bool:
        nonlocal placed
        if pos == m:
            return True
        e = order[pos]
        par = parent[e]
        if par < 0:
            p, q = len(colour), len(colour) + 1
            colour.extend((0, 1))
            incident.extend((1 << e, 1 << e))
            ends[e] = (p, q)
            placed |= 1 << e
            if go(pos + 1):
                return True
            placed &= ~(1 << e)
            del colour[-2:], incident[-2:]
            ends[e] = None
            return False
        for p in ends[par]:
            options = [w for w in range(len(colour)) if w != p] + [len(colour)]
            for q in options:
                fresh = q == len(colour)
                if fresh:
                    colour.append(1 - colour[p])
                    incident.append(0)
                elif bipartite and colour[q] == colour[p]:
                    continue
                if incident[p] & incident[q]:
                    ok = False
                else:
                    ok = consistent(e, p, q)
                if ok:
                    ends[e] = (min(p, q), max(p, q))
                    incident[p] |= 1 << e
                    incident[q] |= 1 << e
                    placed |= 1 << e
                    if go(pos + 1):
                        return True
                    placed &= ~(1 << e)
                    incident[p] &= ~(1 << e)
                    incident[q] &= ~(1 << e)
                    ends[e] = None
                if fresh:
                    colour.pop()
                    incident.pop()
        return False

    if not go(0):
        raise StructureError("line-graph", "incidence structure is not the line graph of a bipartite graph",
                             witness=line.edges())
    root = Graph(len(colour), [e for e in ends])
    return root, [e for e in ends]


@dataclass(frozen=True)
class LocalView:
    anchor: int
    neighbours: Tuple[int, ...]
    line_graph: Graph
    resolved: Graph
    edge_ends: Tuple[Edge, ...]

    def edge_of(self, b: int) -> Edge:
        """Root-graph edge standing for the F-edge from the anchor to b."""
        return self.edge_ends[self.neighbours.index(b)]


def local_view(f: Graph, classes: Optional[LadderClasses], a: int) -> LocalView:
    """J_A for anchor a: two F-edges at a share a root vertex unless they lie on
    a common induced 4-cycle.  ``classes`` is accepted for interface symmetry;
    the relation only needs f itself.
    """
    nbrs = f.neighbors(a)
    pairs = []
    for i, j in combinations(range(len(nbrs)), 2):
        if not common_4cycle(f, a, nbrs[i], nbrs[j]):
            pairs.append((i, j))
    line = Graph(len(nbrs), pairs)
    try:
        root, ends = invert_line_graph(line)
    except StructureError as exc:
        raise StructureError("local-view", f"no root graph at vertex {a}", witness=[a]) from exc
    return LocalView(a, tuple(nbrs), line, root, tuple(ends))


def base_local_graph(tg: TokenGraph, a: int) -> Graph:
    """G_A computed from the labels: the base edges with exactly one end in the subset of a."""
    s = tg.subsets[a]
    edges = [(u, v) for u, v in tg.base.edges() if (s >> u & 1) != (s >> v & 1)]
    used = sorted({x for e in edges for x in e})
    pos = {v: i for i, v in enumerate(used)}
    return Graph(len(used), [(pos[u], pos[v]) for u, v in edges])


def class_line_graph(f: Graph, classes: Optional[LadderClasses] = None,
                     cycles: Optional[Sequence[Cycle]] = None) -> Graph:
    """Graph on ladder classes: two classes are adjacent unless some induced 4-cycle
    carries an edge of each.  For a 3-connected base this is the line graph of G."""
    if cycles is None:
        cycles = induced_4cycles(f)
    if classes is None:
        classes = ladder_classes(f, cycles)
    together = set()
    for u, a, v, b in cycles:
        c1, c2 = classes.cls(u, a), classes.cls(a, v)
        together.add((min(c1, c2), max(c1, c2)))
    m = len(classes)
    return Graph(m, [(x, y) for x, y in combinations(range(m), 2) if (x, y) not in together])


def recover_from_ladders(f: Graph) -> Graph:
    """Base graph of a token graph whose base is 3-connected, via the class line graph.

    A 3-connected base on n >= 4 vertices has two disjoint edges, which span an
    induced 4-cycle whenever 2 <= k <= n - 2.  Without induced 4-cycles the token
    count is 1 or n - 1 and F is already isomorphic to the base.
    """
    cycles = induced_4cycles(f)
    if not cycles:
        return f
    root, _ = invert_line_graph(class_line_graph(f, cycles=cycles), bipartite=False)
    return root
