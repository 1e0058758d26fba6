"""Isomorphism search by colour refinement with individualization.

Both graphs are refined jointly so that equal colours mean the same thing on
either side; a colour histogram mismatch at any point prunes the branch.
"""

from __future__ import annotations

import os
from collections import Counter
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import SizeError
from .graph import Graph, bits

DEFAULT_BOUND = 16
DEFAULT_NODE_BUDGET = 2_000_000


def enumeration_bound(bound: Optional[int] = None) -> int:
    """Vertex bound for exhaustive enumeration; TOKENGRAPH_SIZE_GUARD overrides the default."""
    if bound is not None:
        return bound
    env = os.environ.get("TOKENGRAPH_SIZE_GUARD")
    if env:
        return int(env)
    return DEFAULT_BOUND


def _neighbour_lists(g: Graph) -> List[List[int]]:
    return [bits(m) for m in g.adj]


def _refine(na, ca, nb, cb):
    """Refine two colourings to a joint stable state; None on histogram mismatch."""
    classes = len(set(ca) | set(cb))
    while True:
        sa = [(ca[v], tuple(sorted(ca[w] for w in na[v]))) for v in range(len(na))]
        sb = [(cb[v], tuple(sorted(cb[w] for w in nb[v]))) for v in range(len(nb))]
        rank = {s: i for i, s in enumerate(sorted(set(sa) | set(sb)))}
        ca = [rank[s] for s in sa]
        cb = [rank[s] for s in sb]
        if Counter(ca) != Counter(cb):
            return None
        if len(rank) == classes:
            return ca, cb
        classes = len(rank)


class _Search:
    def __init__(self, g: Graph, h: Graph, budget: int):
        self.g, self.h = g, h
        self.na, self.nb = _neighbour_lists(g), _neighbour_lists(h)
        self.budget = budget
        self.nodes = 0

    def run(self, ca, cb) -> Iterator[List[int]]:
        self.nodes += 1
        if self.nodes > self.budget:
            raise SizeError(f"isomorphism search exceeded {self.budget} nodes")
        res = _refine(self.na, ca, self.nb, cb)
        if res is None:
            return
        ca, cb = res
        counts = Counter(ca)
        split = [c for c, cnt in counts.items() if cnt > 1]
        if not split:
            where = {c: w for w, c in enumerate(cb)}
            mapping = [where[c] for c in ca]
            if all(self._image_mask(mapping, v) == self.h.adj[mapping[v]] for v in range(self.g.n)):
                yield mapping
            return
        target = min(split)
        v = next(x for x in range(self.g.n) if ca[x] == target)
        fresh = max(counts) + 1
        for w in range(self.h.n):
            if cb[w] != target:
                continue
            ca2 = list(ca)
            cb2 = list(cb)
            ca2[v] = fresh
            cb2[w] = fresh
            yield from self.run(ca2, cb2)

    def _image_mask(self, mapping, v) -> int:
        m = 0
        for w in self.na[v]:
            m |= 1 << mapping[w]
        return m


def iter_isomorphisms(g: Graph, h: Graph, budget: int = DEFAULT_NODE_BUDGET) -> Iterator[List[int]]:
    """Yield every isomorphism g -> h as a list mapping[v] = image of v."""
    if g.n != h.n or g.num_edges() != h.num_edges():
        return
    if sorted(g.degrees()) != sorted(h.degrees()):
        return
    search = _Search(g, h, budget)
    yield from search.run([0] * g.n, [0] * h.n)


def find_isomorphism(g: Graph, h: Graph, budget: int = DEFAULT_NODE_BUDGET) -> Optional[List[int]]:
    """Some isomorphism g -> h, or None.  Deterministic for fixed inputs."""
    for mapping in iter_isomorphisms(g, h, budget):
        return mapping
    return None


def are_isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


def enumerate_isomorphisms(g: Graph, h: Graph, bound: Optional[int] = None,
                           budget: int = DEFAULT_NODE_BUDGET) -> List[List[int]]:
    """All isomorphisms g -> h; raises SizeError past the vertex bound or node budget."""
    limit = enumeration_bound(bound)
    if max(g.n, h.n) > limit:
        raise SizeError(f"{max(g.n, h.n)} vertices exceeds enumeration bound {limit}")
    return list(iter_isomorphisms(g, h, budget))


def automorphism_count(g: Graph, bound: Optional[int] = None,
                       budget: int = DEFAULT_NODE_BUDGET) -> int:
    """|Aut(g)| by exhaustive enumeration."""
    return len(enumerate_isomorphisms(g, g, bound, budget))


def is_isomorphism(g: Graph, h: Graph, mapping: Sequence[int]) -> bool:
    if g.n != h.n or len(mapping) != g.n or sorted(mapping) != list(range(h.n)):
        return False
    if g.num_edges() != h.num_edges():
        return False
    return all(h.has_edge(mapping[u], mapping[v]) for u, v in g.edges())


def invariant_key(g: Graph) -> Tuple:
    """Isomorphism invariant built from the colour-refinement history.

    Equal graphs up to isomorphism always share the key; distinct keys prove
    non-isomorphism.  Used to bucket graphs before exact tests.
    """
    nbrs = _neighbour_lists(g)
    colours = [0] * g.n
    history = []
    classes = 1 if g.n else 0
    while True:
        sigs = [(colours[v], tuple(sorted(colours[w] for w in nbrs[v]))) for v in range(g.n)]
        ordered = sorted(set(sigs))
        rank = {s: i for i, s in enumerate(ordered)}
        history.append(tuple(sorted(sigs)))
        colours = [rank[s] for s in sigs]
        if len(ordered) == classes:
            break
        classes = len(ordered)
    return (g.n, g.num_edges(), tuple(history))


class IsoClassifier:
    """Buckets graphs into isomorphism classes with stable integer ids."""

    def __init__(self):
        self._buckets: Dict[Tuple, List[Tuple[Graph, int]]] = {}
        self.representatives: List[Graph] = []

    def classify(self, g: Graph) -> int:
        key = invariant_key(g)
        bucket = self._buckets.setdefault(key, [])
        for rep, cid in bucket:
            if find_isomorphism(g, rep) is not None:
                return cid
        cid = len(self.representatives)
        self.representatives.append(g)
        bucket.append((g, cid))
        return cid
