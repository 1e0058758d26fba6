"""Brute-force ground truth at desk scale.

Corpus generation, exhaustive isomorphism enumeration and the checks that
compare the structural pipeline against direct computation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterator, List, Optional, Tuple

from .errors import DomainError, SizeError
from .graph import Graph, is_c4_diamond_free, is_connected
from .iso import IsoClassifier, are_isomorphic
from .iso import enumerate_isomorphisms as _enumerate
from .ladders import induced_4cycles
from .token import TokenGraph, build_token_graph, complement_map, lift_isomorphism

MAX_CORPUS_N = 8
MAX_FILTER_N = 7
ORACLE_BOUND = 40


@dataclass(frozen=True)
class Corpus:
    n: int
    connected_only: bool
    graphs: Tuple[Graph, ...]

    def __iter__(self) -> Iterator[Graph]:
        return iter(self.graphs)

    def __len__(self) -> int:
        return len(self.graphs)


@lru_cache(maxsize=None)
def _all_free(n: int) -> Tuple[Graph, ...]:
    """All (C4,diamond)-free graphs on n vertices up to isomorphism, by vertex augmentation.

    The class is hereditary, so deleting the last vertex of any member gives a
    member on n - 1 vertices; adding a vertex in every possible way therefore
    reaches every isomorphism class.
    """
    if n == 0:
        return (Graph(0, []),)
    seen = IsoClassifier()
    out = []
    for g in _all_free(n - 1):
        base = list(g.edges())
        for mask in range(1 << (n - 1)):
            h = Graph(n, base + [(v, n - 1) for v in range(n - 1) if mask >> v & 1])
            if not is_c4_diamond_free(h):
                continue
            if seen.classify(h) == len(out):
                out.append(h)
    return tuple(out)


def generate_corpus(n: int, connected_only: bool = True, max_n: int = MAX_CORPUS_N) -> Corpus:
    """Pairwise non-isomorphic (C4,diamond)-free graphs on n vertices."""
    if n < 1:
        raise DomainError("corpus needs n >= 1")
    if n > max_n:
        raise SizeError(f"corpus on {n} vertices exceeds the bound {max_n}")
    graphs = _all_free(n)
    if connected_only:
        graphs = tuple(g for g in graphs if is_connected(g))
    return Corpus(n, connected_only, graphs)


def filter_corpus(n: int, connected_only: bool = True) -> Corpus:
    """Slow cross-check: filter every labelled graph on n vertices, then dedupe."""
    if n > MAX_FILTER_N:
        raise SizeError(f"filter enumeration on {n} vertices is too large")
    pairs = list(combinations(range(n), 2))
    seen = IsoClassifier()
    out = []
    for mask in range(1 << len(pairs)):
        g = Graph(n, [p for t, p in enumerate(pairs) if mask >> t & 1])
        if connected_only and not is_connected(g):
            continue
        if not is_c4_diamond_free(g):
            continue
        if seen.classify(g) == len(out):
            out.append(g)
    return Corpus(n, connected_only, tuple(out))


def oracle_bound(bound: Optional[int] = None) -> int:
    """Vertex guard for oracle enumeration; TOKENGRAPH_SIZE_GUARD overrides the default."""
    if bound is not None:
        return bound
    env = os.environ.get("TOKENGRAPH_SIZE_GUARD")
    return int(env) if env else ORACLE_BOUND


def enumerate_isomorphisms(f: Graph, g: Graph, bound: Optional[int] = None) -> List[List[int]]:
    """Every isomorphism f -> g; SizeError past the enumeration guard."""
    return _enumerate(f, g, oracle_bound(bound))


def verify_unique_reconstructibility(g: Graph, k: int) -> bool:
    """Aut(F_k(G)) is exactly the lifted group, doubled by complementation when 2k = n.

    Counts are compared and, independently, every enumerated automorphism of
    F_k(G) must be a lift of an automorphism of G, possibly followed by the
    complement map.
    """
    if not is_connected(g) or g.n < 3:
        raise DomainError("unique reconstructibility is checked on connected graphs with >= 3 vertices")
    if not 1 <= k <= g.n - 1:
        raise DomainError(f"token count {k} outside 1..{g.n - 1}")
    tg = build_token_graph(g, k)
    aut_g = enumerate_isomorphisms(g, g)
    aut_f = enumerate_isomorphisms(tg.graph, tg.graph)
    allowed = set()
    comp = None
    if 2 * k == g.n:
        _, comp = complement_map(tg)
    for phi in aut_g:
        lifted = lift_isomorphism(phi, k)
        allowed.add(tuple(lifted))
        if comp is not None:
            allowed.add(tuple(comp[x] for x in lifted))
    expected = len(aut_g) * (2 if comp is not None else 1)
    if len(allowed) != expected:
        return False
    return len(aut_f) == expected and all(tuple(m) in allowed for m in aut_f)


def infer_k(vertices: int, n: int) -> int:
    """Smallest k with C(n, k) = vertices."""
    for k in range(0, n + 1):
        if comb(n, k) == vertices:
            return k
    raise DomainError(f"no token count gives {vertices} configurations on {n} vertices")


def verify_reconstruction(f: Graph, result, k: Optional[int] = None) -> bool:
    """True iff F_k(result.j_forward) is isomorphic to f."""
    j = result.j_forward if hasattr(result, "j_forward") else result
    if k is None:
        k = infer_k(f.n, j.n)
    elif not 0 <= k <= j.n or comb(j.n, k) != f.n:
        return False
    if k in (0, j.n):
        return f.n == 1
    return are_isomorphic(build_token_graph(j, k).graph, f)


def p1_violations(f: Graph, limit: int = 1) -> List[Tuple[Tuple[int, int, int, int], int]]:
    """Induced 4-cycles and outside vertices seeing two opposite corners but not all four."""
    out = []
    for cyc in induced_4cycles(f):
        a, b, c, d = cyc
        mask = (1 << a) | (1 << b) | (1 << c) | (1 << d)
        for x in range(f.n):
            if mask >> x & 1:
                continue
            seen = f.adj[x] & mask
            opposite = (seen >> a & 1 and seen >> c & 1) or (seen >> b & 1 and seen >> d & 1)
            if opposite and seen != mask:
                out.append((cyc, x))
                if len(out) >= limit:
                    return out
    return out


def verify_p1_property(tg) -> bool:
    """(P1): a vertex adjacent to two opposite corners of an induced 4-cycle sees all four."""
    f = tg.graph if isinstance(tg, TokenGraph) else tg
    return not p1_violations(f)
