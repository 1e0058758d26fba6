"""k-token graphs, the complement map, lifts of isomorphisms and reconstruction families."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .errors import DomainError
from .graph import Graph, bits


def k_subsets(n: int, k: int) -> List[int]:
    """All k-subsets of range(n) as bitmasks, in colexicographic order."""
    if k == 0:
        return [0]
    out = []
    x = (1 << k) - 1
    limit = 1 << n
    while x < limit:
        out.append(x)
        # Gosper's hack: next integer with the same popcount
        c = x & -x
        r = x + c
        x = (((r ^ x) >> 2) // c) | r
    return out


@dataclass(frozen=True)
class TokenGraph:
    base: Graph
    k: int
    subsets: Tuple[int, ...]
    graph: Graph
    index: Dict[int, int] = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.base.n

    def subset(self, i: int) -> List[int]:
        return bits(self.subsets[i])

    def vertex_of(self, subset) -> int:
        mask = subset if isinstance(subset, int) else sum(1 << v for v in subset)
        return self.index[mask]


def build_token_graph(g: Graph, k: int) -> TokenGraph:
    """F_k(g): k-subsets adjacent when their symmetric difference is an edge of g."""
    if not 1 <= k <= g.n - 1:
        raise DomainError(f"k={k} outside 1..{g.n - 1}")
    return _build(g, k)


def _build(g: Graph, k: int) -> TokenGraph:
    subsets = k_subsets(g.n, k)
    index = {m: i for i, m in enumerate(subsets)}
    masks = [0] * len(subsets)
    for i, a in enumerate(subsets):
        for u in bits(a):
            rest = a ^ (1 << u)
            for v in bits(g.adj[u] & ~a):
                masks[i] |= 1 << index[rest | 1 << v]
    return TokenGraph(g, k, tuple(subsets), Graph.from_masks(masks), index)


def complement_map(tg: TokenGraph) -> Tuple[TokenGraph, List[int]]:
    """The map A -> V(G) minus A, as an isomorphism F_k(G) -> F_{n-k}(G).

    When k = n/2 the target is tg itself and the map is an automorphism.
    """
    n = tg.n
    full = (1 << n) - 1
    target = tg if 2 * tg.k == n else _build(tg.base, n - tg.k)
    mapping = [target.index[full ^ a] for a in tg.subsets]
    return target, mapping


def lift_isomorphism(f: Sequence[int], k: int) -> List[int]:
    """The lift of a vertex bijection f: H -> G to token graphs of order k.

    Index i of F_k(H) is sent to the index of {f(v) : v in A_i} in F_k(G);
    both use the colex ordering of k_subsets(n, k).
    """
    n = len(f)
    subsets = k_subsets(n, k)
    index = {m: i for i, m in enumerate(subsets)}
    out = []
    for a in subsets:
        img = 0
        for v in bits(a):
            img |= 1 << f[v]
        out.append(index[img])
    return out


@dataclass(frozen=True)
class KappaSet:
    pivot: int
    members: FrozenSet[int]


def kappa(tg: TokenGraph, u: int) -> KappaSet:
    """Token configurations containing u."""
    if not 0 <= u < tg.n:
        raise DomainError(f"vertex {u} outside base graph of order {tg.n}")
    return KappaSet(u, frozenset(i for i, a in enumerate(tg.subsets) if a >> u & 1))


def _stabs(num_vertices: int, family: Sequence) -> List[int]:
    stab = [0] * num_vertices
    for x, members in enumerate(family):
        for a in members:
            stab[a] |= 1 << x
    return stab


def is_reconstruction_family(f: Graph, family: Sequence, n: int, k: int) -> bool:
    """Check the size, stab and edge-intersection properties of a family of vertex sets."""
    if f.n != comb(n, k):
        raise DomainError(f"|V(f)|={f.n} differs from C({n},{k})={comb(n, k)}")
    target = comb(n - 1, k - 1)
    sets = [frozenset(x) for x in family]
    if any(len(x) != target for x in sets):
        return False
    if any(a < 0 or a >= f.n for x in sets for a in x):
        return False
    stab = _stabs(f.n, sets)
    if any(s.bit_count() != k for s in stab):
        return False
    return all((stab[a] & stab[b]).bit_count() == k - 1 for a, b in f.edges())


@dataclass(frozen=True)
class ReconstructionFamily:
    sets: Tuple[FrozenSet[int], ...]
    stab: Tuple[int, ...]

    def stab_set(self, a: int) -> List[int]:
        return bits(self.stab[a])


def family_to_graph(f: Graph, family: Sequence, n: int, k: int) -> Tuple[Graph, ReconstructionFamily]:
    """G_R over the family: X ~ Y iff some edge AB has S(A) xor S(B) = {X, Y}.

    The stab map S sends each vertex of f to a k-subset of the family and is
    an isomorphism f -> F_k(G_R).
    """
    if not is_reconstruction_family(f, family, n, k):
        raise DomainError("family fails the reconstruction-family properties")
    sets = tuple(frozenset(x) for x in family)
    stab = _stabs(f.n, sets)
    edges = set()
    for a, b in f.edges():
        x, y = bits(stab[a] ^ stab[b])
        edges.add((x, y))
    return Graph(len(sets), sorted(edges)), ReconstructionFamily(sets, tuple(stab))


def kappa_family(tg: TokenGraph) -> List[FrozenSet[int]]:
    return [kappa(tg, u).members for u in range(tg.n)]


def complement_family(f: Graph, family: Sequence) -> List[FrozenSet[int]]:
    everything = frozenset(range(f.n))
    return [everything - frozenset(x) for x in family]


def subset_sidecar(tg: TokenGraph) -> str:
    """JSON lines mapping each token-graph vertex to its sorted subset."""
    lines = [json.dumps({"index": i, "subset": bits(a)}) for i, a in enumerate(tg.subsets)]
    return "\n".join(lines) + "\n"


def read_subset_sidecar(text: str) -> List[List[int]]:
    rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    rows.sort(key=lambda r: r["index"])
    return [list(r["subset"]) for r in rows]
