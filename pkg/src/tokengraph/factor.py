"""Cartesian prime factorization and reconstruction from disconnected token graphs."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product as iproduct
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DomainError, StructureError, TokenGraphError
from .families import cartesian_product, star
from .graph import Edge, Graph, bfs_distances, connected_components, disjoint_union, is_connected
from .iso import IsoClassifier, are_isomorphic, invariant_key
from .ladders import UnionFind
from .star import recognize_star_token
from .token import build_token_graph


@dataclass(frozen=True)
class CartesianFactorization:
    factors: Tuple[Graph, ...]
    coordinates: Tuple[Tuple[int, ...], ...]  # coordinates[v] = factor-coordinate tuple of v
    edge_classes: Tuple[Tuple[Edge, ...], ...]

    def __len__(self) -> int:
        return len(self.factors)

    def rebuild(self) -> Graph:
        """The product of the factors, with vertices in lexicographic coordinate order."""
        out = Graph(1, [])
        for h in self.factors:
            out = cartesian_product(out, h)
        return out


def _product_relation(g: Graph) -> List[List[Edge]]:
    """Edge classes of the transitive closure of the Djokovic-Winkler relation and the
    unique-common-neighbour relation on adjacent edges."""
    edges = g.edges()
    index = {e: t for t, e in enumerate(edges)}
    dist = [bfs_distances(g, v) for v in range(g.n)]
    uf = UnionFind(len(edges))
    for a in range(len(edges)):
        x, y = edges[a]
        dx, dy = dist[x], dist[y]
        for b in range(a + 1, len(edges)):
            u, v = edges[b]
            if dx[u] + dy[v] != dx[v] + dy[u]:
                uf.union(a, b)
    for u in range(g.n):
        nb = g.neighbors(u)
        for p in range(len(nb)):
            for q in range(p + 1, len(nb)):
                v, w = nb[p], nb[q]
                if g.has_edge(v, w):
                    continue
                if (g.adj[v] & g.adj[w]) == 1 << u:
                    uf.union(index[(min(u, v), max(u, v))], index[(min(u, w), max(u, w))])
    groups: Dict[int, List[Edge]] = {}
    for t, e in enumerate(edges):
        groups.setdefault(uf.find(t), []).append(e)
    return sorted(groups.values(), key=lambda es: es[0])


def _verify(g: Graph, groups: Sequence[Sequence[Edge]]) -> Optional[CartesianFactorization]:
    """Factors and coordinates induced by an edge partition, or None if it is not a product."""
    coords = [[0] * len(groups) for _ in range(g.n)]
    factors = []
    for c, group in enumerate(groups):
        inside = set(group)
        rest = g.without_edges(inside)
        comps = connected_components(rest)
        where = [0] * g.n
        for t, comp in enumerate(comps):
            for v in comp:
                where[v] = t
                coords[v][c] = t
        fedges = set()
        for u, v in group:
            a, b = where[u], where[v]
            if a == b:
                return None
            fedges.add((min(a, b), max(a, b)))
        factors.append(Graph(len(comps), sorted(fedges)))
    tuples = [tuple(p) for p in coords]
    size = 1
    for h in factors:
        size *= h.n
    if len(set(tuples)) != g.n or size != g.n:
        return None
    expected = 0
    for c, h in enumerate(factors):
        expected += h.num_edges() * (size // h.n)
    if expected != g.num_edges():
        return None
    for u, v in g.edges():
        diff = [c for c in range(len(groups)) if tuples[u][c] != tuples[v][c]]
        if len(diff) != 1:
            return None
    return CartesianFactorization(tuple(factors), tuple(tuples), tuple(tuple(gr) for gr in groups))


def _set_partitions(items: List[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for t in range(len(part)):
            yield part[:t] + [[first] + part[t]] + part[t + 1:]
        yield [[first]] + part


def cartesian_factorize(g: Graph) -> CartesianFactorization:
    """Prime factorization of a connected graph under the Cartesian product."""
    if not is_connected(g):
        raise DomainError("cartesian_factorize needs a connected graph")
    if g.n == 1:
        return CartesianFactorization((), ((),), ())
    groups = _product_relation(g)
    got = _verify(g, groups)
    if got is not None:
        return got
    # fallback: coarsen the relation classes, finest partitions first
    parts = sorted(_set_partitions(list(range(len(groups)))), key=lambda p: -len(p))
    for part in parts:
        merged = [sorted(e for t in block for e in groups[t]) for block in part]
        merged.sort(key=lambda es: es[0])
        got = _verify(g, merged)
        if got is not None:
            return got
    raise StructureError("factorize", "no edge partition realises a product")


# ---------------------------------------------------------------- disconnected reconstruction

@dataclass(frozen=True)
class DisconnectedReconstruction:
    nontrivial_components: Tuple[Graph, ...]
    isolated_count: int
    branch: str

    def graph(self) -> Graph:
        return disjoint_union(list(self.nontrivial_components) + [Graph(self.isolated_count, [])])


def _component_graphs(g: Graph) -> List[Graph]:
    return [g.induced_subgraph(c)[0] for c in connected_components(g)]


def _candidates(x: Graph) -> List[Graph]:
    """Connected graphs J with F_l(J) isomorphic to x for some l, found by the pipeline."""
    from .reconstruct import reconstruct

    out = [x]
    try:
        out.append(reconstruct(x).j_forward)
    except TokenGraphError:
        pass
    rec = recognize_star_token(x)
    if rec is not None and rec[0].k > 1:
        out.append(star(rec[0].n))
    uniq: List[Graph] = []
    for c in out:
        if not any(are_isomorphic(c, d) for d in uniq):
            uniq.append(c)
    return uniq


def reconstruct_disconnected(f: Graph, n: int, k: int) -> DisconnectedReconstruction:
    """Component multiset and isolated count of G from F isomorphic to F_k(G)."""
    if n < 1 or not 1 <= k <= n - 1 and not (n == 1 and k in (0, 1)):
        raise DomainError(f"token count {k} invalid for {n} vertices")
    if f.n != comb(n, k):
        raise DomainError(f"|V(F)| = {f.n} differs from C({n},{k}) = {comb(n, k)}")
    k = min(k, n - k)
    comps = _component_graphs(f)
    if k <= 1:
        nontrivial = tuple(c for c in comps if c.n > 1)
        return DisconnectedReconstruction(_canonical_order(nontrivial), sum(1 for c in comps if c.n == 1), "k=1")
    facts = [cartesian_factorize(c) for c in comps]
    r_star = max(len(fc) for fc in facts)
    if r_star == 0:
        return DisconnectedReconstruction((), n, "edgeless")
    top = [fc for fc in facts if len(fc) == r_star]
    if r_star == k:
        q_f = len(top)
        q_g = next((q for q in range(k, n + 1) if comb(q, k) == q_f), None)
        if q_g is None:
            raise StructureError("disconnected", f"{q_f} components with {k} factors is not a binomial count")
        per = comb(q_g - 1, k - 1)
        tally = IsoClassifier()
        counts: Dict[int, int] = {}
        for fc in top:
            for h in fc.factors:
                cid = tally.classify(h)
                counts[cid] = counts.get(cid, 0) + 1
        parts = []
        for cid, t in sorted(counts.items()):
            if t % per:
                raise StructureError("disconnected", f"factor multiplicity {t} not divisible by {per}")
            parts.extend([tally.representatives[cid]] * (t // per))
        if len(parts) != q_g:
            raise StructureError("disconnected", "factor tally disagrees with the component count")
        isolated = n - sum(p.n for p in parts)
        if isolated < 0:
            raise StructureError("disconnected", "components exceed the vertex count")
        out = DisconnectedReconstruction(_canonical_order(parts), isolated, "r*=k counting")
        _check(out, f, k)
        return out
    choices = [_candidates(h) for h in top[0].factors]
    for combo in iproduct(*choices):
        isolated = n - sum(c.n for c in combo)
        if isolated < 0:
            continue
        out = DisconnectedReconstruction(_canonical_order(combo), isolated, f"r*={r_star}")
        if are_isomorphic(build_token_graph(out.graph(), k).graph, f):
            return out
    raise StructureError("disconnected", "no candidate reproduces the input token graph")


def _check(out: DisconnectedReconstruction, f: Graph, k: int) -> None:
    if not are_isomorphic(build_token_graph(out.graph(), k).graph, f):
        raise StructureError("disconnected", "counted components do not reproduce the input")


def _canonical_order(graphs: Sequence[Graph]) -> Tuple[Graph, ...]:
    return tuple(sorted(graphs, key=lambda g: (g.n, g.num_edges(), repr(invariant_key(g)))))


# ---------------------------------------------------------------- distinct-k collisions

def _collision_bucket(items) -> List[Tuple[int, int, int, int]]:
    found = []
    tg = {}
    for gi, k, g in items:
        tg[(gi, k)] = build_token_graph(g, k).graph
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            (g1, k1, _), (g2, k2, _) = items[a], items[b]
            if k1 == k2 or g1 == g2:
                continue
            if are_isomorphic(tg[(g1, k1)], tg[(g2, k2)]):
                found.append((g1, k1, g2, k2))
    return found


def search_distinct_k_collision(max_n: int, jobs: int = 1, min_k: int = 1):
    """Pairs ((G1, k1), (G2, k2)) of disconnected (C4,diamond)-free graphs on at most max_n
    vertices with k1 != k2, G1 not isomorphic to G2, and F_k1(G1) isomorphic to F_k2(G2).

    Token counts range over min_k <= k <= n/2; larger k repeat a smaller one by
    complementation.
    """
    from .oracle import generate_corpus

    graphs: List[Graph] = []
    for n in range(2, max_n + 1):
        graphs.extend(g for g in generate_corpus(n, connected_only=False) if not is_connected(g))
    buckets: Dict[Tuple, List[Tuple[int, int, Graph]]] = {}
    for gi, g in enumerate(graphs):
        for k in range(max(1, min_k), g.n // 2 + 1):
            size = comb(g.n, k)
            tg = build_token_graph(g, k).graph
            key = (size, tg.num_edges(), invariant_key(tg))
            buckets.setdefault(key, []).append((gi, k, g))
    work = [items for _, items in sorted(buckets.items(), key=lambda kv: repr(kv[0]))
            if len({k for _, k, _ in items}) > 1]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_collision_bucket, work))
    else:
        results = [_collision_bucket(w) for w in work]
    pairs = []
    for found in results:
        for g1, k1, g2, k2 in found:
            pairs.append(((graphs[g1], k1), (graphs[g2], k2)))
    pairs.sort(key=lambda p: (p[0][0].n, p[0][1], p[1][0].n, p[1][1], p[0][0].edges(), p[1][0].edges()))
    return pairs
