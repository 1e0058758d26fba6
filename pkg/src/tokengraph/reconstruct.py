"""Reconstruction of G from a graph F isomorphic to F_k(G).

The pipeline runs in stages over the immutable input:

1. ladder classes of E(F) and the local views J_A;
2. ``initialize``: choose the anchor with the largest local matching and the
   cube it spans;
3. ``extend`` for every factor: grow a maximal Cartesian-product subgraph H
   with coordinate map pi;
4. classify every factor H_i and build J_i with the two candidate labellings
   psi_i and its complement;
5. label the edges leaving H by factor pair, endpoint and direction;
6. assemble the forward and backward graphs.

Any inconsistency raises StructureError naming the stage.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import DomainError, PreconditionError, StructureError
from .families import star
from .graph import Edge, Graph, bits, connected_components, is_connected
from .ladders import LadderClasses, LocalView, common_4cycle, ladder_classes, local_view
from .matching import lexicographic_maximum_matching
from .star import recognize_star_token, star_token_graph


@dataclass(frozen=True)
class ProductDecomposition:
    h_vertices: Tuple[int, ...]
    factors: Tuple[Graph, ...]
    pi: Dict[int, Tuple[int, ...]]
    seed_vertex: int
    seed_edges: Tuple[Edge, ...]

    @property
    def r(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class FactorClass:
    class_id: str
    star_params: Optional[Tuple[int, int]]  # (m, l) for class-3 factors
    j_graph: Graph
    psi: Tuple[int, ...]      # psi[u] = mask over V(J_i) for vertex u of H_i
    psi_bar: Tuple[int, ...]
    l: int
    l_bar: int

    def swapped(self) -> "FactorClass":
        return FactorClass(self.class_id, self.star_params, self.j_graph,
                           self.psi_bar, self.psi, self.l_bar, self.l)


@dataclass(frozen=True)
class CrossEdgeLabel:
    edge: Edge               # (A, B) with A in H
    idx: Tuple[int, int]
    endpoints: Dict[int, Optional[int]]
    source: int              # factor the token leaves under the forward orientation


@dataclass(frozen=True)
class ReconstructionResult:
    j_forward: Graph
    j_backward: Graph
    swap: Tuple[int, ...]
    factors: Tuple[FactorClass, ...]
    decomposition: Optional[ProductDecomposition]
    labels: Tuple[CrossEdgeLabel, ...]
    audit: dict = field(default_factory=dict)

    @property
    def graph(self) -> Graph:
        return self.j_forward


class _Context:
    """Per-input lookups shared by all stages."""

    def __init__(self, f: Graph, classes: LadderClasses):
        self.f = f
        self.classes = classes
        self.cls_at: List[set] = [set() for _ in range(f.n)]
        self.by_class: Dict[Tuple[int, int], List[int]] = {}
        for (u, v), c in classes.class_of.items():
            self.cls_at[u].add(c)
            self.cls_at[v].add(c)
            self.by_class.setdefault((u, c), []).append(v)
            self.by_class.setdefault((v, c), []).append(u)

    def cls(self, u: int, v: int) -> int:
        return self.classes.cls(u, v)

    def partner(self, x: int, c: int) -> List[int]:
        return sorted(self.by_class.get((x, c), ()))


# ---------------------------------------------------------------- product subgraph

def initialize(f: Graph, classes: LadderClasses,
               views: Optional[Callable[[int], LocalView]] = None) -> ProductDecomposition:
    """Pick the anchor with the largest local matching and return the cube through it."""
    ctx = _Context(f, classes)
    return _initialize(ctx, views)


def _initialize(ctx: _Context, views=None) -> ProductDecomposition:
    f = ctx.f
    if views is None:
        def views(a):
            return local_view(f, ctx.classes, a)
    best = None
    for a in range(f.n):
        lv = views(a)
        m = lexicographic_maximum_matching(lv.resolved)
        if best is None or len(m) > len(best[1]):
            best = (lv, m)
    if best is None or not best[1]:
        raise StructureError("initialize", "no vertex has a non-empty local matching")
    lv, m = best
    a = lv.anchor
    by_edge = {e: b for b, e in zip(lv.neighbours, lv.edge_ends)}
    seed_edges = tuple((a, by_edge[e]) for e in m)
    cids = [ctx.cls(*e) for e in seed_edges]
    if len(set(cids)) != len(cids):
        raise StructureError("initialize", "two matching edges share a ladder class", witness=seed_edges)
    r = len(cids)
    coord = {c: t for t, c in enumerate(cids)}
    pi = {a: (0,) * r}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        for w in f.neighbors(v):
            c = ctx.cls(v, w)
            if c not in coord:
                continue
            t = coord[c]
            expect = pi[v][:t] + (1 - pi[v][t],) + pi[v][t + 1:]
            if w in pi:
                if pi[w] != expect:
                    raise StructureError("initialize", "cube coordinates are inconsistent", witness=(v, w))
            else:
                pi[w] = expect
                queue.append(w)
    if len(pi) != 1 << r or len(set(pi.values())) != len(pi):
        raise StructureError("initialize", f"component spanned by the seed classes is not a {r}-cube",
                             witness=sorted(pi))
    k2 = Graph(2, [(0, 1)])
    return ProductDecomposition(tuple(sorted(pi)), (k2,) * r, pi, a, seed_edges)


class _Product:
    """Mutable working copy of a ProductDecomposition."""

    def __init__(self, dec: ProductDecomposition):
        self.dec = dec
        self.pi = dict(dec.pi)
        self.sizes = [g.n for g in dec.factors]
        self.fedges = [set(g.edges()) for g in dec.factors]

    def is_h_edge(self, x: int, y: int) -> bool:
        px, py = self.pi.get(x), self.pi.get(y)
        if px is None or py is None:
            return False
        diff = [c for c in range(len(px)) if px[c] != py[c]]
        if len(diff) != 1:
            return False
        c = diff[0]
        a, b = px[c], py[c]
        return (min(a, b), max(a, b)) in self.fedges[c]

    def freeze(self) -> ProductDecomposition:
        factors = tuple(Graph(n, sorted(es)) for n, es in zip(self.sizes, self.fedges))
        return ProductDecomposition(tuple(sorted(self.pi)), factors, dict(self.pi),
                                    self.dec.seed_vertex, self.dec.seed_edges)


def extend(f: Graph, classes: LadderClasses, dec: ProductDecomposition, i: int) -> ProductDecomposition:
    """Grow factor i of the product subgraph as far as the ladder classes allow."""
    return _extend(_Context(f, classes), dec, i)


def _extend(ctx: _Context, dec: ProductDecomposition, i: int) -> ProductDecomposition:
    if not 0 <= i < dec.r:
        raise PreconditionError(f"factor index {i} outside 0..{dec.r - 1}")
    f = ctx.f
    work = _Product(dec)
    pi = work.pi
    fibre: Dict[int, set] = {}
    for v, p in pi.items():
        fibre.setdefault(p[i], set()).add(v)
    a1 = dec.seed_vertex
    p1 = pi[a1]
    target = p1[:i] + (1 - p1[i],) + p1[i + 1:]
    a2 = next(v for v, p in pi.items() if p == target)
    queue = deque([a1, a2])
    while queue:
        a = queue.popleft()
        for b in f.neighbors(a):
            if work.is_h_edge(a, b):
                continue
            c = ctx.cls(a, b)
            val = pi[a][i]
            members = sorted(fibre[val])
            if not all(c in ctx.cls_at[x] for x in members):
                continue
            if b not in pi:
                y = work.sizes[i]
                work.sizes[i] += 1
                fibre[y] = set()
                added = []
                taken = set()
                for x in members:
                    ys = ctx.partner(x, c)
                    if len(ys) != 1:
                        raise StructureError("extend", f"vertex {x} has {len(ys)} partners in one ladder class",
                                             witness=(x, c))
                    if ys[0] in pi or ys[0] in taken:
                        raise StructureError("extend", "translated vertex already lies in H", witness=(x, ys[0]))
                    taken.add(ys[0])
                    added.append((x, ys[0]))
                for x, yv in added:
                    pi[yv] = pi[x][:i] + (y,) + pi[x][i + 1:]
                    fibre[y].add(yv)
                if b not in pi:
                    raise StructureError("extend", "edge endpoint missing from its own translation", witness=(a, b))
                queue.append(b)
            pb = pi[b]
            if any(pb[t] != pi[a][t] for t in range(len(pb)) if t != i) or pb[i] == val:
                raise StructureError("extend", "qualifying edge changes a foreign coordinate", witness=(a, b))
            work.fedges[i].add((min(val, pb[i]), max(val, pb[i])))
    return work.freeze()


def _check_product(ctx: _Context, dec: ProductDecomposition) -> Dict[Tuple[int, ...], int]:
    f = ctx.f
    for t, h in enumerate(dec.factors):
        if h.n < 2 or not is_connected(h):
            raise StructureError("product", f"factor {t} is not a connected graph on >= 2 vertices")
    pos = {p: v for v, p in dec.pi.items()}
    total = 1
    for h in dec.factors:
        total *= h.n
    if len(pos) != len(dec.pi) or len(pos) != total:
        raise StructureError("product", "coordinate map is not a bijection onto the product")
    expected = 0
    for v, p in dec.pi.items():
        for t, h in enumerate(dec.factors):
            for u in h.neighbors(p[t]):
                w = pos[p[:t] + (u,) + p[t + 1:]]
                if not f.has_edge(v, w):
                    raise StructureError("product", "product edge missing from F", witness=(v, w))
                expected += 1
    hmask = sum(1 << v for v in dec.pi)
    inside = sum((f.adj[v] & hmask).bit_count() for v in dec.pi)
    if inside != expected:
        raise StructureError("product", "F has edges inside H beyond the product edges")
    return pos


def product_subgraph(f: Graph, classes: Optional[LadderClasses] = None) -> ProductDecomposition:
    """Initialize followed by Extend for every factor, with a final product check."""
    ctx = _Context(f, classes if classes is not None else ladder_classes(f))
    dec = _initialize(ctx)
    for i in range(dec.r):
        dec = _extend(ctx, dec, i)
    _check_product(ctx, dec)
    return dec


# ---------------------------------------------------------------- factor classes

def _copy_class(cid: str, h: Graph, params=None) -> FactorClass:
    full = (1 << h.n) - 1
    psi = tuple(1 << u for u in range(h.n))
    if cid == "1":
        return FactorClass(cid, None, h, psi, psi, 1, 1)
    return FactorClass(cid, params, h, psi, tuple(full ^ m for m in psi), 1, h.n - 1)


def _star_class(h: Graph, params, labelling) -> FactorClass:
    m, l = params.n, params.k
    target = star_token_graph(m, l)
    full = (1 << (m + 1)) - 1
    psi = tuple(target.subsets[x] for x in labelling.labels)
    return FactorClass("3b", (m, l), star(m), psi, tuple(full ^ s for s in psi), l, m + 1 - l)


def _matched_copy(ctx: _Context, pos, dec, i, u, j, v) -> bool:
    """Search for F1, F2 and M certifying class 3a for the candidate (i, u, j, v)."""
    f = ctx.f
    f1 = [x for x, p in dec.pi.items() if p[i] != u and p[j] == v]
    f1set = set(f1)
    groups: Dict[int, List[Edge]] = {}
    for x in f1:
        for y in f.neighbors(x):
            if y not in f1set:
                groups.setdefault(ctx.cls(x, y), []).append((x, y))
    for c, edges in groups.items():
        if any(y in dec.pi for _, y in edges):
            continue
        mate: Dict[int, int] = {}
        back: Dict[int, int] = {}
        ok = True
        for x, y in edges:
            if x in mate or y in back:
                ok = False
                break
            mate[x] = y
            back[y] = x
        if not ok or len(mate) != len(f1):
            continue
        f2mask = sum(1 << y for y in back)
        # the induced graph on F2 must be the image of the induced graph on F1
        if all(f.has_edge(mate[a], mate[b]) == f.has_edge(a, b) for a, b in combinations(f1, 2)):
            return True
    return False


def classify_factors(f: Graph, classes: LadderClasses, dec: ProductDecomposition) -> List[FactorClass]:
    return _classify(_Context(f, classes), dec)


def classify_factor(dec: ProductDecomposition, i: int, f: Graph, classes: LadderClasses) -> FactorClass:
    return classify_factors(f, classes, dec)[i]


def _classify(ctx: _Context, dec: ProductDecomposition) -> List[FactorClass]:
    out: List[Optional[FactorClass]] = [None] * dec.r
    pending = []
    for i, h in enumerate(dec.factors):
        if h.n == 2:
            out[i] = _copy_class("1", h)
        elif h.n == 3 and h.num_edges() == 3:
            out[i] = _copy_class("2", h)
        else:
            rec = recognize_star_token(h)
            if rec is None:
                out[i] = _copy_class("4", h)
            else:
                params, lab = rec
                if params.k == 1:
                    out[i] = _copy_class("3c", h, (params.n, params.k))
                else:
                    pending.append((i, params, lab))
    if pending:
        three_a = False
        if dec.r > 1:
            pos = {p: v for v, p in dec.pi.items()}
            for i, _, _ in pending:
                for j in range(dec.r):
                    if j == i:
                        continue
                    for u in range(dec.factors[i].n):
                        for v in range(dec.factors[j].n):
                            if _matched_copy(ctx, pos, dec, i, u, j, v):
                                three_a = True
                                break
                        if three_a:
                            break
                    if three_a:
                        break
                if three_a:
                    break
        for i, params, lab in pending:
            if three_a:
                out[i] = _copy_class("3a", dec.factors[i], (params.n, params.k))
            else:
                out[i] = _star_class(dec.factors[i], params, lab)
    return out


# ---------------------------------------------------------------- cross-edge labelling

class _Labeler:
    def __init__(self, ctx: _Context, dec: ProductDecomposition, factors: Sequence[FactorClass]):
        self.ctx = ctx
        self.f = ctx.f
        self.dec = dec
        self.factors = list(factors)
        self.pi = dec.pi
        self.pos = {p: v for v, p in dec.pi.items()}
        self.hmask = sum(1 << v for v in dec.pi)
        self.cross: List[Edge] = []
        for a in sorted(dec.pi):
            for b in bits(self.f.adj[a] & ~self.hmask):
                self.cross.append((a, b))
        self._cd: Dict[Tuple[Edge, int], Optional[int]] = {}
        self._endpoint: Dict[Tuple[Edge, int], int] = {}
        self.idx: Dict[Edge, Tuple[int, int]] = {e: self.idx_of(e) for e in self.cross}
        self.by_pair: Dict[Tuple[int, int], List[Edge]] = {}
        for e in self.cross:
            self.by_pair.setdefault(self.idx[e], []).append(e)

    # -- basic subgraphs

    def shift(self, a: int, changes: Dict[int, int]) -> int:
        p = list(self.pi[a])
        for t, u in changes.items():
            p[t] = u
        return self.pos[tuple(p)]

    def move(self, a: int, i: int) -> List[int]:
        return [self.shift(a, {i: u}) for u in range(self.dec.factors[i].n)]

    def fix_edge(self, e: Edge, i: int) -> Tuple[set, set]:
        a = e[0]
        c = self.ctx.cls(*e)
        mv = self.move(a, i)
        mvmask = sum(1 << x for x in mv)
        keep = {x for x in mv if c in self.ctx.cls_at[x]}
        comp = {a}
        stack = [a]
        while stack:
            x = stack.pop()
            for y in bits(self.f.adj[x] & mvmask):
                if y in keep and y not in comp:
                    comp.add(y)
                    stack.append(y)
        near = set()
        for x in comp:
            for y in bits(self.f.adj[x] & mvmask):
                if y not in comp:
                    near.add(y)
        return comp, near

    def idx_of(self, e: Edge) -> Tuple[int, int]:
        a = e[0]
        c = self.ctx.cls(*e)
        r = self.dec.r
        pa = self.pi[a]
        found = []
        for i, j in combinations(range(r), 2):
            ok = True
            for x, p in self.pi.items():
                if p[i] == pa[i] and p[j] == pa[j] and c not in self.ctx.cls_at[x]:
                    ok = False
                    break
            if ok:
                found.append((i, j))
        if len(found) != 1:
            raise StructureError("idx", f"{len(found)} factor pairs qualify for a cross edge", witness=e)
        return found[0]

    def coord(self, a: int, i: int) -> int:
        return self.pi[a][i]

    def single(self, i: int, a: int) -> int:
        """The J_i vertex of the singleton psi_i(pi(a)(i)); only for non-3b factors."""
        return bits(self.factors[i].psi[self.coord(a, i)])[0]

    def has_token(self, psi: Sequence[int], a: int, i: int, x: int) -> bool:
        return bool(psi[self.coord(a, i)] >> x & 1)

    # -- endpoint rules

    def cd(self, e: Edge, i: int) -> Optional[int]:
        key = (e, i)
        if key in self._cd:
            return self._cd[key]
        fc = self.factors[i]
        comp, near = self.fix_edge(e, i)
        out = None
        if fc.class_id == "1":
            out = None
        elif fc.class_id == "3b":
            centre = 0
            if len(comp) == 1 and len(near) > 1:
                out = centre
            elif len(comp) > 1:
                cands = set()
                for x in comp:
                    for y in self.f.neighbors(x):
                        if y in near:
                            diff = fc.psi[self.coord(x, i)] ^ fc.psi[self.coord(y, i)]
                            cands.update(v for v in bits(diff) if v != centre)
                if len(cands) != 1:
                    raise StructureError("endpoint", "fixed/non-fixed boundary is ambiguous", witness=e)
                out = cands.pop()
        else:
            if len(comp) > 1:
                cands = {self.single(i, x) for x in near}
                if len(cands) != 1:
                    raise StructureError("endpoint", "non-fixed neighbours disagree", witness=e)
                out = cands.pop()
            elif len(near) > 1:
                out = self.single(i, e[0])
        self._cd[key] = out
        return out

    def knowledge(self, e: Edge, i: int, j: int) -> int:
        got = self.cd(e, i)
        if got is not None:
            return got
        fi, fj = self.factors[i], self.factors[j]
        if fi.class_id == "3b" or fj.class_id == "3b":
            raise StructureError("endpoint", "token counts of the pair are not both extreme", witness=e)
        a, b = e
        ji, jj = fi.j_graph, fj.j_graph
        x = self.single(i, a)
        if ji.degree(x) != 1:
            raise StructureError("endpoint", "anchor token is not on a leaf", witness=e)
        v = ji.neighbors(x)[0]
        y = self.single(j, a)
        if fj.class_id != "1":
            other = self.cd(e, j)
            if other is not None:
                return v if other == y else x
            if jj.degree(y) != 1:
                raise StructureError("endpoint", "partner token is not on a leaf", witness=e)
        w = jj.neighbors(y)[0]
        a2 = self.shift(a, {i: fi.psi.index(1 << v), j: fj.psi.index(1 << w)})
        pair = (min(i, j), max(i, j))
        s = [b2 for b2 in bits(self.f.adj[a2] & ~self.hmask) if self.idx[(a2, b2)] == pair]
        ends_i = {}
        for b2 in s:
            got = self.cd((a2, b2), i)
            if got is None:
                raise StructureError("endpoint", "shifted edge has no computable endpoint", witness=(a2, b2))
            ends_i[b2] = got
        if fj.class_id != "1":
            ends_j = {}
            for b2 in s:
                got = self.cd((a2, b2), j)
                if got is None:
                    raise StructureError("endpoint", "shifted edge has no computable endpoint", witness=(a2, b2))
                ends_j[b2] = got
            xw = [b2 for b2 in s if ends_i[b2] == x and ends_j[b2] == w]
            vy = [b2 for b2 in s if ends_i[b2] == v and ends_j[b2] == y]
            if xw and not vy:
                return x
            if vy and not xw:
                return v
            if xw and vy:
                if b in xw:
                    return v
                if b in vy:
                    return x
            raise StructureError("endpoint", "knowledge step found no matching move", witness=e)
        hits = [b2 for b2 in s if ends_i[b2] == v]
        if hits:
            return x if b in hits else v
        return x

    def psi_partner(self, i: int, j: int) -> Tuple[int, ...]:
        """psi_j or its complement, whichever is compatible with psi_i on the pair."""
        fi, fj = self.factors[i], self.factors[j]
        pair = (min(i, j), max(i, j))
        for e in self.by_pair.get(pair, []):
            xi, yj = self.cd(e, i), self.cd(e, j)
            if xi is None or yj is None:
                continue
            a = e[0]
            want = not self.has_token(fi.psi, a, i, xi)
            return fj.psi if self.has_token(fj.psi, a, j, yj) == want else fj.psi_bar
        raise StructureError("endpoint", "no cross edge with both endpoints computable", witness=pair)

    def endpoint(self, e: Edge, i: int) -> int:
        key = (e, i)
        if key in self._endpoint:
            return self._endpoint[key]
        out = self._endpoint_uncached(e, i)
        self._endpoint[key] = out
        return out

    def _endpoint_uncached(self, e: Edge, i: int) -> int:
        pair = self.idx[e]
        if i not in pair:
            raise PreconditionError(f"factor {i} is not incident to the cross edge")
        j = pair[0] if pair[1] == i else pair[1]
        fi, fj = self.factors[i], self.factors[j]
        cid = fi.class_id
        if cid == "1":
            raise PreconditionError("endpoint labels are undefined on single-edge factors")
        if cid in ("2", "3a", "3b"):
            got = self.cd(e, i)
            if got is None:
                raise StructureError("endpoint", f"class {cid} factor without fixed-edge evidence", witness=e)
            return got
        if cid == "4":
            return self.knowledge(e, i, j)
        got = self.cd(e, i)
        if got is not None:
            return got
        a = e[0]
        ji = fi.j_graph
        x = self.single(i, a)
        if ji.degree(x) != 1:
            raise StructureError("endpoint", "star factor anchor is not a leaf", witness=e)
        v = ji.neighbors(x)[0]
        if fj.class_id in ("4", "1"):
            return self.knowledge(e, i, j)
        if fj.class_id in ("2", "3a", "3b"):
            partner = self.psi_partner(i, j)
            yj = self.cd(e, j)
            if yj is None:
                raise StructureError("endpoint", "partner endpoint not computable", witness=e)
            return v if self.has_token(partner, a, j, yj) else x
        # both factors are stars carrying one token (or one hole)
        pair_edges = self.by_pair[self.idx[e]]
        side_i = {got for got in (self.cd(t, i) for t in pair_edges) if got is not None}
        side_j = {got for got in (self.cd(t, j) for t in pair_edges) if got is not None}
        if x not in side_i:
            return v
        if v not in side_i:
            return x
        leaves_i = {u for u in range(ji.n) if ji.degree(u) == 1}
        leaves_j = {u for u in range(fj.j_graph.n) if fj.j_graph.degree(u) == 1}
        if side_i & leaves_i and side_j & leaves_j:
            return self.knowledge(e, i, j)
        others = sorted(leaves_i - {x})
        if not others:
            raise StructureError("endpoint", "star factor lacks a second leaf", witness=e)
        z = others[0]
        a2 = self.shift(a, {i: fi.psi.index(1 << z)})
        pair = self.idx[e]
        if any(self.idx[(a2, b2)] == pair for b2 in bits(self.f.adj[a2] & ~self.hmask)):
            return v
        return x


def _orient(lab: _Labeler) -> Tuple[Dict[Edge, int], dict]:
    """Direction (source factor) for every cross edge, under the forward orientation."""
    factors = lab.factors
    dec = lab.dec
    d_pair: Dict[Tuple[int, int], Dict[Edge, int]] = {}
    for pair, edges in sorted(lab.by_pair.items()):
        i, j = pair
        d: Dict[Edge, int] = {}
        if factors[i].class_id != "1" or factors[j].class_id != "1":
            s = i if factors[i].class_id != "1" else j
            t = j if s == i else i
            for e in edges:
                x = lab.endpoint(e, s)
                d[e] = s if lab.has_token(factors[s].psi, e[0], s, x) else t
        else:
            seed = dec.seed_vertex
            ring = [lab.shift(seed, {i: u, j: w}) for u in (0, 1) for w in (0, 1)]
            outer = sorted({b for a in ring for b in bits(lab.f.adj[a] & ~lab.hmask)
                            if lab.idx[(a, b)] == pair})
            if len(outer) != 2:
                raise StructureError("orientation", "square of two edge factors has "
                                     f"{len(outer)} outside neighbours", witness=ring)
            for e in edges:
                a = e[0]
                a2 = lab.shift(seed, {i: lab.coord(a, i), j: lab.coord(a, j)})
                c = lab.ctx.cls(*e)
                hits = [b for b in lab.ctx.partner(a2, c) if not lab.hmask >> b & 1]
                if len(hits) != 1 or hits[0] not in outer:
                    raise StructureError("orientation", "no unique ladder translate on the square", witness=e)
                d[e] = i if hits[0] == outer[0] else j
        d_pair[pair] = d

    pairs = sorted(d_pair)

    def into(e: Edge, src: int, c: int) -> bool:
        return src != c

    def compatible(p: Tuple[int, int], q: Tuple[int, int]) -> Optional[bool]:
        shared = set(p) & set(q)
        c = shared.pop()
        fc = factors[c]
        dp, dq = d_pair[p], d_pair[q]
        verdicts = set()
        if fc.class_id != "1":
            e1 = lab.by_pair[p][0]
            x1 = lab.endpoint(e1, c)
            present = lab.has_token(fc.psi, e1[0], c, x1)
            use_psi = present == (not into(e1, dp[e1], c))
            psi = fc.psi if use_psi else fc.psi_bar
            for e2 in lab.by_pair[q]:
                x2 = lab.endpoint(e2, c)
                verdicts.add(lab.has_token(psi, e2[0], c, x2) == (not into(e2, dq[e2], c)))
        else:
            at_p: Dict[int, List[Edge]] = {}
            for e in lab.by_pair[p]:
                at_p.setdefault(e[0], []).append(e)
            for e2 in lab.by_pair[q]:
                for e1 in at_p.get(e2[0], ()):
                    predicted = into(e1, dp[e1], c) != into(e2, dq[e2], c)
                    actual = common_4cycle(lab.f, e1[0], e1[1], e2[1])
                    verdicts.add(actual == predicted)
        if len(verdicts) > 1:
            raise StructureError("orientation", "direction sets are inconsistent", witness=(p, q))
        return verdicts.pop() if verdicts else None

    parity: Dict[Tuple[int, int], int] = {}
    checks = []
    if pairs:
        parity[pairs[0]] = 0
        queue = deque([pairs[0]])
        while queue:
            p = queue.popleft()
            for q in pairs:
                if q == p or not set(p) & set(q):
                    continue
                comp = compatible(p, q)
                if comp is None:
                    continue
                want = parity[p] ^ (0 if comp else 1)
                checks.append((p, q, comp))
                if q in parity:
                    if parity[q] != want:
                        raise StructureError("orientation", "compatibility closure is contradictory", witness=(p, q))
                else:
                    parity[q] = want
                    queue.append(q)
        if len(parity) != len(pairs):
            raise StructureError("orientation", "factor pairs do not form a connected compatibility graph",
                                 witness=[p for p in pairs if p not in parity])
    source: Dict[Edge, int] = {}
    for p, d in d_pair.items():
        for e, s in d.items():
            source[e] = s if parity[p] == 0 else (p[0] if s == p[1] else p[1])
    audit = {"pairs": [list(p) for p in pairs], "parity": {f"{p[0]},{p[1]}": parity[p] for p in pairs}}
    return source, audit


def orient_cross_edges(f: Graph, classes: LadderClasses, dec: ProductDecomposition,
                       factors: Sequence[FactorClass]) -> Tuple[set, set]:
    """Forward and backward tuple sets (edge, source, target)."""
    lab = _Labeler(_Context(f, classes), dec, factors)
    source, _ = _orient(lab)
    fwd, bwd = set(), set()
    for e, s in source.items():
        i, j = lab.idx[e]
        t = j if s == i else i
        fwd.add((e, s, t))
        bwd.add((e, t, s))
    return fwd, bwd


def _rename(lab: _Labeler, source: Dict[Edge, int]) -> Tuple[List[FactorClass], List[str]]:
    """Swap psi_i with its complement where needed so that psi_i agrees with the forward set."""
    out = list(lab.factors)
    before = []
    for i, fc in enumerate(lab.factors):
        if fc.class_id == "1":
            before.append("fixed")
            continue
        verdict = set()
        for e, s in source.items():
            if i not in lab.idx[e]:
                continue
            x = lab.endpoint(e, i)
            verdict.add(lab.has_token(fc.psi, e[0], i, x) == (s == i))
        if len(verdict) > 1:
            raise StructureError("rename", f"labelling of factor {i} agrees with neither orientation")
        if verdict == {False}:
            out[i] = fc.swapped()
            before.append("swapped")
        else:
            before.append("kept")
    return out, before


def _assemble(lab: _Labeler, factors: Sequence[FactorClass], source: Dict[Edge, int]):
    offsets = []
    total = 0
    for fc in factors:
        offsets.append(total)
        total += fc.j_graph.n
    base_edges = [(u + off, v + off) for fc, off in zip(factors, offsets) for u, v in fc.j_graph.edges()]
    swap = list(range(total))
    for fc, off in zip(factors, offsets):
        if fc.class_id == "1":
            swap[off], swap[off + 1] = off + 1, off

    def vertex(e: Edge, i: int) -> int:
        if factors[i].class_id == "1":
            return offsets[i] + lab.single(i, e[0])
        return offsets[i] + lab.endpoint(e, i)

    fwd = set(base_edges)
    bwd = set(base_edges)
    labels = []
    for e in lab.cross:
        i, j = lab.idx[e]
        s = source[e]
        t = j if s == i else i
        x, y = vertex(e, s), vertex(e, t)
        fwd.add(tuple(sorted((x, swap[y]))))
        bwd.add(tuple(sorted((swap[x], y))))
        ends = {i: (None if factors[i].class_id == "1" else lab.endpoint(e, i)),
                j: (None if factors[j].class_id == "1" else lab.endpoint(e, j))}
        labels.append(CrossEdgeLabel(e, (i, j), ends, s))
    for u, v in list(fwd):
        if u == v:
            raise StructureError("assemble", "cross edge collapses onto a single vertex", witness=(u,))
    return Graph(total, sorted(fwd)), Graph(total, sorted(bwd)), tuple(swap), labels


def assemble(f: Graph, classes: LadderClasses, dec: ProductDecomposition,
             factors: Sequence[FactorClass]) -> ReconstructionResult:
    """Label, orient and assemble, given a product decomposition and its factor classes."""
    ctx = _Context(f, classes)
    return _finish(ctx, dec, list(factors))


def _finish(ctx: _Context, dec: ProductDecomposition, factors: List[FactorClass]) -> ReconstructionResult:
    lab = _Labeler(ctx, dec, factors)
    if dec.r == 1 and lab.cross:
        raise StructureError("assemble", "single factor but edges leave H", witness=lab.cross[:1])
    source, orient_audit = _orient(lab)
    renamed, before = _rename(lab, source)
    fwd, bwd, swap, labels = _assemble(lab, renamed, source)
    for u, v in fwd.edges():
        if not bwd.has_edge(swap[u], swap[v]):
            raise StructureError("assemble", "swap is not an isomorphism between the two outputs")
    audit = {
        "r": dec.r,
        "seed_vertex": dec.seed_vertex,
        "seed_edges": [list(e) for e in dec.seed_edges],
        "classes": [fc.class_id for fc in renamed],
        "token_counts_before": [[fc.l, fc.l_bar] for fc in factors],
        "token_counts_after": [[fc.l, fc.l_bar] for fc in renamed],
        "renaming": before,
        "orientation": orient_audit,
    }
    return ReconstructionResult(fwd, bwd, swap, tuple(renamed), dec, tuple(labels), audit)


def idx_of(f: Graph, classes: LadderClasses, dec: ProductDecomposition, e: Edge) -> Tuple[int, int]:
    a, b = e
    if (a in dec.pi) == (b in dec.pi):
        raise PreconditionError("edge must have exactly one endpoint in H")
    if b in dec.pi:
        a, b = b, a
    lab = _Labeler(_Context(f, classes), dec, [_copy_class("1", Graph(2, [(0, 1)]))] * dec.r)
    return lab.idx_of((a, b))


def endpoint_label(f: Graph, classes: LadderClasses, dec: ProductDecomposition,
                   factors: Sequence[FactorClass], e: Edge, i: int) -> int:
    """The vertex of J_i at which the base edge of cross edge e meets factor i."""
    a, b = e
    if b in dec.pi:
        a, b = b, a
    lab = _Labeler(_Context(f, classes), dec, factors)
    return lab.endpoint((a, b), i)


def reconstruct(f: Graph, k: Optional[int] = None) -> ReconstructionResult:
    """A graph J with F_k(J) isomorphic to f, for f promised to be such a token graph.

    The pipeline never needs k.  A caller that knows k may pass it so that the
    boundary counts k = 1 and k = n - 1 return f itself; any other value is
    ignored.  Inputs on at most three vertices are returned unchanged (they are
    their own 1-token graphs).
    """
    if f.n <= 3 or (k is not None and k in (1, f.n - 1)):
        ident = tuple(range(f.n))
        return ReconstructionResult(f, f, ident, (), None, (), {"r": 0, "trivial": True})
    if not is_connected(f):
        raise DomainError("input is disconnected; use reconstruct_disconnected")
    ctx = _Context(f, ladder_classes(f))
    dec = _initialize(ctx)
    for i in range(dec.r):
        dec = _extend(ctx, dec, i)
    _check_product(ctx, dec)
    factors = _classify(ctx, dec)
    return _finish(ctx, dec, factors)
