"""Recognition and forced labelling of token graphs of stars K_{1,n}.

Target labels are vertex indices of ``build_token_graph(star(n), k)``; the
star's centre is vertex 0 and its leaves are 1..n.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DomainError, PreconditionError
from .families import star
from .graph import Graph, bfs_distances, bipartition, bits, is_connected
from .token import TokenGraph, build_token_graph


@dataclass(frozen=True)
class StarParameters:
    n: int
    k: int
    part0: int  # bitmask of the side of f that maps onto configurations without a centre token

    def __iter__(self):
        return iter((self.n, self.k))


@dataclass(frozen=True)
class StarSeed:
    v_star: int
    w: Tuple[int, ...]
    v: Tuple[int, ...]
    image: Dict[int, int]


@dataclass(frozen=True)
class StarLabeling:
    params: StarParameters
    labels: Tuple[int, ...]  # labels[x] = vertex index in the target star token graph

    def subsets(self) -> List[List[int]]:
        target = star_token_graph(self.params.n, self.params.k)
        return [target.subset(i) for i in self.labels]


@lru_cache(maxsize=None)
def star_token_graph(n: int, k: int) -> TokenGraph:
    return build_token_graph(star(n), k)


def star_parameters(f: Graph) -> Optional[StarParameters]:
    """The unique (n, k) with k <= (n+1)/2 compatible with the degrees of f, or None."""
    if f.n < 2 or not is_connected(f):
        return None
    colour = bipartition(f)
    if colour is None:
        return None
    parts = [[v for v in range(f.n) if colour[v] == c] for c in (0, 1)]
    degs = []
    for part in parts:
        ds = {f.degree(v) for v in part}
        if len(ds) != 1:
            return None
        degs.append(ds.pop())
    if degs[0] > degs[1] or (degs[0] == degs[1] and 0 not in parts[0]):
        parts.reverse()
        degs.reverse()
    k = degs[0]
    n = degs[1] + k - 1
    if n < 2 or k < 1:
        return None
    if len(parts[0]) != comb(n, k) or len(parts[1]) != comb(n, k - 1):
        return None
    return StarParameters(n, k, sum(1 << v for v in parts[0]))


def default_seed(f: Graph, params: StarParameters) -> StarSeed:
    """The deterministic seed: v* lowest in part0, neighbour orders by index."""
    n, k = params.n, params.k
    target = star_token_graph(n, k)
    v_star = bits(params.part0)[0]
    w = tuple(f.neighbors(v_star))
    v = tuple(x for x in f.neighbors(w[0]) if x != v_star)
    base = sum(1 << i for i in range(1, k + 1))
    image = {v_star: target.index[base]}
    for j, wj in enumerate(w, start=1):
        image[wj] = target.index[base ^ (1 << j) | 1]
    for t, vt in enumerate(v, start=k + 1):
        image[vt] = target.index[base ^ (1 << 1) | (1 << t)]
    return StarSeed(v_star, w, v, image)


def _check_seed(f: Graph, params: StarParameters, seed: StarSeed, target: TokenGraph) -> None:
    tg = target.graph
    if not params.part0 >> seed.v_star & 1 and 2 * params.k != params.n + 1:
        raise PreconditionError("v* must lie in the part of degree k")
    if sorted(seed.w) != f.neighbors(seed.v_star) or not seed.w:
        raise PreconditionError("w must list the neighbours of v*")
    if sorted(seed.v) != [x for x in f.neighbors(seed.w[0]) if x != seed.v_star]:
        raise PreconditionError("v must list the neighbours of w_1 other than v*")
    keys = {seed.v_star, *seed.w, *seed.v}
    if set(seed.image) != keys or len(set(seed.image.values())) != len(keys):
        raise PreconditionError("seed image must be injective on v*, w and v")
    img = seed.image
    if {img[x] for x in seed.w} != set(tg.neighbors(img[seed.v_star])):
        raise PreconditionError("images of w must be the neighbours of the image of v*")
    rest = set(tg.neighbors(img[seed.w[0]])) - {img[seed.v_star]}
    if {img[x] for x in seed.v} != rest:
        raise PreconditionError("images of v must be the other neighbours of the image of w_1")
    if len(f.neighbors(seed.v_star)) != params.k and 2 * params.k != params.n + 1:
        raise PreconditionError("v* has the wrong degree")


def extend_labeling(f: Graph, params: StarParameters, seed: StarSeed) -> Optional[StarLabeling]:
    """Extend the seed to the unique isomorphism f -> F_k(K_{1,n}), or None on conflict."""
    labels, _ = _extend(f, params, seed)
    if labels is None:
        return None
    return StarLabeling(params, tuple(labels))


def _extend(f: Graph, params: StarParameters, seed: StarSeed):
    target = star_token_graph(params.n, params.k)
    _check_seed(f, params, seed, target)
    if f.n != target.graph.n:
        return None, seed.v_star
    tg = target.graph
    sub = target.subsets
    label: List[int] = [-1] * f.n
    for x, y in seed.image.items():
        label[x] = y
    img_vs = [seed.image[x] for x in seed.v]
    # second layer: neighbours of w_j (j > 1) are pinned by their length-2 paths to the v_t
    for wj in seed.w[1:]:
        for u in f.neighbors(wj):
            if label[u] >= 0:
                continue
            pattern = [bool(f.adj[u] & f.adj[vt]) for vt in seed.v]
            cands = [c for c in tg.neighbors(label[wj]) if c != label[seed.v_star]
                     and [bool(tg.adj[c] & tg.adj[it]) for it in img_vs] == pattern]
            if len(cands) != 1:
                return None, u
            label[u] = cands[0]
    dist = bfs_distances(f, seed.v_star)
    order = sorted((d, x) for x, d in enumerate(dist) if d >= 0)
    if len(order) != f.n:
        return None, next(x for x in range(f.n) if dist[x] < 0)
    for d, u in order:
        if label[u] >= 0:
            continue
        prev = [y for y in f.neighbors(u) if dist[y] == d - 1]
        if len(prev) < 2 or any(label[y] < 0 for y in prev):
            return None, u
        guess = None
        for a in range(len(prev)):
            for b in range(a + 1, len(prev)):
                s1, s2 = sub[label[prev[a]]], sub[label[prev[b]]]
                if s1 & 1 and s2 & 1:
                    mask = (s1 | s2) & ~1
                elif not s1 & 1 and not s2 & 1:
                    mask = (s1 & s2) | 1
                else:
                    return None, u
                if guess is None:
                    guess = mask
                elif guess != mask:
                    return None, u
        idx = target.index.get(guess)
        if idx is None:
            return None, u
        label[u] = idx
    if len(set(label)) != f.n:
        return None, seed.v_star
    for x, y in f.edges():
        if not tg.has_edge(label[x], label[y]):
            return None, x
    if f.num_edges() != tg.num_edges():
        return None, seed.v_star
    return label, None


def recognize_star_token(f: Graph) -> Optional[Tuple[StarParameters, StarLabeling]]:
    """(params, labelling) iff f is isomorphic to some F_k(K_{1,n}) with k <= (n+1)/2."""
    params = star_parameters(f)
    if params is None:
        return None
    lab = extend_labeling(f, params, default_seed(f, params))
    if lab is None:
        return None
    return params, lab


def iter_star_seeds(f: Graph, params: StarParameters):
    """Every admissible seed for the fixed deterministic v*."""
    target = star_token_graph(params.n, params.k)
    tg = target.graph
    v_star = bits(params.part0)[0]
    w = tuple(f.neighbors(v_star))
    v = tuple(x for x in f.neighbors(w[0]) if x != v_star)
    sides = [0, 1] if 2 * params.k == params.n + 1 else [0]
    for img_star in range(tg.n):
        side = target.subsets[img_star] & 1
        if side not in sides:
            continue
        for w_img in permutations(tg.neighbors(img_star)):
            rest = [c for c in tg.neighbors(w_img[0]) if c != img_star]
            for v_img in permutations(rest):
                image = {v_star: img_star}
                image.update(zip(w, w_img))
                image.update(zip(v, v_img))
                yield StarSeed(v_star, w, v, image)


def count_star_isomorphisms(f: Graph, params: StarParameters) -> int:
    """|Iso(f, F_k(K_{1,n}))| counted as the number of seeds that extend."""
    if recognize_star_token(f) is None:
        raise DomainError("input is not a token graph of a star")
    found = set()
    for seed in iter_star_seeds(f, params):
        lab = extend_labeling(f, params, seed)
        if lab is not None:
            found.add(lab.labels)
    return len(found)
