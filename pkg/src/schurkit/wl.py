"""Cayley digraphs and 2-dimensional Weisfeiler-Leman refinement.

Colourings of ordered vertex pairs are ``n x n`` integer arrays. Each round
recolours ``(u, v)`` by its old colour together with the multiset of
``(colour(u, w), colour(w, v))`` over all ``w``; new ids are the ranks of the
sorted signatures, so palettes are canonical and two graphs can be compared
through their refinement histories without a joint run.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .abelian import Group
from .errors import InvalidConnectionSet
from .sring import SRing, wielandt_closure

DIAGONAL, ARC, NON_ARC = "diagonal", "arc", "non-arc"


@dataclass
class PairColoring:
    n: int
    color: np.ndarray
    palette: tuple = ()
    history: list = field(default_factory=list, repr=False)

    @property
    def num_colors(self) -> int:
        return int(self.color.max()) + 1 if self.n else 0

    def histogram(self) -> tuple[int, ...]:
        return tuple(np.bincount(self.color.ravel(), minlength=self.num_colors).tolist())

    def partition(self) -> frozenset:
        flat = self.color.ravel()
        return frozenset(frozenset(np.flatnonzero(flat == c).tolist()) for c in range(self.num_colors))

    def check_diagonal(self) -> bool:
        d = set(np.diag(self.color).tolist())
        off = self.color[~np.eye(self.n, dtype=bool)]
        return not (d & set(off.tolist()))


def _from_labels(labels: np.ndarray, names: dict) -> PairColoring:
    """Compact arbitrary labels to ids ordered by the names in ``names``."""
    present = sorted(set(labels.ravel().tolist()), key=lambda x: names[x])
    remap = np.zeros(max(present) + 1, dtype=np.int64)
    for i, x in enumerate(present):
        remap[x] = i
    return PairColoring(labels.shape[0], remap[labels], tuple(names[x] for x in present))


def digraph_coloring(adj: np.ndarray) -> PairColoring:
    """Initial colouring of a digraph given by a boolean adjacency matrix."""
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    if np.diag(adj).any():
        raise InvalidConnectionSet("loops are not allowed")
    lab = np.where(adj, 1, 2)
    lab[np.arange(n), np.arange(n)] = 0
    return _from_labels(lab, {0: DIAGONAL, 1: ARC, 2: NON_ARC})


def cayley_adjacency(G: Group, X) -> np.ndarray:
    """``adj[u, v]`` iff ``v - u`` lies in ``X``."""
    X = [int(x) for x in X]
    if 0 in X:
        raise InvalidConnectionSet("the identity cannot be in a connection set")
    inX = np.zeros(G.order, dtype=bool)
    inX[X] = True
    return inX[G.sub_table.T]


def cayley_digraph(G: Group, X) -> PairColoring:
    return digraph_coloring(cayley_adjacency(G, X))


def _round(C: np.ndarray, k: int):
    """One refinement step; returns ``(new colours, signature rows)``."""
    n = C.shape[0]
    sig = np.empty((n, n, n + 1), dtype=np.int64)
    sig[:, :, 0] = C
    for u in range(n):
        codes = C[u][:, None] * k + C  # codes[w, v]
        sig[u, :, 1:] = np.sort(codes.T, axis=1)
    rows = sig.reshape(n * n, n + 1)
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    return inv.reshape(n, n), uniq


def _describe(row: np.ndarray, k: int) -> tuple:
    """Palette entry: old colour and the (c1, c2, count) triples."""
    vals, cnt = np.unique(row[1:], return_counts=True)
    return (int(row[0]), tuple((int(v // k), int(v % k), int(c)) for v, c in zip(vals, cnt)))


def wl2_stabilize(init: PairColoring, max_rounds: int | None = None) -> PairColoring:
    """Coarsest stable refinement of ``init`` with a canonical palette."""
    C = init.color.astype(np.int64)
    k = int(C.max()) + 1
    history = [_digest(init.palette, np.bincount(C.ravel(), minlength=k))]
    palette = init.palette
    rounds = 0
    while max_rounds is None or rounds < max_rounds:
        new, uniq = _round(C, k)
        k_new = uniq.shape[0]
        rounds += 1
        # the final round is recorded too: it carries the intersection numbers
        palette = tuple(_describe(r, k) for r in uniq)
        history.append(_digest(palette, np.bincount(new.ravel(), minlength=k_new)))
        stable = k_new == k
        C, k = new, k_new
        if stable:
            break
    return PairColoring(init.n, C, palette, history)


def _digest(palette, hist) -> str:
    h = hashlib.sha256(json.dumps([list(palette), np.asarray(hist).tolist()]).encode())
    return h.hexdigest()


def is_stable(pc: PairColoring) -> bool:
    """Full recount: one more round does not split any colour."""
    k = pc.num_colors
    _, uniq = _round(pc.color.astype(np.int64), k)
    return uniq.shape[0] == k


def certificate(pc: PairColoring) -> str:
    """Hash of the refinement history of a stabilized colouring."""
    if not pc.history:
        pc = wl2_stabilize(pc)
    return hashlib.sha256("|".join(pc.history).encode()).hexdigest()


def disjoint_union(c1: PairColoring, c2: PairColoring) -> PairColoring:
    """Both colourings side by side; cross pairs get a fresh colour."""
    n1, n2 = c1.n, c2.n
    names = {}
    ids = {}
    for d in list(c1.palette) + list(c2.palette) + ["cross"]:
        key = json.dumps(d)
        if key not in ids:
            ids[key] = len(ids)
            names[ids[key]] = key
    m1 = np.array([ids[json.dumps(d)] for d in c1.palette], dtype=np.int64)
    m2 = np.array([ids[json.dumps(d)] for d in c2.palette], dtype=np.int64)
    lab = np.full((n1 + n2, n1 + n2), ids[json.dumps("cross")], dtype=np.int64)
    lab[:n1, :n1] = m1[c1.color]
    lab[n1:, n1:] = m2[c2.color]
    return _from_labels(lab, names)


def wl2_equivalent(c1: PairColoring, c2: PairColoring) -> bool:
    """Joint stabilization on the disjoint union; compare the two halves' colour multisets."""
    if c1.n != c2.n:
        return False
    st = wl2_stabilize(disjoint_union(c1, c2))
    n = c1.n
    k = st.num_colors
    h1 = np.bincount(st.color[:n, :n].ravel(), minlength=k)
    h2 = np.bincount(st.color[n:, n:].ravel(), minlength=k)
    return bool(np.array_equal(h1, h2))


def sring_coloring(A: SRing) -> PairColoring:
    """The relations ``R(Y)`` of ``A`` as a pair colouring."""
    G = A.group
    return PairColoring(G.order, A.class_of[G.sub_table.T].astype(np.int64), tuple(range(A.rank)))


@dataclass
class WLComparison:
    wl_colors: int
    sring_rank: int
    unions_of_relations: bool
    equal: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def wl_closure_vs_sring(G: Group, X) -> WLComparison:
    st = wl2_stabilize(cayley_digraph(G, X))
    A = wielandt_closure(G, [list(X)])
    rel = sring_coloring(A).color
    # each relation must be monochrome in the WL colouring
    unions = True
    flat_wl, flat_rel = st.color.ravel(), rel.ravel()
    for c in range(A.rank):
        vals = flat_wl[flat_rel == c]
        if (vals != vals[0]).any():
            unions = False
            break
    equal = unions and st.num_colors == A.rank
    return WLComparison(st.num_colors, A.rank, unions, equal)


# ---------------------------------------------------------- graph files


def graph_to_json(adj: np.ndarray) -> dict:
    u, v = np.nonzero(adj)
    return {"n": int(adj.shape[0]), "arcs": [[int(a), int(b)] for a, b in zip(u, v)]}


def graph_from_json(obj: dict) -> np.ndarray:
    """Accepts ``{n, arcs}`` or ``{group, connection_set}``."""
    if "group" in obj:
        from .abelian import make_group

        G = make_group(obj["group"])
        X = [G.parse_element(x) if not isinstance(x, int) else x for x in obj["connection_set"]]
        return cayley_adjacency(G, X)
    n = int(obj["n"])
    adj = np.zeros((n, n), dtype=bool)
    for a, b in obj.get("arcs", []):
        adj[int(a), int(b)] = True
    return adj


# ------------------------------------------------- isomorphism oracle


def _vertex_refine(adjs, cols):
    """Colour refinement run jointly on several digraphs (consistent names)."""
    while True:
        sigs = []
        for adj, c in zip(adjs, cols):
            code = c[None, :] * 4 + adj * 2 + adj.T  # code[x, y]
            srt = np.sort(code, axis=1)
            sigs.append(np.concatenate([c[:, None], srt], axis=1))
        allrows = np.concatenate(sigs)
        _, inv = np.unique(allrows, axis=0, return_inverse=True)
        inv = inv.ravel()
        new = np.split(inv, np.cumsum([len(c) for c in cols])[:-1])
        if len(np.unique(inv)) == len(np.unique(np.concatenate(cols))):
            return new
        cols = new


def graph_isomorphism(adj1: np.ndarray, adj2: np.ndarray) -> np.ndarray | None:
    """A vertex bijection ``f`` with ``adj2[f[u], f[v]] == adj1[u, v]``, or None.

    Individualization and colour refinement with backtracking.
    """
    a1 = np.asarray(adj1, dtype=np.int64)
    a2 = np.asarray(adj2, dtype=np.int64)
    n = a1.shape[0]
    if a2.shape[0] != n or a1.sum() != a2.sum():
        return None

    def rec(c1, c2):
        c1, c2 = _vertex_refine([a1, a2], [c1, c2])
        if not np.array_equal(np.bincount(c1, minlength=2 * n), np.bincount(c2, minlength=2 * n)):
            return None
        counts = np.bincount(c1)
        if counts.max() == 1:
            f = np.empty(n, dtype=np.int64)
            f[np.argsort(c1)] = np.argsort(c2)
            return f if np.array_equal(a2[np.ix_(f, f)], a1) else None
        # smallest non-singleton cell
        sizes = np.where(counts > 1, counts, n + 1)
        cell = int(np.argmin(sizes))
        u = int(np.flatnonzero(c1 == cell)[0])
        fresh = int(max(c1.max(), c2.max())) + 1
        for v in np.flatnonzero(c2 == cell):
            d1, d2 = c1.copy(), c2.copy()
            d1[u] = fresh
            d2[int(v)] = fresh
            f = rec(d1, d2)
            if f is not None:
                return f
        return None

    return rec(np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64))


def closed_walk_invariant(adj: np.ndarray, length: int = 8) -> tuple[int, ...]:
    """``trace(A^k)`` for ``k <= length``; an exact isomorphism invariant."""
    A = np.asarray(adj, dtype=np.int64)
    P = np.eye(A.shape[0], dtype=np.int64)
    out = [int(A.sum())]
    for _ in range(length):
        P = P @ A
        out.append(int(np.trace(P)))
    return tuple(out)
