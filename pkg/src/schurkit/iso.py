"""Isomorphism searches between S-rings.

Three notions are handled here:

* algebraic isomorphisms (class bijections preserving structure constants),
* combinatorial isomorphisms (point bijections carrying basic relations to
  basic relations), including the question whether one induces a given
  algebraic isomorphism,
* Cayley isomorphisms (group isomorphisms that are combinatorial).

All point searches fix ``0 -> 0``: translations of the target are
automorphisms of every S-ring and induce the identity on classes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import abelian
from .abelian import GroupMap
from .errors import BudgetExceeded, InvalidInput
from .sring import SRing, is_A_set

DEFAULT_BUDGET = 10**8


def default_budget() -> int:
    return int(float(os.environ.get("SCHURKIT_BUDGET_NODES", DEFAULT_BUDGET)))


class Budget:
    """Shared node counter for a chain of searches."""

    def __init__(self, limit: int | None = None):
        self.limit = default_budget() if limit is None else int(limit)
        self.used = 0

    def tick(self, k: int = 1):
        self.used += k
        if self.used > self.limit:
            raise BudgetExceeded(f"node budget {self.limit} exhausted", nodes=self.used)


# ------------------------------------------------------------ value types


@dataclass(frozen=True)
class AlgIso:
    source: SRing
    target: SRing
    class_map: tuple[int, ...]

    @property
    def perm(self) -> np.ndarray:
        return np.asarray(self.class_map, dtype=np.int64)

    def is_valid(self) -> bool:
        A, B = self.source, self.target
        if A.rank != B.rank or sorted(self.class_map) != list(range(B.rank)):
            return False
        p = self.perm
        return bool(np.array_equal(B.constants[np.ix_(p, p, p)], A.constants))

    def then(self, other: "AlgIso") -> "AlgIso":
        if other.source != self.target:
            raise InvalidInput("algebraic isomorphisms are not composable")
        return AlgIso(self.source, other.target, tuple(int(other.class_map[i]) for i in self.class_map))

    def inverse(self) -> "AlgIso":
        inv = [0] * len(self.class_map)
        for i, j in enumerate(self.class_map):
            inv[j] = i
        return AlgIso(self.target, self.source, tuple(inv))

    def is_identity(self) -> bool:
        return self.source == self.target and all(i == j for i, j in enumerate(self.class_map))

    def image_set(self, X) -> frozenset[int]:
        """``X^phi`` for an A-set ``X``."""
        if not is_A_set(self.source, X):
            raise InvalidInput("not an A-set")
        idx = {int(self.source.class_of[x]) for x in X}
        return frozenset(y for i in idx for y in self.target.classes[self.class_map[i]])


@dataclass(frozen=True)
class PointMap:
    images: tuple[int, ...]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.images, dtype=np.int64)

    def then(self, other: "PointMap") -> "PointMap":
        return PointMap(tuple(int(other.images[y]) for y in self.images))

    def is_bijective(self) -> bool:
        return sorted(self.images) == list(range(len(self.images)))


# --------------------------------------------------------- colour matrices


def color_matrix(A: SRing) -> np.ndarray:
    """``C[u, v]`` = index of the class containing ``v - u``."""
    return A.class_of[A.group.sub_table.T]


def induced_algebraic_iso(f, A: SRing, B: SRing) -> AlgIso | None:
    """``phi_f`` if ``f`` is a combinatorial isomorphism ``A -> B``, else ``None``."""
    f = np.asarray(f.images if isinstance(f, PointMap) else f, dtype=np.int64)
    n = A.group.order
    if B.group.order != n or len(f) != n or len(np.unique(f)) != n or A.rank != B.rank:
        return None
    C = color_matrix(A)
    D = color_matrix(B)[np.ix_(f, f)]
    pairs = np.unique(np.stack([C.ravel(), D.ravel()], axis=1), axis=0)
    if len(pairs) != A.rank or len(np.unique(pairs[:, 1])) != A.rank:
        return None
    cmap = [0] * A.rank
    for x, y in pairs:
        cmap[int(x)] = int(y)
    return AlgIso(A, B, tuple(cmap))


def replay(phi: AlgIso, f) -> bool:
    """Check that the point map ``f`` induces exactly ``phi``."""
    f = np.asarray(f.images if isinstance(f, PointMap) else f, dtype=np.int64)
    A, B = phi.source, phi.target
    if len(f) != A.group.order or len(np.unique(f)) != len(f) or B.group.order != len(f):
        return False
    return bool(np.array_equal(color_matrix(B)[np.ix_(f, f)], phi.perm[color_matrix(A)]))


# ------------------------------------------------- algebraic isomorphisms


def _class_colors(As: list[SRing]) -> list[np.ndarray]:
    """Joint refinement of class colours preserved by every algebraic isomorphism."""
    cols = []
    for A in As:
        self_inv = (A.inverse == np.arange(A.rank)).astype(np.int64)
        cols.append(np.stack([np.asarray(A.sizes), self_inv, (np.arange(A.rank) == 0)], axis=1))
    _, lab = np.unique(np.concatenate(cols), axis=0, return_inverse=True)
    lab = lab.ravel()
    cuts = np.cumsum([A.rank for A in As])[:-1]
    labels = np.split(lab, cuts)
    while True:
        sigs = []
        for A, c in zip(As, labels):
            r = A.rank
            sig_rows = []
            for X in range(r):
                a = A.constants[X]  # (Y, Z)
                b = A.constants[:, :, X]  # (Y, Z) with X as product
                key = []
                for M in (a, b):
                    ys, zs = np.nonzero(M)
                    trip = sorted(zip(c[ys].tolist(), c[zs].tolist(), M[ys, zs].tolist()))
                    key.append(tuple(trip))
                sig_rows.append((int(c[X]), tuple(key)))
            sigs.extend(sig_rows)
        uniq = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = np.array([uniq[s] for s in sigs], dtype=np.int64)
        if len(uniq) == len(np.unique(np.concatenate(labels))):
            return labels
        labels = np.split(new, cuts)


def _bits(mask: np.ndarray) -> int:
    return int.from_bytes(np.packbits(mask.astype(bool), bitorder="little").tobytes(), "little")


def _iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def find_algebraic_isos(A: SRing, B: SRing, limit: int | None = None, budget: Budget | None = None) -> list[AlgIso]:
    """Every algebraic isomorphism ``A -> B`` (at most ``limit``)."""
    if A.group.order != B.group.order or A.rank != B.rank or sorted(A.sizes) != sorted(B.sizes):
        return []
    budget = budget or Budget()
    r = A.rank
    ca, cb = _class_colors([A, B])
    if sorted(ca.tolist()) != sorted(cb.tolist()):
        return []
    cA, cB = A.constants, B.constants
    full = (1 << r) - 1
    domains = [_bits(cb == ca[X]) for X in range(r)]
    mask_cache: dict = {}

    def mask_xy(Xp, Yp, v):
        # classes Z' with c'[X', Y', Z'] == v
        key = (Xp, Yp)
        d = mask_cache.get(key)
        if d is None:
            row = cB[Xp, Yp]
            d = {int(val): _bits(row == val) for val in np.unique(row)}
            mask_cache[key] = d
        return d.get(v, 0)

    def mask_xz(Xp, Zp, v):
        # classes Y' with c'[X', Y', Z'] == v
        key = ("z", Xp, Zp)
        d = mask_cache.get(key)
        if d is None:
            col = cB[Xp, :, Zp]
            d = {int(val): _bits(col == val) for val in np.unique(col)}
            mask_cache[key] = d
        return d.get(v, 0)

    out: list[AlgIso] = []
    phi = [-1] * r

    def assign(doms, X, Xp, assigned):
        doms = list(doms)
        bit = 1 << Xp
        for W in range(r):
            if phi[W] < 0:
                doms[W] &= ~bit
        phi[X] = Xp
        for Y in assigned + [X]:
            Yp = phi[Y]
            for W in range(r):
                if phi[W] >= 0:
                    continue
                d = doms[W] & mask_xy(Xp, Yp, int(cA[X, Y, W])) & mask_xz(Xp, Yp, int(cA[X, W, Y]))
                d &= mask_xz(Yp, Xp, int(cA[Y, W, X]))
                if not d:
                    return None
                doms[W] = d
        # consistency among assigned classes
        for Y in assigned:
            Yp = phi[Y]
            for Z in assigned + [X]:
                Zp = phi[Z]
                if cA[X, Y, Z] != cB[Xp, Yp, Zp] or cA[Y, Z, X] != cB[Yp, Zp, Xp]:
                    return None
        return doms

    def rec(doms, assigned):
        budget.tick()
        if limit is not None and len(out) >= limit:
            return
        if len(assigned) == r:
            iso = AlgIso(A, B, tuple(phi))
            out.append(iso)
            return
        X = min((W for W in range(r) if phi[W] < 0), key=lambda W: (doms[W].bit_count(), W))
        for Xp in _iter_bits(doms[X] & full):
            nd = assign(doms, X, Xp, assigned)
            if nd is not None:
                rec(nd, assigned + [X])
            phi[X] = -1
            if limit is not None and len(out) >= limit:
                return

    if not domains[0] & 1:
        return []
    start = assign(domains, 0, 0, [])
    if start is None:
        return []
    rec(start, [0])
    for iso in out:
        if not iso.is_valid():
            raise AssertionError("algebraic isomorphism search produced an invalid map")
    return out


def algebraically_isomorphic(A: SRing, B: SRing, budget: Budget | None = None) -> bool:
    return bool(find_algebraic_isos(A, B, limit=1, budget=budget))


def algebraic_automorphisms(A: SRing, budget: Budget | None = None) -> list[AlgIso]:
    return find_algebraic_isos(A, A, budget=budget)


# ----------------------------------------------------- point-map searches


@lru_cache(maxsize=256)
def _target_masks(B: SRing) -> list[list[int]]:
    D = color_matrix(B)
    out = []
    for u in range(B.group.order):
        row = D[u]
        out.append([_bits(row == c) for c in range(B.rank)])
    return out


def _point_search(A: SRing, B: SRing, cmap, fixed=(), budget: Budget | None = None, want: int = 1):
    """Point bijections ``f`` with ``f(0) = 0`` and ``class_B(f(v) - f(u)) = cmap[class_A(v - u)]``."""
    budget = budget or Budget()
    n = A.group.order
    if B.group.order != n:
        return []
    C = color_matrix(A).tolist()
    masks = _target_masks(B)
    cmap = [int(c) for c in cmap]
    # f(u) must lie in class cmap[class(u)] since C[0, u] = class(u)
    class_bits = [_bits(B.class_of == k) for k in range(B.rank)]
    doms = [class_bits[cmap[int(A.class_of[u])]] for u in range(n)]
    order_key = [(A.sizes[int(A.class_of[u])], u) for u in range(n)]
    f = [-1] * n
    sols = []

    def assign(doms, u, up):
        doms = list(doms)
        f[u] = up
        bit = ~(1 << up)
        row = C[u]
        mk = masks[up]
        for w in range(n):
            if f[w] >= 0:
                continue
            d = doms[w] & mk[cmap[row[w]]] & bit
            if not d:
                return None
            doms[w] = d
        doms[u] = 1 << up
        return doms

    def rec(doms, depth):
        budget.tick()
        if depth == n:
            sols.append(list(f))
            return len(sols) >= want
        best = None
        bk = None
        for w in range(n):
            if f[w] < 0:
                k = (doms[w].bit_count(), order_key[w])
                if bk is None or k < bk:
                    best, bk = w, k
        for up in _iter_bits(doms[best]):
            nd = assign(doms, best, up)
            if nd is not None and rec(nd, depth + 1):
                return True
            f[best] = -1
        return False

    cur = doms
    fixed = [(0, 0)] + [(int(u), int(v)) for u, v in fixed if int(u) != 0]
    for u, up in fixed:
        if f[u] >= 0:
            if f[u] != up:
                return []
            continue
        if not (cur[u] >> up) & 1:
            return []
        cur = assign(cur, u, up)
        if cur is None:
            return []
    rec(cur, sum(1 for x in f if x >= 0))
    return sols


def find_inducing_iso(phi: AlgIso, budget: Budget | None = None, cayley_first: bool = True) -> PointMap | None:
    """A point bijection inducing ``phi``, or ``None`` once the search is exhausted."""
    A, B = phi.source, phi.target
    n = A.group.order
    ident = np.arange(n)
    if B.group.order == n and replay(phi, ident):
        return PointMap(tuple(range(n)))
    if cayley_first:
        for g in abelian.isomorphisms(A.group, B.group, bound=10**6):
            if replay(phi, g.table):
                return PointMap(tuple(int(x) for x in g.table))
    sols = _point_search(A, B, phi.class_map, budget=budget, want=1)
    if not sols:
        return None
    f = PointMap(tuple(sols[0]))
    if not replay(phi, f):
        raise AssertionError("point search returned a map that does not induce phi")
    return f


def combinatorially_isomorphic(A: SRing, B: SRing, budget: Budget | None = None) -> PointMap | None:
    """Some combinatorial isomorphism ``A -> B`` (tries each algebraic isomorphism)."""
    for phi in find_algebraic_isos(A, B, budget=budget):
        f = find_inducing_iso(phi, budget=budget)
        if f is not None:
            return f
    return None


# --------------------------------------------------------- Cayley isomorphisms


def cayley_image(A: SRing, sigma: GroupMap) -> SRing:
    """``A^sigma`` for a group isomorphism ``sigma``."""
    from .sring import _build

    t = sigma.table
    return _build(sigma.target, [t[list(X)].tolist() for X in A.classes])


def find_cayley_isos(A: SRing, B: SRing, limit: int | None = None) -> list[GroupMap]:
    G, H = A.group, B.group
    if A.rank != B.rank or not abelian.is_isomorphic_group(G, H):
        return []
    out = []
    for g in abelian.isomorphisms(G, H, bound=10**6):
        img = B.class_of[g.table]
        pairs = np.unique(np.stack([A.class_of, img], axis=1), axis=0)
        if len(pairs) == A.rank and sorted(B.sizes[int(y)] for _, y in pairs) == sorted(A.sizes):
            if all(B.sizes[int(y)] == A.sizes[int(x)] for x, y in pairs):
                out.append(g)
                if limit is not None and len(out) >= limit:
                    break
    return out


def cayley_isomorphic(A: SRing, B: SRing) -> bool:
    return bool(find_cayley_isos(A, B, limit=1))


# ---------------------------------------------------------- Aut(A)


@dataclass
class AutGroup:
    """``Aut(A) = G_right . Aut(A)_e``; the stabilizer is described by a strong generating set."""

    sring: SRing
    stabilizer_generators: list[tuple[int, ...]]
    base: list[int]
    orbit_sizes: list[int]

    @property
    def stabilizer_order(self) -> int:
        out = 1
        for s in self.orbit_sizes:
            out *= s
        return out

    @property
    def order(self) -> int:
        return self.sring.group.order * self.stabilizer_order

    def translations(self) -> list[tuple[int, ...]]:
        G = self.sring.group
        return [tuple(int(x) for x in G.add_table[:, G.unit(i)]) for i in range(G.rank)]

    def generators(self) -> list[tuple[int, ...]]:
        return self.translations() + list(self.stabilizer_generators)

    def permutation_group(self):
        from sympy.combinatorics import Permutation, PermutationGroup

        n = self.sring.group.order
        gens = [Permutation(list(g)) for g in self.generators()] or [Permutation(list(range(n)))]
        return PermutationGroup(gens)


def sring_automorphisms(A: SRing, budget: Budget | None = None, bound: int = 200) -> AutGroup:
    """Generators and order of ``Aut(A)`` by orbit-stabilizer over base points."""
    n = A.group.order
    if n > bound:
        raise InvalidInput(f"|G|={n} exceeds the automorphism search bound {bound}")
    budget = budget or Budget()
    ident = list(range(A.rank))
    gens: list[tuple[int, ...]] = []
    base: list[int] = []
    orbit_sizes: list[int] = []
    C = color_matrix(A)
    while True:
        fixed = [(b, b) for b in base]
        # points not yet forced by the current base
        sols = _point_search(A, A, ident, fixed=fixed, budget=budget, want=2)
        if len(sols) < 2:
            break
        moved = [u for u in range(n) if sols[0][u] != sols[1][u]]
        b = min(moved, key=lambda u: (A.sizes[int(A.class_of[u])], u))
        # candidates: same class as b (automorphisms fixing 0 preserve classes)
        cands = [u for u in A.classes[int(A.class_of[b])]]
        level_gens = [g for g in gens if all(g[x] == x for x in base)]
        orbit = {b}
        frontier = [b]

        def close():
            while frontier:
                x = frontier.pop()
                for g in level_gens:
                    y = g[x]
                    if y not in orbit:
                        orbit.add(y)
                        frontier.append(y)

        close()
        for c in cands:
            if c in orbit:
                continue
            found = _point_search(A, A, ident, fixed=fixed + [(b, c)], budget=budget, want=1)
            if found:
                g = tuple(found[0])
                gens.append(g)
                level_gens.append(g)
                orbit.add(c)
                frontier.append(c)
                close()
        base.append(b)
        orbit_sizes.append(len(orbit))
    del C
    return AutGroup(A, gens, base, orbit_sizes)


def is_normal_sring(A: SRing, aut: AutGroup | None = None, budget: Budget | None = None) -> bool:
    """``G_right`` is normal in ``Aut(A)`` iff every stabilizer generator is a group automorphism."""
    aut = aut or sring_automorphisms(A, budget=budget)
    add = A.group.add_table
    for g in aut.stabilizer_generators:
        f = np.asarray(g)
        if not np.array_equal(f[add], add[f[:, None], f[None, :]]):
            return False
    return True


def aut_restriction_matches(A: SRing, S, budget: Budget | None = None) -> bool:
    """``Aut(A_U)^S == Aut(A_S)`` for an A-section ``S = U/L``."""
    from sympy.combinatorics import Permutation, PermutationGroup

    from .sring import restriction, section_sring

    U = S.upper
    AU = restriction(A, U)
    H, emb = U.as_group()
    AS = section_sring(A, S)
    # quotient coordinates of U's elements, expressed in AU's group
    Q, proj = S.quotient()
    to_q = np.asarray(proj)[np.asarray(emb)]
    auU = sring_automorphisms(AU, budget=budget)
    auS = sring_automorphisms(AS, budget=budget)
    # image of each generator of Aut(A_U) on the cosets
    rep = {}
    for h in range(H.order):
        rep.setdefault(int(to_q[h]), h)
    gens = []
    for g in auU.generators():
        perm = [0] * Q.order
        for q, h in rep.items():
            perm[q] = int(to_q[g[h]])
        gens.append(Permutation(perm))
    if not gens:
        gens = [Permutation(list(range(Q.order)))]
    image = PermutationGroup(gens)
    return image.order() == auS.order


# ---------------------------------------------------------- separability


@dataclass
class SeparabilityWitness:
    target: SRing
    class_map: tuple[int, ...]
    images: tuple[int, ...] | None
    verified: bool


@dataclass
class SeparabilityReport:
    subject: SRing
    witnesses: list[SeparabilityWitness] = field(default_factory=list)
    nodes: int = 0
    targets_checked: int = 0

    @property
    def verdict(self) -> str:
        return "separable" if all(w.images is not None and w.verified for w in self.witnesses) else "not-separable"

    @property
    def separable(self) -> bool:
        return self.verdict == "separable"

    def summary(self) -> dict:
        return {
            "group": self.subject.group.spec(),
            "rank": self.subject.rank,
            "verdict": self.verdict,
            "algebraic_isomorphisms": len(self.witnesses),
            "failures": sum(1 for w in self.witnesses if w.images is None or not w.verified),
            "targets_checked": self.targets_checked,
            "nodes": self.nodes,
        }


def is_separable(A: SRing, target_orbits=None, budget: Budget | None = None) -> SeparabilityReport:
    """Find an inducing isomorphism for every algebraic isomorphism from ``A``.

    ``target_orbits`` is a list of ``(representative, [(member, sigma), ...])``
    where ``sigma`` is a group isomorphism carrying the representative onto the
    member; by default every abelian group of order ``|A.group|`` is enumerated.
    Every algebraic isomorphism ``A -> member`` factors as
    ``alpha . phi_rep . sigma`` with ``alpha`` an algebraic automorphism of
    ``A``; the witness is the matching composite point map and is replayed.
    """
    budget = budget or Budget()
    if target_orbits is None:
        from .enumeration import cayley_orbits_of_order

        target_orbits = cayley_orbits_of_order(A.group.order, rank=A.rank)
    report = SeparabilityReport(A)
    auts = algebraic_automorphisms(A, budget=budget)
    aut_witness: dict[tuple, PointMap | None] = {}
    for alpha in auts:
        aut_witness[alpha.class_map] = find_inducing_iso(alpha, budget=budget)
    for rep, members in target_orbits:
        report.targets_checked += len(members)
        if rep.rank != A.rank or sorted(rep.sizes) != sorted(A.sizes):
            continue
        first = find_algebraic_isos(A, rep, limit=1, budget=budget)
        if not first:
            continue
        phi_k = first[0]
        g_k = find_inducing_iso(phi_k, budget=budget)
        for member, sigma in members:
            # class map of sigma from rep to member
            s_cls = member.class_of[sigma.table[[X[0] for X in rep.classes]]]
            s_iso = AlgIso(rep, member, tuple(int(x) for x in s_cls))
            for alpha in auts:
                phi = alpha.then(phi_k).then(s_iso)
                fa = aut_witness[alpha.class_map]
                if fa is None or g_k is None:
                    report.witnesses.append(SeparabilityWitness(member, phi.class_map, None, False))
                    continue
                f = fa.then(g_k).then(PointMap(tuple(int(x) for x in sigma.table)))
                report.witnesses.append(SeparabilityWitness(member, phi.class_map, f.images, replay(phi, f)))
    report.nodes = budget.used
    return report
