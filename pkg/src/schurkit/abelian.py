"""Finite abelian groups given as products of cyclic factors.

Elements are mixed-radix integers: for factors ``(n_1, ..., n_k)`` the
element with coordinates ``(c_1, ..., c_k)`` has index
``((c_1 * n_2 + c_2) * n_3 + ...) + c_k``.  The group operation is
coordinatewise addition, tabulated once per group.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import InvalidInput, InvalidSpec, NotAutomorphism, TooLarge

DEFAULT_BOUND = 200


@dataclass(frozen=True)
class Group:
    """Direct product of cyclic groups with orders ``factors`` (descending)."""

    factors: tuple[int, ...]

    def __post_init__(self):
        if any(n < 2 for n in self.factors):
            raise InvalidSpec(f"cyclic factor orders must be >= 2, got {self.factors}")
        if list(self.factors) != sorted(self.factors, reverse=True):
            raise InvalidSpec("factors must be sorted descending; use make_group")

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.factors) if self.factors else 1

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out = []
        s = 1
        for n in reversed(self.factors):
            out.append(s)
            s *= n
        return tuple(reversed(out))

    @cached_property
    def coords_table(self) -> np.ndarray:
        n = self.order
        idx = np.arange(n)
        cols = [(idx // s) % f for s, f in zip(self.strides, self.factors)]
        if not cols:
            return np.zeros((1, 0), dtype=np.int64)
        return np.stack(cols, axis=1).astype(np.int64)

    def _index_array(self, coords: np.ndarray) -> np.ndarray:
        if not self.factors:
            return np.zeros(coords.shape[:-1], dtype=np.int64)
        coords = coords % np.array(self.factors)
        return (coords * np.array(self.strides)).sum(axis=-1)

    @cached_property
    def add_table(self) -> np.ndarray:
        c = self.coords_table
        return self._index_array(c[:, None, :] + c[None, :, :]).astype(np.int32)

    @cached_property
    def neg(self) -> np.ndarray:
        return self._index_array(-self.coords_table).astype(np.int32)

    @cached_property
    def sub_table(self) -> np.ndarray:
        """``sub_table[z, x] == z - x``."""
        return self.add_table[:, self.neg]

    @cached_property
    def element_orders(self) -> np.ndarray:
        c = self.coords_table
        out = np.ones(self.order, dtype=np.int64)
        for i, f in enumerate(self.factors):
            part = f // np.gcd(c[:, i], f)
            out = np.lcm(out, part)
        return out

    def scale(self, m: int) -> np.ndarray:
        """Table of ``x -> m*x``."""
        return self._index_array(self.coords_table * m).astype(np.int32)

    def index(self, coords) -> int:
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise InvalidInput(f"expected {self.rank} coordinates, got {coords}")
        return int(sum((c % f) * s for c, f, s in zip(coords, self.factors, self.strides)))

    def coords(self, i: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.coords_table[i])

    def unit(self, i: int) -> int:
        """Index of the generator of the ``i``-th cyclic factor."""
        return self.strides[i]

    def add(self, x: int, y: int) -> int:
        return int(self.add_table[x, y])

    def spec(self) -> str:
        return "x".join(map(str, self.factors)) if self.factors else "1"

    def __str__(self) -> str:
        return self.spec()

    def parse_element(self, text: str) -> int:
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise InvalidInput(f"element literal must be parenthesised: {text!r}")
        parts = [p for p in body[1:-1].split(",") if p.strip()]
        return self.index(int(p) for p in parts)

    def format_element(self, i: int) -> str:
        return "(" + ",".join(map(str, self.coords(i))) + ")"


TRIVIAL = Group(())


def make_group(spec) -> Group:
    """Build a group from a list of cyclic orders or a ``"3x3x5"`` string."""
    if isinstance(spec, str):
        if not re.fullmatch(r"\s*\d+(\s*x\s*\d+)*\s*", spec):
            raise InvalidSpec(f"bad group spec {spec!r}")
        spec = [int(t) for t in spec.split("x")]
    spec = list(spec)
    if not spec:
        raise InvalidSpec("empty group spec")
    if any(int(n) < 2 for n in spec):
        raise InvalidSpec(f"cyclic factor orders must be >= 2, got {spec}")
    return Group(tuple(sorted((int(n) for n in spec), reverse=True)))


def element_order(G: Group, g) -> int:
    if not isinstance(g, (int, np.integer)):
        g = G.index(g)
    return int(G.element_orders[g])


def units(G: Group) -> list[int]:
    """Residues modulo the exponent that are coprime to ``|G|``."""
    e = G.exponent
    return [m for m in range(1, e + 1) if math.gcd(m, e) == 1] if e > 1 else [1]


def power_set(G: Group, X, m: int) -> frozenset[int]:
    """``{m*x : x in X}`` (written ``X^(m)`` multiplicatively)."""
    tab = G.scale(m)
    return frozenset(int(tab[x]) for x in X)


# ---------------------------------------------------------------- subgroups


def _closure_mask(G: Group, gens, start=None) -> np.ndarray:
    mask = np.zeros(G.order, dtype=bool)
    if start is None:
        mask[0] = True
    else:
        mask |= start
    for g in gens:
        g = int(g)
        if mask[g]:
            continue
        # the coset walk S, S+g, S+2g, ... closes after |g| steps
        cur = np.flatnonzero(mask)
        layer = cur
        acc = mask.copy()
        for _ in range(int(G.element_orders[g]) - 1):
            layer = G.add_table[layer, g]
            acc[layer] = True
        mask = acc
    return mask


@dataclass(frozen=True)
class Subgroup:
    parent: Group
    members: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.members)] = True
        return m

    @cached_property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def __contains__(self, x) -> bool:
        return int(x) in self.member_set

    def issubgroup(self, other: "Subgroup") -> bool:
        return self.member_set <= other.member_set

    @cached_property
    def _as_group(self):
        G = self.parent
        return identify_abelian(list(self.members), lambda x, y: int(G.add_table[x, y]), 0)

    def as_group(self) -> tuple[Group, np.ndarray]:
        """An abstract copy of this subgroup and the embedding into the parent."""
        return self._as_group

    def __repr__(self) -> str:
        return f"Subgroup({self.parent.spec()}, order={self.order})"


def subgroup_from_mask(G: Group, mask) -> Subgroup:
    return Subgroup(G, tuple(int(i) for i in np.flatnonzero(mask)))


def subgroup_generated(G: Group, gens) -> Subgroup:
    return subgroup_from_mask(G, _closure_mask(G, list(gens)))


def trivial_subgroup(G: Group) -> Subgroup:
    return Subgroup(G, (0,))


def whole_group(G: Group) -> Subgroup:
    return Subgroup(G, tuple(range(G.order)))


def all_subgroups(G: Group, bound: int = DEFAULT_BOUND) -> list[Subgroup]:
    """Every subgroup of ``G`` once, sorted by (order, members)."""
    if G.order > bound:
        raise TooLarge(f"|G|={G.order} exceeds subgroup enumeration bound {bound}")
    return list(_all_subgroups(G))


@lru_cache(maxsize=64)
def _all_subgroups(G: Group) -> tuple[Subgroup, ...]:
    seen = {}
    start = _closure_mask(G, [])
    queue = deque([start])
    seen[start.tobytes()] = start
    while queue:
        S = queue.popleft()
        for g in range(G.order):
            if S[g]:
                continue
            T = _closure_mask(G, [g], start=S)
            key = T.tobytes()
            if key not in seen:
                seen[key] = T
                queue.append(T)
    subs = [subgroup_from_mask(G, m) for m in seen.values()]
    subs.sort(key=lambda H: (H.order, H.members))
    return tuple(subs)


# ----------------------------------------------------------------- sections


@dataclass(frozen=True)
class Section:
    """The section ``upper/lower`` of a common parent group."""

    upper: Subgroup
    lower: Subgroup

    def __post_init__(self):
        if self.upper.parent != self.lower.parent:
            raise InvalidInput("section subgroups live in different groups")
        if not self.lower.issubgroup(self.upper):
            raise InvalidInput("lower subgroup of a section must lie in the upper one")

    @property
    def parent(self) -> Group:
        return self.upper.parent

    @property
    def order(self) -> int:
        return self.upper.order // self.lower.order

    @cached_property
    def coset_of(self) -> np.ndarray:
        """Coset id of each parent element (``-1`` outside ``upper``)."""
        G = self.parent
        out = np.full(G.order, -1, dtype=np.int64)
        lower = np.array(self.lower.members)
        cid = 0
        for u in self.upper.members:
            if out[u] >= 0:
                continue
            out[G.add_table[u, lower]] = cid
            cid += 1
        return out

    @cached_property
    def cosets(self) -> tuple[tuple[int, ...], ...]:
        k = self.order
        buckets = [[] for _ in range(k)]
        for x in self.upper.members:
            buckets[self.coset_of[x]].append(x)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def _quotient(self):
        G = self.parent
        reps = [c[0] for c in self.cosets]
        coset_of = self.coset_of

        def add(i, j):
            return int(coset_of[G.add_table[reps[i], reps[j]]])

        Q, table = identify_abelian(list(range(len(reps))), add, 0)
        # table[q] = coset id; invert to coset id -> q
        q_of_coset = np.empty(len(reps), dtype=np.int64)
        q_of_coset[table] = np.arange(Q.order)
        proj = np.full(G.order, -1, dtype=np.int64)
        inside = coset_of >= 0
        proj[inside] = q_of_coset[coset_of[inside]]
        return Q, proj

    def quotient(self) -> tuple[Group, np.ndarray]:
        return self._quotient


def quotient_map(S: Section) -> tuple[Group, np.ndarray]:
    """The quotient group ``U/L`` and the projection (``-1`` outside ``U``)."""
    return S.quotient()


# ------------------------------------------------------- structure recovery


def _factorint(n: int) -> dict[int, int]:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _partitions(n: int, largest=None):
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def abelian_groups_of_order(n: int) -> list[Group]:
    """All abelian groups of order ``n`` in primary-decomposition form."""
    if n < 2:
        raise InvalidSpec("order must be at least 2")
    per_prime = []
    for p, a in sorted(_factorint(n).items()):
        per_prime.append([[p**e for e in part] for part in _partitions(a)])
    out = []
    for combo in itertools.product(*per_prime):
        out.append(make_group([f for part in combo for f in part]))
    out.sort(key=lambda G: (len(G.factors), G.factors))
    return out


def identify_abelian(elements, add, zero):
    """Recover the primary decomposition of an abelian group given abstractly.

    Returns ``(Q, table)`` where ``Q`` is a canonical :class:`Group` and
    ``table[q]`` is the element corresponding to index ``q`` of ``Q``.
    """
    m = len(elements)
    if m == 1:
        return TRIVIAL, np.array([elements[0]], dtype=np.int64)
    pos = {x: i for i, x in enumerate(elements)}

    def mult(k, x):
        acc = zero
        for _ in range(k):
            acc = add(acc, x)
        return acc

    order = {}
    for x in elements:
        k, acc = 1, x
        while acc != zero:
            acc = add(acc, x)
            k += 1
        order[x] = k

    factors = []
    for p, a in _factorint(m).items():
        counts = [1]
        for k in range(1, a + 1):
            counts.append(sum(1 for x in elements if (p**k) % order[x] == 0))
        conj = [round(math.log(counts[k] / counts[k - 1], p)) for k in range(1, a + 1)]
        # conj[k-1] = number of cyclic p-factors of exponent >= k
        exps = [sum(1 for c in conj if c > i) for i in range(conj[0])] if conj and conj[0] else []
        factors.extend(p**e for e in exps if e > 0)
    factors.sort(reverse=True)
    Q = Group(tuple(factors))

    def span(gens):
        S = {zero}
        for g in gens:
            new = set(S)
            frontier = list(S)
            for _ in range(order[g] - 1):
                frontier = [add(s, g) for s in frontier]
                new.update(frontier)
            S = new
        return S

    chosen: list = []

    def search(i, current):
        if i == len(factors):
            return True
        q = factors[i]
        for y in elements:
            if order[y] != q or y in current:
                continue
            nxt = span(chosen + [y]) if chosen else span([y])
            if len(nxt) != len(current) * q:
                continue
            chosen.append(y)
            if search(i + 1, nxt):
                return True
            chosen.pop()
        return False

    if not search(0, {zero}):
        raise InvalidInput("could not decompose abelian group")
    table = np.empty(Q.order, dtype=np.int64)
    for q in range(Q.order):
        acc = zero
        for c, y in zip(Q.coords(q), chosen):
            acc = add(acc, mult(c, y))
        table[q] = acc
    if len(set(table.tolist())) != m or any(t not in pos for t in table.tolist()):
        raise InvalidInput("decomposition is not bijective")
    return Q, table


# ------------------------------------------------------------- group maps


@dataclass(frozen=True)
class GroupMap:
    """Homomorphism fixed by the images of the cyclic-factor generators."""

    source: Group
    target: Group
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.source.rank:
            raise InvalidInput("one image per source generator is required")
        for n, y in zip(self.source.factors, self.images):
            if n % int(self.target.element_orders[y]) != 0:
                raise InvalidInput(
                    f"image {self.target.format_element(y)} has order not dividing {n}"
                )

    @cached_property
    def table(self) -> np.ndarray:
        T = self.target
        out = np.zeros(self.source.order, dtype=np.int64)
        for i, y in enumerate(self.images):
            col = self.source.coords_table[:, i]
            # multiples of y, looked up per coordinate value
            mults = np.zeros(self.source.factors[i], dtype=np.int64)
            acc = 0
            for c in range(self.source.factors[i]):
                mults[c] = acc
                acc = int(T.add_table[acc, y])
            part = mults[col]
            out = T.add_table[out, part]
        return out.astype(np.int64)

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def is_bijective(self) -> bool:
        return self.source.order == self.target.order and len(np.unique(self.table)) == self.source.order

    def then(self, other: "GroupMap") -> "GroupMap":
        """Apply ``self`` first, then ``other``."""
        if other.source != self.target:
            raise InvalidInput("maps are not composable")
        return GroupMap(self.source, other.target, tuple(int(other.table[y]) for y in self.images))

    def inverse(self) -> "GroupMap":
        if not self.is_bijective():
            raise NotAutomorphism("map is not bijective")
        inv = np.empty(self.source.order, dtype=np.int64)
        inv[self.table] = np.arange(self.source.order)
        T = self.target
        return GroupMap(T, self.source, tuple(int(inv[T.unit(i)]) for i in range(T.rank)))

    @classmethod
    def from_table(cls, source: Group, target: Group, table) -> "GroupMap":
        table = np.asarray(table)
        gm = cls(source, target, tuple(int(table[source.unit(i)]) for i in range(source.rank)))
        if not np.array_equal(gm.table, table):
            raise NotAutomorphism("table is not a homomorphism")
        return gm

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            y == self.source.unit(i) for i, y in enumerate(self.images)
        )


def identity_map(G: Group) -> GroupMap:
    return GroupMap(G, G, tuple(G.unit(i) for i in range(G.rank)))


def multiplier_map(G: Group, m: int) -> GroupMap:
    """The power map ``g -> g^m`` (``sigma_m``); ``m = -1`` gives inversion."""
    tab = G.scale(m)
    return GroupMap(G, G, tuple(int(tab[G.unit(i)]) for i in range(G.rank)))


def _order_profile(G: Group):
    vals, counts = np.unique(G.element_orders, return_counts=True)
    return tuple(zip(vals.tolist(), counts.tolist()))


def is_isomorphic_group(G: Group, H: Group) -> bool:
    return G.order == H.order and _order_profile(G) == _order_profile(H)


def isomorphisms(G: Group, H: Group, bound: int = DEFAULT_BOUND) -> list[GroupMap]:
    """All group isomorphisms ``G -> H`` by backtracking over generator images."""
    if G.order > bound:
        raise TooLarge(f"|G|={G.order} exceeds automorphism bound {bound}")
    if not is_isomorphic_group(G, H):
        return []
    if G.rank == 0:
        return [GroupMap(G, H, ())]
    by_order = {}
    for y in range(H.order):
        by_order.setdefault(int(H.element_orders[y]), []).append(y)
    out = []
    chosen = []

    def rec(i, mask, size):
        if i == G.rank:
            out.append(GroupMap(G, H, tuple(chosen)))
            return
        n = G.factors[i]
        for y in by_order.get(n, ()):
            if mask[y]:
                continue
            nxt = _closure_mask(H, [y], start=mask)
            if int(nxt.sum()) != size * n:
                continue
            chosen.append(y)
            rec(i + 1, nxt, size * n)
            chosen.pop()

    rec(0, _closure_mask(H, []), 1)
    return out


def automorphisms(G: Group, bound: int = DEFAULT_BOUND) -> list[GroupMap]:
    return isomorphisms(G, G, bound=bound)


def orbits(maps, domain) -> list[tuple[int, ...]]:
    """Orbits of the group generated by ``maps`` on ``domain``."""
    maps = list(maps)
    domain = sorted(int(x) for x in domain)
    dom = set(domain)
    tables = [m.table for m in maps]
    seen = set()
    out = []
    for x in domain:
        if x in seen:
            continue
        orb = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for t in tables:
                z = int(t[y])
                if z not in orb:
                    if z not in dom:
                        raise InvalidInput("domain is not invariant under the maps")
                    orb.add(z)
                    stack.append(z)
        seen |= orb
        out.append(tuple(sorted(orb)))
    return out


def generated_map_group(maps, G: Group) -> list[GroupMap]:
    """All elements of the group generated by ``maps`` (closure under composition)."""
    ident = identity_map(G)
    elems = {tuple(ident.table.tolist()): ident}
    queue = deque([ident])
    maps = list(maps)
    while queue:
        f = queue.popleft()
        for g in maps:
            h = f.then(g)
            key = tuple(h.table.tolist())
            if key not in elems:
                elems[key] = h
                queue.append(h)
    return sorted(elems.values(), key=lambda m: m.images)


def direct_product(G1: Group, G2: Group) -> tuple[Group, np.ndarray, np.ndarray]:
    """``G1 x G2`` with the two coordinate injections as index arrays."""
    facs = list(G1.factors) + list(G2.factors)
    if not facs:
        return TRIVIAL, np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64)
    order = sorted(range(len(facs)), key=lambda i: -facs[i])  # stable
    G = Group(tuple(facs[i] for i in order))
    pos = {src: dst for dst, src in enumerate(order)}

    def inj(H, offset):
        out = np.empty(H.order, dtype=np.int64)
        for h in range(H.order):
            c = [0] * G.rank
            for j, v in enumerate(H.coords(h)):
                c[pos[offset + j]] = v
            out[h] = G.index(c)
        return out

    return G, inj(G1, 0), inj(G2, G1.rank)
