"""Enumeration of all S-rings over a small abelian group, and their classification.

The search keeps a current S-ring ``W`` that is coarser than every S-ring
below it in the tree. At each node the smallest element ``g`` whose basic
set is not yet fixed is chosen, and every possible basic set ``X`` of ``g``
inside its ``W``-class is tried. By Schur's multiplier theorem ``X`` meets
each rational class in a single orbit of the multiplier group
``H = {m : X^(m) = X}``, so candidates are built from such orbits. The child
is the closure of ``W`` and ``X``; it is discarded unless ``X`` and all
previously fixed basic sets survive as classes.
"""

from __future__ import annotations

import itertools
import json
import os
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from pathlib import Path

import numpy as np

from . import abelian
from .abelian import Group, GroupMap, Section
from .errors import TooLarge, UndefinedRadical
from .sring import (
    SRing,
    _canonical,
    a_subgroups,
    radical,
    refine_sring,
    restriction,
    tau,
    validate_partition,
)

ENUM_VERSION = 1
MAX_ORDER = 63


# ------------------------------------------------------- multiplier action


@dataclass(frozen=True)
class _Multipliers:
    units: tuple[int, ...]
    tables: np.ndarray  # (len(units), n): x -> m x
    subgroups: tuple[frozenset, ...]


@lru_cache(maxsize=32)
def _multipliers(G: Group) -> _Multipliers:
    e = max(G.exponent, 1)
    units = tuple(m for m in range(1, e + 1) if gcd(m, e) == 1) if e > 1 else (1,)
    tables = np.stack([G.scale(m) for m in units]) if G.order > 1 else np.zeros((1, 1), dtype=np.int64)
    # subgroups of the unit group by closure from generating sets
    def close(gens):
        S = {1}
        frontier = [1]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = (x * g) % e or e
                if y not in S:
                    S.add(y)
                    frontier.append(y)
        return frozenset(S)

    seen = {close([])}
    queue = [close([])]
    while queue:
        S = queue.pop()
        for m in units:
            if m not in S:
                T = close(list(S) + [m])
                if T not in seen:
                    seen.add(T)
                    queue.append(T)
    subs = tuple(sorted(seen, key=lambda s: (len(s), sorted(s))))
    return _Multipliers(units, tables, subs)


def rational_class(G: Group, g: int) -> frozenset[int]:
    mu = _multipliers(G)
    return frozenset(int(x) for x in mu.tables[:, g])


# ------------------------------------------------------------ the search


@dataclass
class EnumStats:
    nodes: int = 0
    closures: int = 0
    pruned: int = 0
    leaves: int = 0


def _candidates(G: Group, W: SRing, cell: tuple[int, ...], g: int):
    """Possible basic sets containing ``g`` inside ``cell``, in lexicographic order."""
    mu = _multipliers(G)
    unit_pos = {m: i for i, m in enumerate(mu.units)}
    in_cell = np.zeros(G.order, dtype=bool)
    in_cell[list(cell)] = True
    orders = G.element_orders
    # rational classes meeting the cell
    classes: dict[frozenset, None] = {}
    for x in cell:
        classes[frozenset(int(y) for y in mu.tables[:, x])] = None
    Cg = frozenset(int(y) for y in mu.tables[:, g])
    others = [C for C in classes if C != Cg]
    out = set()

    def ker(x):
        o = int(orders[x])
        return frozenset(m for m in mu.units if (m - 1) % o == 0) if o > 1 else frozenset(mu.units)

    kg = ker(g)
    for H in mu.subgroups:
        if not kg <= H:
            continue
        rows = mu.tables[[unit_pos[m] for m in sorted(H)]]
        base = frozenset(int(y) for y in rows[:, g])
        if not in_cell[list(base)].all():
            continue
        options = []
        for C in others:
            x0 = min(C)
            if not ker(x0) <= H:
                continue
            orbs = {}
            for x in sorted(C):
                if in_cell[x]:
                    orb = frozenset(int(y) for y in rows[:, x])
                    if in_cell[list(orb)].all():
                        orbs[orb] = None
            if orbs:
                options.append([frozenset()] + list(orbs))
        for combo in itertools.product(*options):
            X = set(base)
            for part in combo:
                X |= part
            out.add(tuple(sorted(X)))
    return sorted(out)


def _all_subsets(G: Group, W: SRing, cell, g: int):
    """Every subset of ``cell`` containing ``g`` (no multiplier filter)."""
    rest = [x for x in cell if x != g]
    out = []
    for r in range(len(rest) + 1):
        for comb in itertools.combinations(rest, r):
            out.append(tuple(sorted((g,) + comb)))
    return sorted(out)


def _search(G: Group, stats: EnumStats, candidates=_candidates):
    n = G.order
    mu = _multipliers(G)
    results: list[SRing] = []

    def rec(W: SRing, final: frozenset):
        stats.nodes += 1
        if len(final) == W.rank:
            stats.leaves += 1
            results.append(W)
            return
        g = next(x for x in range(n) if W.classes[int(W.class_of[x])] not in final)
        cell = W.classes[int(W.class_of[g])]
        guard = [np.array(F) for F in final if len(F) > 1]
        for X in candidates(G, W, cell, g):
            if len(X) == len(cell):
                Wn = W
            else:
                stats.closures += 1
                Wn = refine_sring(W, [X], guard=guard + [np.array(X)])
                if Wn is None:
                    stats.pruned += 1
                    continue
            new_final = set(final)
            for row in mu.tables:
                new_final.add(tuple(sorted(int(row[x]) for x in X)))
            rec(Wn, frozenset(new_final))

    rec(tau(G), frozenset({(0,)}))
    return results


# ------------------------------------------------------------- catalogs


@dataclass
class SRingCatalog:
    group: Group
    all: list[SRing]
    orbits: list[list[tuple[SRing, GroupMap]]] = field(default_factory=list)

    @property
    def up_to_cayley(self) -> list[tuple[SRing, int]]:
        return [(orb[0][0], len(orb)) for orb in self.orbits]

    def __len__(self):
        return len(self.all)

    def __contains__(self, A: SRing) -> bool:
        return A in self._set

    @property
    def _set(self):
        s = self.__dict__.get("_set_cache")
        if s is None:
            s = self.__dict__["_set_cache"] = set(self.all)
        return s


def cache_dir() -> Path | None:
    """``$SCHURKIT_CACHE``, else ``$XDG_CACHE_HOME/schurkit``; ``off`` disables the disk cache."""
    d = os.environ.get("SCHURKIT_CACHE")
    if d is not None:
        return None if d.strip().lower() in ("", "off", "none", "0") else Path(d)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "schurkit"


def _cache_path(G: Group) -> Path | None:
    d = cache_dir()
    return None if d is None else d / f"srings-{G.spec()}-v{ENUM_VERSION}.jsonl"


def _atomic_write(path: Path, lines: list[str]):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def _sort_key(A: SRing):
    return (A.rank, A.classes)


@lru_cache(maxsize=16)
def _enumerate_cached(G: Group) -> tuple[SRing, ...]:
    path = _cache_path(G)
    if path is not None and path.exists():
        out = []
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    out.append(validate_partition(G, json.loads(line)["classes"]))
        return tuple(out)
    stats = EnumStats()
    found = sorted(_search(G, stats), key=_sort_key)
    if path is not None:
        _atomic_write(path, [A.dumps() for A in found])
    return tuple(found)


def enumerate_srings(G: Group, cap: int = MAX_ORDER, with_orbits: bool = True) -> SRingCatalog:
    """Every S-ring over ``G`` exactly once, sorted by (rank, classes)."""
    if G.order > cap:
        raise TooLarge(f"|G|={G.order} exceeds the enumeration cap {cap}")
    cat = SRingCatalog(G, list(_enumerate_cached(G)))
    if with_orbits:
        cat.orbits = dedupe_cayley(cat)
    return cat


def enumerate_with_stats(G: Group, unfiltered: bool = False) -> tuple[list[SRing], EnumStats]:
    """Uncached enumeration; ``unfiltered`` tries every subset as a basic set (slow)."""
    stats = EnumStats()
    cands = _all_subsets if unfiltered else _candidates
    return sorted(_search(G, stats, cands), key=_sort_key), stats


def dedupe_cayley(cat: SRingCatalog) -> list[list[tuple[SRing, GroupMap]]]:
    """Orbits of ``Aut(G)`` on the catalog; each orbit lists ``(member, sigma)``
    with ``sigma`` carrying the first member (the representative) onto ``member``."""
    G = cat.group
    auts = abelian.automorphisms(G, bound=10**6)
    index = {A.classes: A for A in cat.all}
    seen = set()
    orbits = []
    for A in cat.all:
        if A.classes in seen:
            continue
        seen.add(A.classes)
        orbit = [(A, abelian.identity_map(G))]
        for s in auts:
            t = s.table
            key = _canonical([t[list(X)].tolist() for X in A.classes])
            if key in seen:
                continue
            if key not in index:
                raise AssertionError("catalog is not closed under Aut(G)")
            seen.add(key)
            orbit.append((index[key], s))
        orbits.append(orbit)
    return orbits


@lru_cache(maxsize=8)
def _orbits_of_order(n: int):
    out = []
    for G in abelian.abelian_groups_of_order(n):
        cat = enumerate_srings(G)
        out.extend(cat.orbits)
    return tuple(tuple(o) for o in out)


def cayley_orbits_of_order(n: int, rank: int | None = None):
    """``[(rep, [(member, sigma), ...]), ...]`` over every abelian group of order ``n``."""
    res = []
    for orb in _orbits_of_order(n):
        rep = orb[0][0]
        if rank is None or rep.rank == rank:
            res.append((rep, list(orb)))
    return res


# --------------------------------------------------------------- oracle


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def brute_force_srings(G: Group, cap: int = 10) -> list[SRing]:
    """Test every partition of ``G#`` against the three axioms (Bell-number scale)."""
    from .errors import SRingAxiomError

    if G.order > cap:
        raise TooLarge(f"brute force is limited to |G| <= {cap}")
    out = []
    for part in _set_partitions(list(range(1, G.order))):
        try:
            out.append(validate_partition(G, [[0]] + part))
        except SRingAxiomError:
            pass
    return sorted(out, key=_sort_key)


def cyclotomic_catalog(G: Group) -> list[SRing]:
    """``cyc(K, G)`` for every subgroup ``K`` of ``Aut(G)`` (duplicates removed)."""
    from .products import cyclotomic

    auts = abelian.automorphisms(G, bound=10**6)
    # subgroups of Aut(G) via closure of generating sets, enough for cyclic Aut
    seen = {}
    groups = {frozenset([tuple(abelian.identity_map(G).table.tolist())])}
    frontier = list(groups)
    by_key = {tuple(a.table.tolist()): a for a in auts}
    while frontier:
        S = frontier.pop()
        for a in auts:
            k = tuple(a.table.tolist())
            if k in S:
                continue
            gens = [by_key[s] for s in S] + [a]
            T = frozenset(tuple(m.table.tolist()) for m in abelian.generated_map_group(gens, G))
            if T not in groups:
                groups.add(T)
                frontier.append(T)
    for S in groups:
        A = cyclotomic([by_key[s] for s in S], G)
        seen[A.classes] = A
    return sorted(seen.values(), key=_sort_key)


# -------------------------------------------------------- classification


def radical_of_sring(A: SRing) -> abelian.Subgroup:
    """``rad(A)`` from the basic sets containing an element of maximal order.

    For a cyclic group these all have the same radical (checked); otherwise
    the radicals are joined.
    """
    G = A.group
    if G.order == 1:
        return abelian.trivial_subgroup(G)
    target = G.exponent
    rads = []
    for X in A.classes:
        if (G.element_orders[list(X)] == target).any():
            rads.append(radical(A, X))
    if not rads:
        raise UndefinedRadical("no basic set contains an element of maximal order")
    if G.rank == 1:
        if len({R.members for R in rads}) != 1:
            raise AssertionError("radicals of generating basic sets differ")
        return rads[0]
    gens = [x for R in rads for x in R.members]
    return abelian.subgroup_generated(G, gens)


def is_cyclotomic(A: SRing) -> bool:
    """The partition equals the orbits of the group automorphisms fixing every class."""
    G = A.group
    K = []
    for s in abelian.automorphisms(G, bound=10**6):
        if np.array_equal(A.class_of[s.table], A.class_of):
            K.append(s)
    orbs = abelian.orbits(K, range(G.order)) if K else [(x,) for x in range(G.order)]
    return frozenset(frozenset(o) for o in orbs) == A.partition


def tensor_decompositions(A: SRing) -> list[tuple[abelian.Subgroup, abelian.Subgroup]]:
    """Pairs of nontrivial proper A-subgroups ``(G1, G2)`` with ``A = A_G1 (x) A_G2``."""
    G = A.group
    subs = [H for H in a_subgroups(A) if 1 < H.order < G.order]
    out = []
    for G1, G2 in itertools.combinations(subs, 2):
        if G1.order * G2.order != G.order or len(G1.member_set & G2.member_set) != 1:
            continue
        in1 = [X for X in A.classes if X[0] in G1.member_set]
        in2 = [X for X in A.classes if X[0] in G2.member_set]
        if len(in1) * len(in2) != A.rank:
            continue
        add = G.add_table
        prod = {frozenset(add[np.ix_(list(X), list(Y))].ravel().tolist()) for X in in1 for Y in in2}
        if prod == A.partition:
            out.append((G1, G2))
    return out


def s_wreath_sections(A: SRing, nontrivial: bool = True) -> list[Section]:
    """A-sections ``U/L`` such that every class outside ``U`` is a union of ``L``-cosets."""
    G = A.group
    subs = a_subgroups(A)
    out = []
    for L in subs:
        if nontrivial and L.order == 1:
            continue
        # classes whose radical contains L
        good = np.zeros(A.rank, dtype=bool)
        for i, X in enumerate(A.classes):
            good[i] = L.member_set <= radical(A, X).member_set
        for U in subs:
            if not L.member_set <= U.member_set:
                continue
            if nontrivial and U.order == G.order:
                continue
            outside = [i for i, X in enumerate(A.classes) if X[0] not in U.member_set]
            if all(good[i] for i in outside):
                out.append(Section(U, L))
    return out


@dataclass
class ClassificationTag:
    sring: SRing
    tags: set[str] = field(default_factory=set)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"group": self.sring.group.spec(), "rank": self.sring.rank,
                "tags": sorted(self.tags), "details": self.details}


def _order_9p(G: Group):
    n = G.order
    if n % 9 == 0:
        p = n // 9
        if p >= 5 and all(p % d for d in range(2, int(p**0.5) + 1)):
            return p
    return None


@lru_cache(maxsize=8)
def _family_catalog(G: Group, p: int):
    from .constructions import build_A_iM, build_A_star, well_defined_orders

    stars = {}
    for H in ("C", "E"):
        for i in (1, 2, 3):
            stars[(f"A{i}*", H)] = build_A_star(i, H, p)
    table = {}
    if G.factors[1:] == (3, 3):
        for i in range(1, 12):
            for k in well_defined_orders(i, p):
                table[(f"A{i}", k)] = build_A_iM(i, p, k)
    return stars, table


def classify(A: SRing, mode: str | None = None, budget=None) -> ClassificationTag:
    """Tag ``A`` with the statements it satisfies.

    Modes: ``"9p"`` (order ``9p``, ``p >= 5``), ``"p2"`` (order 18) and
    ``"circ"`` (cyclic groups); chosen from the group when omitted.
    """
    from .iso import (
        aut_restriction_matches,
        cayley_isomorphic,
        combinatorially_isomorphic,
        is_normal_sring,
    )

    G = A.group
    if mode is None:
        if _order_9p(G):
            mode = "9p"
        elif G.order == 18:
            mode = "p2"
        elif G.rank <= 1:
            mode = "circ"
        else:
            mode = "generic"
    tag = ClassificationTag(A, details={"mode": mode})
    if A.rank == 2:
        tag.tags.add("rank2")
    dec = tensor_decompositions(A)
    if dec:
        tag.tags.add("tensor-decomposable")
        tag.details["tensor"] = [[G1.order, G2.order] for G1, G2 in dec]
    secs = s_wreath_sections(A)
    if secs:
        info = []
        any_aut = False
        small = False
        for S in secs:
            size = S.upper.order // S.lower.order
            entry = {"U": S.upper.order, "L": S.lower.order, "S": size}
            if mode in ("9p", "circ", "generic"):
                ok = aut_restriction_matches(A, S, budget=budget)
                entry["aut_condition"] = ok
                any_aut |= ok
            small |= size <= 3
            info.append(entry)
        tag.tags.add("s-wreath")
        tag.details["s_wreath"] = info
        if any_aut:
            tag.tags.add("s-wreath-aut")
        if small:
            tag.tags.add("s-wreath-small")
    if mode == "9p":
        p = _order_9p(G)
        stars, table = _family_catalog(G, p)
        for (name, H), B in stars.items():
            if sorted(B.sizes) != sorted(A.sizes):
                continue
            same_group = B.group == G
            if (same_group and cayley_isomorphic(A, B)) or combinatorially_isomorphic(A, B, budget=budget) is not None:
                tag.tags.add("family-A_i*")
                tag.details.setdefault("family", []).append(f"{name}/{H}")
        rad = radical_of_sring(A)
        tag.details["radical_order"] = rad.order
        if G.factors[1:] != (3, 3):
            if rad.order == 1 and is_cyclotomic(A) and is_normal_sring(A, budget=budget):
                tag.tags.add("normal-cyclotomic-trivial-radical")
        elif rad.order == 1:
            for (name, k), B in table.items():
                if sorted(B.sizes) == sorted(A.sizes) and cayley_isomorphic(A, B):
                    tag.tags.add("cyclotomic-table1")
                    tag.details.setdefault("table1", []).append(f"{name}(k={k})")
    elif mode == "circ":
        rad = radical_of_sring(A)
        tag.details["radical_order"] = rad.order
        if rad.order == 1 and is_cyclotomic(A) and is_normal_sring(A, budget=budget):
            tag.tags.add("normal-cyclotomic-trivial-radical")
    return tag


def lemma_statements(tag: ClassificationTag) -> list[int]:
    """Numbers of the statements (of the 9p list, the p=2 list or the cyclic list) that hold."""
    mode = tag.details.get("mode")
    t = tag.tags
    out = []
    if "rank2" in t:
        out.append(1)
    if "tensor-decomposable" in t:
        out.append(2)
    if mode == "p2":
        if "s-wreath-small" in t:
            out.append(3)
        return out
    if mode == "circ":
        if "s-wreath" in t:
            out.append(3)
        if "normal-cyclotomic-trivial-radical" in t:
            out.append(4)
        return out
    if "s-wreath-aut" in t:
        out.append(3)
    if "family-A_i*" in t:
        out.append(4)
    if "normal-cyclotomic-trivial-radical" in t:
        out.append(5)
    if "cyclotomic-table1" in t:
        out.append(6)
    return out


def restriction_to(A: SRing, H: abelian.Subgroup) -> SRing:
    return restriction(A, H)
