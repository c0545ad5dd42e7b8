"""The named S-ring families over groups of order 3p and 9p.

Element naming: over ``E9 x Cp`` (factors ``[p, 3, 3]``) ``z``, ``a``, ``b``
are the three unit vectors in that order; over ``C9 x Cp`` ``c`` generates
the 9-factor and ``z`` the p-factor, wherever the descending sort puts them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sympy import isprime, primitive_root

from . import abelian
from .abelian import Group, GroupMap, Section, make_group
from .errors import InvalidInput, NoWitnessFound, NotWellDefined, OutOfRange
from .products import (
    SubdirectSpec,
    cyclotomic,
    cyclotomic_multipliers,
    s_wreath,
    subdirect,
    tensor,
)
from .sring import SRing, group_ring, is_A_set, tau, wielandt_closure

# Family table: automorphisms of E9 = <a> x <b> given by the images of (a, b);
# an image a^i b^j is written (i, j).
_ID = ((1, 0), (0, 1))
_INV = ((2, 0), (0, 2))


@dataclass(frozen=True)
class Table1Line:
    line_no: int
    K_gens: tuple
    K0_gens: tuple
    index: int
    K_name: str


TABLE1: tuple[Table1Line, ...] = (
    Table1Line(1, (_INV,), (_ID,), 2, "C2"),
    Table1Line(2, (((2, 0), (0, 1)), ((1, 0), (0, 2))), (_INV,), 2, "E4"),
    Table1Line(3, (((1, 0), (1, 1)),), (_ID,), 3, "C3"),
    Table1Line(4, (((2, 0), (1, 2)),), (_INV,), 3, "C6"),
    Table1Line(5, (((2, 0), (1, 2)),), (_ID,), 6, "C6"),
    Table1Line(6, (((0, 2), (1, 0)), ((0, 1), (1, 0))), (_INV, ((2, 0), (0, 1))), 2, "D8"),
    Table1Line(7, (((0, 2), (1, 0)),), (_INV,), 2, "C4"),
    Table1Line(8, (((0, 2), (1, 0)),), (_ID,), 4, "C4"),
    Table1Line(9, (((1, 1), (2, 1)),), (((0, 2), (1, 0)),), 2, "C8"),
    Table1Line(10, (((1, 1), (2, 1)),), (_INV,), 4, "C8"),
    Table1Line(11, (((1, 1), (2, 1)),), (_ID,), 8, "C8"),
)

E9 = Group((3, 3))


def _e9_map(images) -> GroupMap:
    return GroupMap(E9, E9, tuple(E9.index(c) for c in images))


@lru_cache(maxsize=None)
def table1_groups(i: int) -> tuple[list[GroupMap], list[GroupMap], list[GroupMap], list[GroupMap]]:
    """``(K generators, K0 generators, K, K0)`` for line ``i``; checks the index column."""
    line = TABLE1[i - 1]
    kg = [_e9_map(g) for g in line.K_gens]
    k0g = [_e9_map(g) for g in line.K0_gens]
    K = abelian.generated_map_group(kg, E9)
    K0 = abelian.generated_map_group(k0g, E9)
    if len(K) % len(K0) or len(K) // len(K0) != line.index:
        raise InvalidInput(f"family line {i}: computed index {len(K) / len(K0)} != {line.index}")
    return kg, k0g, K, K0


# ------------------------------------------------------------ helpers


def _check_prime(p: int):
    if p < 5 or not isprime(p):
        raise OutOfRange(f"p must be a prime >= 5, got {p}")


def _is_square_mod(m: int, p: int) -> bool:
    return pow(m % p, (p - 1) // 2, p) == 1


def w0_multipliers(p: int) -> list[int]:
    """Units ``m`` of ``Z/3p`` acting as ``-1`` on ``C3`` exactly when non-square mod ``p``."""
    return [m for m in range(1, 3 * p) if np.gcd(m, 3 * p) == 1 and (m % 3 == 2) == (not _is_square_mod(m, p))]


def w0_spec(p: int) -> SubdirectSpec:
    """``W0`` as a subdirect product of ``Aut(C3)`` and ``Aut(Cp)``."""
    C3, Cp = Group((3,)), Group((p,))
    g = primitive_root(p)
    inv3 = abelian.multiplier_map(C3, -1)
    return SubdirectSpec(
        H=C3, P=Cp,
        K=(inv3,), K0=(),
        M=(abelian.multiplier_map(Cp, g),), M0=(abelian.multiplier_map(Cp, g * g),),
        psi=(inv3, abelian.multiplier_map(Cp, g)),
    )


def named_elements(G: Group) -> dict[str, int]:
    """``z`` and either ``a, b`` (``E9 x Cp``) or ``c, c0`` (``C9 x Cp``)."""
    fac = list(G.factors)
    out = {}
    if len(fac) == 2 and 9 in fac:
        ic = fac.index(9)
        ip = 1 - ic
        out["c"] = G.unit(ic)
        out["c0"] = G.scale(3)[G.unit(ic)].item()
        out["z"] = G.unit(ip)
    elif len(fac) == 3 and fac[1:] == [3, 3]:
        out["z"], out["a"], out["b"] = G.unit(0), G.unit(1), G.unit(2)
    else:
        raise InvalidInput(f"{G.spec()} is not E9 x Cp or C9 x Cp")
    return {k: int(v) for k, v in out.items()}


def group_9p(H: str, p: int) -> Group:
    if H == "E":
        return make_group([p, 3, 3])
    if H == "C":
        return make_group([9, p])
    raise InvalidInput(f"H must be 'C' or 'E', got {H!r}")


def half_orbits(p: int) -> tuple[list[int], list[int]]:
    """``P1, P2``: squares and non-squares of ``Z/p`` (orbits of the index-2 subgroup of ``Aut(P)``)."""
    sq = [t for t in range(1, p) if _is_square_mod(t, p)]
    return sq, [t for t in range(1, p) if t not in sq]


# -------------------------------------------------------------- families


def build_A0(p: int) -> SRing:
    """``cyc(W0, C_3p)`` on the cyclic group ``Z/3p``."""
    _check_prime(p)
    return cyclotomic_multipliers(Group((3 * p,)), w0_multipliers(p))


def a0_on_3p(p: int) -> SRing:
    """``A0`` on ``C_p x C_3`` (factors ``[p, 3]``)."""
    return cyclotomic_multipliers(Group((p, 3)), w0_multipliers(p))


def build_A_star(i: int, H: str, p: int) -> SRing:
    """``A_i* = A0 wr_{C3p/C3} T`` with top ``T`` = ``ZC3 (x) tau(Cp)``, ``tau (x) tau`` or ``A0``."""
    if i not in (1, 2, 3):
        raise InvalidInput(f"A_i* is defined for i in 1..3, got {i}")
    _check_prime(p)
    G = group_9p(H, p)
    nm = named_elements(G)
    z = nm["z"]
    if H == "E":
        low, top3 = nm["a"], nm["b"]
    else:
        low, top3 = nm["c0"], nm["c"]
    Q = Group((p, 3))
    # U = <low> x P, embedded from Q-coordinates (t, s) -> t z + s low
    sc = G.scale
    embed = np.array([G.add_table[sc(t)[z], sc(s)[low]] for t in range(p) for s in range(3)])
    L = abelian.subgroup_generated(G, [low])
    U = abelian.subgroup_generated(G, [low, z])
    # G -> Q with kernel L: z -> (1, 0), top3 -> (0, 1)
    zq, bq = Q.unit(0), Q.unit(1)
    proj = np.empty(G.order, dtype=np.int64)
    order_top = 3 if H == "E" else 9
    for t in range(p):
        for s in range(order_top):
            for l in range(3):
                g = G.add_table[G.add_table[sc(t)[z], sc(s)[top3]], sc(l)[low]]
                proj[g] = Q.add_table[Q.scale(t)[zq], Q.scale(s)[bq]]
    if i == 1:
        top = tensor(group_ring(Group((3,))), tau(Group((p,))))
    elif i == 2:
        top = tensor(tau(Group((3,))), tau(Group((p,))))
    else:
        top = a0_on_3p(p)
    return s_wreath(a0_on_3p(p), top, Section(U, L), embed=embed, proj=proj)


def _m_generator(p: int, k: int) -> int:
    return pow(int(primitive_root(p)), (p - 1) // k, p)


def subdirect_spec_for(i: int, p: int, k: int) -> SubdirectSpec:
    """The pinned ``W(K, K0, M, M0, psi0)`` for line ``i`` and ``|M| = k``."""
    _check_prime(p)
    if (p - 1) % k:
        raise OutOfRange(f"|M|={k} does not divide p-1={p - 1}")
    kg, k0g, K, K0 = table1_groups(i)
    d = TABLE1[i - 1].index
    if k % d:
        raise NotWellDefined(f"A_{i}(M) needs |M| divisible by {d}, got {k}")
    k0keys = {tuple(f.table.tolist()) for f in K0}
    kappa = next(g for g in kg if tuple(g.table.tolist()) not in k0keys) if d > 1 else kg[0]
    P = Group((p,))
    mu = _m_generator(p, k)
    return SubdirectSpec(
        H=E9, P=P,
        K=tuple(kg), K0=tuple(k0g),
        M=(abelian.multiplier_map(P, mu),),
        M0=(abelian.multiplier_map(P, pow(mu, d, p)),),
        psi=(kappa, abelian.multiplier_map(P, mu)),
    )


def build_A_iM(i: int, p: int, M_order: int) -> SRing:
    """``A_i(M) = cyc(W(K, K0, M, M0, psi0), E9 x Cp)`` with ``|M| = M_order``."""
    if not 1 <= i <= 11:
        raise InvalidInput(f"family lines are 1..11, got {i}")
    W = subdirect(subdirect_spec_for(i, p, M_order))
    return cyclotomic(W, W[0].source)


def well_defined_orders(i: int, p: int) -> list[int]:
    d = TABLE1[i - 1].index
    return [k for k in range(1, p) if (p - 1) % k == 0 and k % d == 0]


# ------------------------------------------------ signature table

TABLE2 = {
    "A1*": lambda p, k: {2, 3, p - 1, 3 * (p - 1)},
    "A2*": lambda p, k: {2, 6, p - 1, 6 * (p - 1)},
    "A3*": lambda p, k: {2, 6, p - 1, 3 * (p - 1)},
    "A1": lambda p, k: {2, k},
    "A2": lambda p, k: {2, 4, 2 * k},
    "A3": lambda p, k: {1, 3, k},
    "A4": lambda p, k: {2, 6, 2 * k},
    "A5": lambda p, k: {2, 6, k},
    "A6": lambda p, k: {4, 2 * k, 4 * k},
    "A7": lambda p, k: {4, 2 * k},
    "A8": lambda p, k: {4, k},
    "A9": lambda p, k: {8, 4 * k},
    "A10": lambda p, k: {8, 2 * k},
    "A11": lambda p, k: {8, k},
}

FAMILY_NAMES = ("A0", "A1*", "A2*", "A3*") + tuple(f"A{i}" for i in range(1, 12))


@dataclass(frozen=True)
class FamilyInstance:
    family: str
    p: int
    H: str = "E"
    M_order: int | None = None
    sring: SRing = field(default=None, compare=False, repr=False)

    def describe(self) -> dict:
        return {"family": self.family, "p": self.p, "H": self.H, "M_order": self.M_order}


def build_family(family: str, p: int, H: str = "E", M_order: int | None = None) -> FamilyInstance:
    if family == "A0":
        return FamilyInstance("A0", p, "-", None, build_A0(p))
    if family in ("A1*", "A2*", "A3*"):
        return FamilyInstance(family, p, H, None, build_A_star(int(family[1]), H, p))
    if family.startswith("A") and family[1:].isdigit() and 1 <= int(family[1:]) <= 11:
        if M_order is None:
            raise InvalidInput(f"{family} needs M_order")
        if H != "E":
            raise InvalidInput("A_i(M) lives over E9 x Cp only")
        return FamilyInstance(family, p, "E", M_order, build_A_iM(int(family[1:]), p, M_order))
    raise InvalidInput(f"unknown family {family!r}")


def p_subgroup(G: Group) -> abelian.Subgroup:
    """The unique subgroup of order ``p`` (the largest prime dividing ``|G|``)."""
    p = max(abelian._factorint(G.order))
    return abelian.subgroup_from_mask(G, np.isin(G.element_orders, [1, p]))


def table2_check(inst: FamilyInstance) -> bool:
    """``N(A) = row(p, k) | N(A_P)``, reading the table column as a plain set."""
    A = inst.sring
    if inst.family not in TABLE2:
        raise InvalidInput(f"no signature row for {inst.family}")
    P = p_subgroup(A.group)
    if not is_A_set(A, P.members):
        return False
    nap = {len(X) for X in A.classes[1:] if X[0] in P}
    k = inst.M_order if inst.M_order is not None else inst.p - 1
    return set(A.size_profile()) == TABLE2[inst.family](inst.p, k) | nap


# ----------------------------------------------------- conditions (C1)-(C5)


def _prime_order_elements(G: Group) -> list[int]:
    primes = set(abelian._factorint(G.order))
    return [g for g in range(1, G.order) if int(G.element_orders[g]) in primes]


def radical_free(G: Group, X) -> bool:
    """(C4): no nonempty subset of ``X`` has a nontrivial radical.

    A subset with ``g`` in its radical is a union of ``<g>``-cosets, so it is
    enough to look for a full coset of a prime-order subgroup inside ``X``.
    """
    X = sorted(set(int(x) for x in X))
    inX = np.zeros(G.order, dtype=bool)
    inX[X] = True
    for h in _prime_order_elements(G):
        H = abelian.subgroup_generated(G, [h]).members
        if inX[G.add_table[np.array(X)][:, list(H)]].all(axis=1).any():
            return False
    return True


def radical_free_brute(G: Group, X) -> bool:
    """Oracle for :func:`radical_free`: scan every nonempty subset as a bitmask."""
    X = sorted(set(int(x) for x in X))
    n = len(X)
    if n > 22:
        raise InvalidInput("brute-force radical check is limited to 22 elements")
    pos = {x: j for j, x in enumerate(X)}
    masks = np.arange(1, 1 << n, dtype=np.int64)
    for g in range(1, G.order):
        img = np.zeros_like(masks)
        outside = np.zeros_like(masks, dtype=bool)
        for j, x in enumerate(X):
            has = (masks >> j) & 1
            y = int(G.add_table[x, g])
            if y in pos:
                img |= has << pos[y]
            else:
                outside |= has.astype(bool)
        if ((img == masks) & ~outside).any():
            return False
    return True


@lru_cache(maxsize=16)
def _direct_decompositions(G: Group):
    subs = abelian.all_subgroups(G)
    out = []
    for U in subs:
        for V in subs:
            if 1 < U.order and 1 < V.order and U.order * V.order == G.order:
                if len(U.member_set & V.member_set) == 1:
                    out.append((U, V))
    return tuple(out)


def _is_product_set(G: Group, X, U, V) -> bool:
    # coordinates of each element in U x V
    uu, vv = np.meshgrid(U.members, V.members, indexing="ij")
    s = G.add_table[uu, vv].ravel()
    u_of = np.empty(G.order, dtype=np.int64)
    v_of = np.empty(G.order, dtype=np.int64)
    u_of[s] = uu.ravel()
    v_of[s] = vv.ravel()
    X = list(X)
    return len(set(u_of[X].tolist())) * len(set(v_of[X].tolist())) == len(X)


def check_conditions(A: SRing, X) -> dict[str, bool]:
    """Check (C1)-(C4) for the set ``X``."""
    G = A.group
    X = sorted(set(int(x) for x in X))
    c1 = abelian.subgroup_generated(G, X).order == G.order
    c2 = X != list(range(1, G.order))
    c3 = not any(_is_product_set(G, X, U, V) for U, V in _direct_decompositions(G))
    c4 = radical_free(G, X)
    return {"C1": c1, "C2": c2, "C3": c3, "C4": c4}


def printed_witness(i: int, p: int, M_order: int) -> list[int]:
    """``X0 | X1 | X2`` as displayed for lines 1 and 7."""
    if i not in (1, 7):
        raise InvalidInput("the displayed witness exists for lines 1 and 7 only")
    G = make_group([p, 3, 3])
    nm = named_elements(G)
    a, b, z = nm["a"], nm["b"], nm["z"]
    mu = _m_generator(p, M_order)
    Z1 = sorted({pow(mu, 2 * j, p) for j in range(M_order)})
    Z2 = sorted({pow(mu, 2 * j + 1, p) for j in range(M_order)})
    sc = G.scale
    add = G.add_table

    def el(i_a, i_b):
        return int(add[sc(i_a)[a], sc(i_b)[b]])

    def times(hs, Zs):
        return {int(add[h, sc(t)[z]]) for h in hs for t in Zs}

    if i == 1:
        X0 = {el(1, 0), el(2, 0)}
        X1 = times([el(1, 0)], Z1) | times([el(2, 0)], Z2)
        X2 = times([el(0, 1)], Z1) | times([el(0, 2)], Z2)
    else:
        X0 = {el(1, 0), el(2, 0), el(0, 1), el(0, 2)}
        X1 = times([el(1, 0), el(2, 0)], Z1) | times([el(0, 1), el(0, 2)], Z2)
        X2 = times([el(1, 1), el(2, 2)], Z1) | times([el(2, 1), el(1, 2)], Z2)
    return [sorted(X0), sorted(X1), sorted(X2)]


def witness_set(inst: FamilyInstance) -> list[int]:
    """An A-set satisfying (C1)-(C4) that generates ``A_i(M)``."""
    if not inst.family[1:].isdigit():
        raise InvalidInput("witness sets are defined for A_i(M) only")
    i = int(inst.family[1:])
    A = inst.sring
    if i in (1, 7):
        parts = printed_witness(i, inst.p, inst.M_order)
        for part in parts:
            A.class_index(part)  # each part is a basic set
        X = sorted(set().union(*parts))
        if not all(check_conditions(A, X).values()):
            raise NoWitnessFound(f"displayed witness for line {i} fails (C1)-(C4)")
        return X
    for X in A.classes[1:]:
        if all(check_conditions(A, X).values()) and wielandt_closure(A.group, [X]) == A:
            return list(X)
    raise NoWitnessFound(f"no basic set of A_{i}(M) satisfies (C1)-(C4) and generates A")


def union_witness(A: SRing, max_parts: int = 3) -> list[int] | None:
    """Smallest union of at most ``max_parts`` basic sets satisfying (C1)-(C4) and generating ``A``.

    Not a substitute for :func:`witness_set`, which asks for a single basic set.
    """
    G = A.group
    for r in range(1, max_parts + 1):
        for parts in itertools.combinations(A.classes[1:], r):
            X = sorted(set().union(*parts))
            if all(check_conditions(A, X).values()) and wielandt_closure(G, [X]) == A:
                return X
    return None


def rationally_conjugate(G: Group, X, Y) -> bool:
    X, Y = frozenset(X), frozenset(Y)
    for m in abelian.units(G):
        if abelian.power_set(G, X, m) == Y:
            return True
    return False


def conj_pairs(A: SRing):
    """Pairs of generating basic sets of equal size; yields ``(X, Y, conjugate?)``."""
    G = A.group
    gen = [X for X in A.classes if abelian.subgroup_generated(G, X).order == G.order]
    for X, Y in itertools.combinations(gen, 2):
        if len(X) == len(Y):
            yield X, Y, rationally_conjugate(G, X, Y)
