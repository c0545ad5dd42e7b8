"""Ways of building new S-rings from old ones."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import abelian
from .abelian import Group, GroupMap, Section, Subgroup, make_group
from .errors import (
    IncompatibleSection,
    InvalidSpec,
    NotAutomorphism,
    QuotientMismatch,
)
from .sring import SRing, is_A_set, validate_partition


def tensor(A1: SRing, A2: SRing) -> SRing:
    """``A1 (x) A2`` over ``G1 x G2``; classes are the products ``X1 x X2``."""
    G, i1, i2 = abelian.direct_product(A1.group, A2.group)
    add = G.add_table
    classes = []
    for X in A1.classes:
        xs = i1[list(X)]
        for Y in A2.classes:
            ys = i2[list(Y)]
            classes.append(add[xs][:, ys].ravel().tolist())
    return validate_partition(G, classes)


def _check_hom(src: Group, dst: Group, table: np.ndarray, what: str):
    a, b = np.meshgrid(np.arange(src.order), np.arange(src.order), indexing="ij")
    if not np.array_equal(table[src.add_table], dst.add_table[table[a], table[b]]):
        raise QuotientMismatch(f"{what} is not a homomorphism")


def _embedding(A_U: SRing, U: Subgroup, embed) -> np.ndarray:
    if embed is None:
        H, emb = U.as_group()
        if H != A_U.group:
            raise QuotientMismatch(f"A_U lives on {A_U.group.spec()}, U is {H.spec()}")
        return np.asarray(emb)
    emb = np.asarray(embed, dtype=np.int64)
    if sorted(emb.tolist()) != list(U.members):
        raise QuotientMismatch("embedding image is not U")
    _check_hom(A_U.group, U.parent, emb, "embedding")
    return emb


def _projection(A_Q: SRing, L: Subgroup, proj) -> np.ndarray:
    G = L.parent
    if proj is None:
        Q, pr = Section(abelian.whole_group(G), L).quotient()
        if Q != A_Q.group:
            raise QuotientMismatch(f"A_Q lives on {A_Q.group.spec()}, G/L is {Q.spec()}")
        return np.asarray(pr)
    pr = np.asarray(proj, dtype=np.int64)
    _check_hom(G, A_Q.group, pr, "projection")
    if sorted(np.flatnonzero(pr == 0).tolist()) != list(L.members):
        raise QuotientMismatch("projection kernel is not L")
    if len(np.unique(pr)) != A_Q.group.order:
        raise QuotientMismatch("projection is not onto")
    return pr


def s_wreath(A_U: SRing, A_Q: SRing, S: Section, embed=None, proj=None) -> SRing:
    """The S-wreath product of ``A_U`` (over ``U``) and ``A_Q`` (over ``G/L``).

    ``embed`` maps ``A_U``'s group onto ``U`` and ``proj`` maps ``G`` onto
    ``A_Q``'s group with kernel ``L``; both default to the canonical
    identifications of :meth:`Subgroup.as_group` and :meth:`Section.quotient`.
    The two S-rings must induce the same partition on ``U/L``.
    """
    U, L = S.upper, S.lower
    G = S.parent
    emb = _embedding(A_U, U, embed)
    pr = _projection(A_Q, L, proj)
    lower_in_U = np.flatnonzero(np.isin(emb, list(L.members)))
    if not is_A_set(A_U, lower_in_U.tolist()):
        raise IncompatibleSection("L is not an A_U-subgroup")
    img_U = sorted(set(pr[list(U.members)].tolist()))
    if not is_A_set(A_Q, img_U):
        raise IncompatibleSection("U/L is not an A_Q-subgroup")
    # compare the two partitions of U/L as sets of image sets
    from_U = {frozenset(pr[emb[list(X)]].tolist()) for X in A_U.classes}
    inside = set(img_U)
    from_Q = {frozenset(Y) for Y in A_Q.classes if Y[0] in inside}
    if from_U != from_Q:
        raise IncompatibleSection("the two S-rings induce different partitions on U/L")
    fibres: dict[int, list[int]] = {}
    for g, q in enumerate(pr.tolist()):
        fibres.setdefault(q, []).append(g)
    classes = [emb[list(X)].tolist() for X in A_U.classes]
    for Y in A_Q.classes:
        if Y[0] in inside:
            continue
        classes.append([g for q in Y for g in fibres[q]])
    return validate_partition(G, classes)


def wreath(A_L: SRing, A_Q: SRing, L: Subgroup, embed=None, proj=None) -> SRing:
    """``A_L wr A_Q``: the S-wreath product with ``U = L``."""
    return s_wreath(A_L, A_Q, Section(L, L), embed=embed, proj=proj)


def cyclotomic(K, G: Group) -> SRing:
    """``cyc(K, G)``: the orbit partition of the group generated by ``K``."""
    K = list(K)
    for k in K:
        if k.source != G or k.target != G or not k.is_bijective():
            raise NotAutomorphism("cyclotomic input must consist of automorphisms of G")
    return validate_partition(G, abelian.orbits(K, range(G.order)))


def cyclotomic_multipliers(G: Group, ms) -> SRing:
    """``cyc`` of the power maps ``x -> m x``."""
    return cyclotomic([abelian.multiplier_map(G, m) for m in ms], G)


# ------------------------------------------------------------- subdirect


def _key(f: GroupMap) -> tuple[int, ...]:
    return tuple(f.table.tolist())


@dataclass(frozen=True)
class SubdirectSpec:
    """Data for ``W(K, K0, M, M0, psi)``.

    ``K``, ``K0`` generate automorphism groups of ``H``; ``M``, ``M0`` of ``P``.
    ``K/K0`` must be cyclic: ``psi = (k, m)`` sends the coset ``k K0`` to
    ``m M0``.
    """

    H: Group
    P: Group
    K: tuple[GroupMap, ...]
    K0: tuple[GroupMap, ...]
    M: tuple[GroupMap, ...]
    M0: tuple[GroupMap, ...]
    psi: tuple[GroupMap, GroupMap] | None = None

    def to_json(self) -> dict:
        imgs = lambda fs: [list(f.images) for f in fs]  # noqa: E731
        return {
            "H": self.H.spec(),
            "P": self.P.spec(),
            "K": imgs(self.K),
            "K0": imgs(self.K0),
            "M": imgs(self.M),
            "M0": imgs(self.M0),
            "psi": None if self.psi is None else imgs(self.psi),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SubdirectSpec":
        H, P = make_group(obj["H"]), make_group(obj["P"])
        mk = lambda G, fs: tuple(GroupMap(G, G, tuple(f)) for f in fs)  # noqa: E731
        psi = obj.get("psi")
        return cls(
            H, P, mk(H, obj["K"]), mk(H, obj["K0"]), mk(P, obj["M"]), mk(P, obj["M0"]),
            None if psi is None else (GroupMap(H, H, tuple(psi[0])), GroupMap(P, P, tuple(psi[1]))),
        )


def _coset_index(full: list[GroupMap], sub: list[GroupMap], what: str):
    """Return ``(coset label per element key, index)`` for ``sub`` normal in ``full``."""
    fk = {_key(f): f for f in full}
    sk = {_key(s) for s in sub}
    if not sk <= set(fk):
        raise InvalidSpec(f"{what}0 is not contained in {what}")
    for f in full:
        finv = f.inverse()
        for s in sub:
            if _key(finv.then(s).then(f)) not in sk:
                raise InvalidSpec(f"{what}0 is not normal in {what}")
    label = {}
    n = 0
    for f in full:
        if _key(f) in label:
            continue
        for s in sub:
            label[_key(s.then(f))] = n
        n += 1
    return label, n


def _power(f: GroupMap, i: int, G: Group) -> GroupMap:
    out = abelian.identity_map(G)
    for _ in range(i):
        out = out.then(f)
    return out


def subdirect(spec: SubdirectSpec) -> list[GroupMap]:
    """The matching pairs ``(alpha, beta)`` acting on ``H x P``; ``|W| = |K0||M|``."""
    H, P = spec.H, spec.P
    K = abelian.generated_map_group(spec.K, H)
    K0 = abelian.generated_map_group(spec.K0, H)
    M = abelian.generated_map_group(spec.M, P)
    M0 = abelian.generated_map_group(spec.M0, P)
    lk, nk = _coset_index(K, K0, "K")
    lm, nm = _coset_index(M, M0, "M")
    if nk != nm:
        raise InvalidSpec(f"|K/K0| = {nk} differs from |M/M0| = {nm}")
    if nk == 1:
        pairs = {0: 0}
    else:
        if spec.psi is None:
            raise InvalidSpec("psi is required when K0 is proper in K")
        k, m = spec.psi
        # psi(k^i K0) = m^i M0; both generators must have order nk modulo the kernels
        pairs = {}
        for i in range(nk):
            a = lk.get(_key(_power(k, i, H)))
            b = lm.get(_key(_power(m, i, P)))
            if a is None or b is None:
                raise InvalidSpec("psi generators do not lie in K and M")
            if a in pairs:
                raise InvalidSpec("K/K0 is not cyclic on the given generator")
            pairs[a] = b
        if len(set(pairs.values())) != nk:
            raise InvalidSpec("psi is not a bijection on cosets")
    G, i1, i2 = abelian.direct_product(H, P)
    by_coset: dict[int, list[GroupMap]] = {}
    for beta in M:
        by_coset.setdefault(lm[_key(beta)], []).append(beta)
    out = []
    dec = _decompose(G, i1, i2)
    for alpha in K:
        for beta in by_coset[pairs[lk[_key(alpha)]]]:
            out.append(product_map(G, dec, alpha, beta))
    return out


def _decompose(G: Group, i1: np.ndarray, i2: np.ndarray):
    """Coordinates ``(h, p)`` of each element of ``G = H x P``."""
    h_of = np.empty(G.order, dtype=np.int64)
    p_of = np.empty(G.order, dtype=np.int64)
    s = G.add_table[i1][:, i2]
    hh, pp = np.meshgrid(np.arange(len(i1)), np.arange(len(i2)), indexing="ij")
    h_of[s.ravel()] = hh.ravel()
    p_of[s.ravel()] = pp.ravel()
    return i1, i2, h_of, p_of


def product_map(G: Group, dec, alpha: GroupMap, beta: GroupMap) -> GroupMap:
    """``(alpha, beta)`` as an automorphism of ``G = H x P``."""
    i1, i2, h_of, p_of = dec
    table = G.add_table[i1[alpha.table[h_of]], i2[beta.table[p_of]]]
    return GroupMap.from_table(G, G, table)
