"""S-rings over finite abelian groups.

An S-ring is stored by its basic sets. Class 0 is always ``{e}``. The
remaining classes are ordered by (size, smallest element), so two equal
S-rings have identical class tuples and compare equal directly.
"""

from __future__ import annotations

import json
from functools import cached_property

import numpy as np

from . import abelian
from .abelian import Group, Section, Subgroup, make_group
from .errors import (
    InternalInvariantFailure,
    InvalidInput,
    InvalidMultiplier,
    MissingIdentityClass,
    NotASection,
    NotInverseClosed,
    NotMultiplicativelyClosed,
)


def _product_tensor(G: Group, class_of: np.ndarray, classes, rows=None) -> np.ndarray:
    """``T[z, i, j] = #{(x, y) in X_i x X_j : x + y = z}`` for every ``z`` in ``rows``."""
    r = len(classes)
    sub = G.sub_table if rows is None else G.sub_table[rows]
    m = sub.shape[0]
    base = np.arange(m)[:, None] * r
    T = np.empty((m, r, r), dtype=np.int64)
    for i, X in enumerate(classes):
        idx = base + class_of[sub[:, X]]
        T[:, i, :] = np.bincount(idx.ravel(), minlength=m * r).reshape(m, r)
    return T


def _classes_from_labels(labels: np.ndarray) -> list[list[int]]:
    order = np.argsort(labels, kind="stable")
    lab = labels[order]
    cuts = np.flatnonzero(np.diff(lab)) + 1
    return [g.tolist() for g in np.split(order, cuts)]


def _canonical(classes) -> tuple[tuple[int, ...], ...]:
    cl = [tuple(sorted(int(x) for x in X)) for X in classes]
    ident = [X for X in cl if X == (0,)]
    rest = sorted((X for X in cl if X != (0,)), key=lambda X: (len(X), X[0]))
    return tuple(ident + rest)


class SRing:
    """A validated S-ring. Build one with :func:`validate_partition`."""

    __slots__ = ("group", "classes", "class_of", "constants", "__dict__")

    def __init__(self, group: Group, classes, class_of, constants):
        self.group = group
        self.classes = classes
        self.class_of = class_of
        self.constants = constants

    # -- identity
    def __eq__(self, other):
        return isinstance(other, SRing) and self.group == other.group and self.classes == other.classes

    def __hash__(self):
        return hash((self.group, self.classes))

    def __repr__(self):
        return f"SRing({self.group.spec()}, rank={self.rank}, sizes={list(self.sizes)})"

    # -- basic data
    @property
    def rank(self) -> int:
        return len(self.classes)

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(X) for X in self.classes)

    @cached_property
    def class_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(X) for X in self.classes)

    @cached_property
    def partition(self) -> frozenset:
        return frozenset(self.class_sets)

    @cached_property
    def inverse(self) -> np.ndarray:
        """``inverse[i]`` is the index of the class ``X_i^{-1}``."""
        neg = self.group.neg
        return np.array([self.class_of[neg[X[0]]] for X in self.classes], dtype=np.int64)

    def size_profile(self) -> frozenset[int]:
        return frozenset(len(X) for X in self.classes[1:])

    def structure_constant(self, X: int, Y: int, Z: int) -> int:
        return int(self.constants[X, Y, Z])

    def constant_triples(self) -> list[list[int]]:
        X, Y, Z = np.nonzero(self.constants)
        return [[int(a), int(b), int(c), int(self.constants[a, b, c])] for a, b, c in zip(X, Y, Z)]

    def class_index(self, X) -> int:
        """Index of the basic set equal to ``X`` (raises if ``X`` is not basic)."""
        X = frozenset(int(x) for x in X)
        i = int(self.class_of[next(iter(X))])
        if self.class_sets[i] != X:
            raise InvalidInput("set is not a basic set")
        return i

    def to_json(self) -> dict:
        return {"group": self.group.spec(), "classes": [list(X) for X in self.classes]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def _build(G: Group, classes, T_full=None) -> SRing:
    """Canonicalize ``classes``; ``T_full`` (if given) is indexed in the input class order."""
    old = list(classes)
    classes = _canonical(old)
    class_of = np.empty(G.order, dtype=np.int64)
    for i, X in enumerate(classes):
        class_of[list(X)] = i
    reps = np.array([X[0] for X in classes])
    if T_full is None:
        Trep = _product_tensor(G, class_of, [list(X) for X in classes], rows=reps)
    else:
        new_to_old = np.argsort(class_of[[min(X) for X in old]])
        Trep = T_full[reps][:, new_to_old][:, :, new_to_old]
    constants = np.ascontiguousarray(np.transpose(Trep, (1, 2, 0)))
    return SRing(G, classes, class_of, constants)


def validate_partition(G: Group, classes) -> SRing:
    """Check the S-ring axioms for ``classes`` and return the S-ring.

    Raises :class:`MissingIdentityClass`, :class:`NotInverseClosed` or
    :class:`NotMultiplicativelyClosed`; the ``classes`` attribute of the
    exception holds indices into the submitted list.
    """
    classes = [sorted(int(x) for x in X) for X in classes]
    n = G.order
    class_of = np.full(n, -1, dtype=np.int64)
    for i, X in enumerate(classes):
        if not X:
            raise InvalidInput(f"class {i} is empty")
        if any(x < 0 or x >= n for x in X):
            raise InvalidInput(f"class {i} has elements outside the group")
        if (class_of[X] >= 0).any():
            raise InvalidInput(f"class {i} overlaps an earlier class")
        class_of[X] = i
    if (class_of < 0).any():
        raise InvalidInput("classes do not cover the group")
    ci = int(class_of[0])
    if classes[ci] != [0]:
        raise MissingIdentityClass("{e} is not a basic set", classes=(ci,))
    neg = G.neg
    for i, X in enumerate(classes):
        j = int(class_of[neg[X[0]]])
        if sorted(int(neg[x]) for x in X) != classes[j]:
            raise NotInverseClosed(f"inverse of class {i} is not a class", classes=(i, j))
    T = _product_tensor(G, class_of, classes)
    for k, Z in enumerate(classes):
        block = T[Z]
        bad = np.argwhere((block != block[0]).any(axis=0))
        if len(bad):
            i, j = (int(v) for v in bad[0])
            raise NotMultiplicativelyClosed(
                f"product of classes {i} and {j} is not constant on class {k}", classes=(i, j, k)
            )
    return _build(G, classes, T_full=T)


def sring_from_json(obj) -> SRing:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return validate_partition(make_group(obj["group"]), obj["classes"])


def group_ring(G: Group) -> SRing:
    """``ZG``: all classes are singletons."""
    return validate_partition(G, [[x] for x in range(G.order)])


def tau(G: Group) -> SRing:
    """The rank-2 S-ring (rank 1 over the trivial group)."""
    if G.order == 1:
        return validate_partition(G, [[0]])
    return validate_partition(G, [[0], list(range(1, G.order))])


# ----------------------------------------------------------- A-sets and co.


def is_A_set(A: SRing, X) -> bool:
    X = set(int(x) for x in X)
    if not X:
        return True
    touched = {int(A.class_of[x]) for x in X}
    return sum(A.sizes[i] for i in touched) == len(X)


def a_subgroups(A: SRing, bound: int = abelian.DEFAULT_BOUND) -> list[Subgroup]:
    return [H for H in abelian.all_subgroups(A.group, bound=bound) if is_A_set(A, H.members)]


def _group_of(obj) -> Group:
    return obj.group if isinstance(obj, SRing) else obj


def radical(obj, X) -> Subgroup:
    """``rad(X) = {g : g + X = X}``; ``obj`` is an S-ring or a bare group."""
    G = _group_of(obj)
    X = sorted(set(int(x) for x in X))
    if not X:
        raise InvalidInput("radical of the empty set is undefined")
    mask = np.zeros(G.order, dtype=bool)
    mask[X] = True
    stab = mask[G.add_table[:, X]].all(axis=1)
    return abelian.subgroup_from_mask(G, stab)


def generated_subgroup(obj, X) -> Subgroup:
    return abelian.subgroup_generated(_group_of(obj), X)


def power_set(obj, X, m: int) -> frozenset[int]:
    return abelian.power_set(_group_of(obj), X, m)


def multiplier_image(A: SRing, m: int) -> SRing:
    """The partition ``{X^(m)}``; equal to ``A`` for every S-ring (Schur's theorem)."""
    G = A.group
    if np.gcd(m, G.order) != 1:
        raise InvalidMultiplier(f"{m} is not coprime to |G|={G.order}")
    tab = G.scale(m)
    image = frozenset(frozenset(int(tab[x]) for x in X) for X in A.classes)
    if image != A.partition:
        raise InternalInvariantFailure(f"multiplier {m} does not preserve the partition")
    return A


def size_profile(A: SRing) -> frozenset[int]:
    return A.size_profile()


def section_sring(A: SRing, S: Section) -> SRing:
    """The S-ring ``A_S`` over the quotient group ``U/L``."""
    if S.parent != A.group:
        raise NotASection("section belongs to another group")
    if not (is_A_set(A, S.upper.members) and is_A_set(A, S.lower.members)):
        raise NotASection("U and L must both be A-subgroups")
    Q, proj = S.quotient()
    upper = S.upper.mask
    images = {}
    for X in A.classes:
        if not upper[X[0]]:
            continue
        img = frozenset(int(proj[x]) for x in X)
        images[img] = None
    return validate_partition(Q, list(images))


def restriction(A: SRing, H: Subgroup) -> SRing:
    """``A_H`` for an A-subgroup ``H``, as an S-ring over ``H.as_group()``."""
    return section_sring(A, Section(H, abelian.trivial_subgroup(A.group)))


def intersection_profile(A: SRing, H: Subgroup, X) -> int:
    """The number ``|X cap (H + x)|``, checked to be constant over ``x`` in ``X``."""
    if not is_A_set(A, H.members):
        raise InvalidInput("H is not an A-subgroup")
    X = sorted(set(int(x) for x in X))
    G = A.group
    inX = np.zeros(G.order, dtype=bool)
    inX[X] = True
    h = np.array(H.members)
    counts = inX[G.add_table[np.array(X)][:, h]].sum(axis=1)
    if (counts != counts[0]).any():
        raise InternalInvariantFailure("|X cap Hx| is not constant on X")
    return int(counts[0])


# ------------------------------------------------------------ the closure


def _seed_vector(G: Group, seed) -> np.ndarray:
    if isinstance(seed, np.ndarray) and seed.shape == (G.order,):
        return seed.astype(object) if seed.dtype == object else seed.astype(np.int64)
    if isinstance(seed, dict):
        v = np.zeros(G.order, dtype=np.int64)
        for k, c in seed.items():
            v[int(k)] += int(c)
        return v
    v = np.zeros(G.order, dtype=np.int64)
    for x in seed:
        v[int(x)] += 1
    return v


def _refine_to_stable(G: Group, labels: np.ndarray, guard=()):
    """Split ``labels`` until products of class sums are constant on classes.

    Returns ``None`` as soon as one of the index arrays in ``guard`` stops
    being monochrome (refinement never merges, so it would stay split).
    """
    while True:
        _, labels = np.unique(labels, return_inverse=True)
        labels = labels.ravel()
        for idx in guard:
            lab = labels[idx]
            if (lab != lab[0]).any():
                return None
        r = int(labels.max()) + 1
        classes = _classes_from_labels(labels)
        T = _product_tensor(G, labels, classes)
        sig = np.concatenate([labels[:, None], T.reshape(G.order, r * r)], axis=1)
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.ravel()
        if int(new.max()) + 1 == r:
            return classes, T
        labels = new


def wielandt_closure(G: Group, seeds=()) -> SRing:
    """Smallest S-ring whose module contains every seed.

    Seeds are sets (0/1 vectors), dicts ``element -> coefficient`` or
    integer vectors of length ``|G|``.
    """
    n = G.order
    cols = [np.zeros(n, dtype=np.int64)]
    cols[0][0] = 1
    neg = G.neg
    for s in seeds:
        v = _seed_vector(G, s)
        cols.append(v)
        cols.append(v[neg])
    M = np.stack(cols, axis=1)
    if M.dtype == object:
        _, labels = np.unique(M.astype(str), axis=0, return_inverse=True)
    else:
        _, labels = np.unique(M, axis=0, return_inverse=True)
    classes, T = _refine_to_stable(G, labels.ravel())
    # class labels come out in unique order; rebuild canonically
    return _build(G, classes, T_full=T)


def refine_sring(A: SRing, extra_sets, guard=()) -> SRing | None:
    """``wielandt_closure`` of ``A``'s classes together with ``extra_sets``.

    With ``guard`` (index arrays), ``None`` is returned once any of them splits.
    """
    G = A.group
    labels = A.class_of.copy()
    neg = G.neg
    for X in extra_sets:
        v = np.zeros(G.order, dtype=np.int64)
        v[list(X)] = 1
        labels = labels * 4 + v * 2 + v[neg]
    res = _refine_to_stable(G, labels, guard)
    if res is None:
        return None
    classes, T = res
    return _build(G, classes, T_full=T)


def cosets_union_mask(G: Group, H: Subgroup, X) -> np.ndarray:
    mask = np.zeros(G.order, dtype=bool)
    h = np.array(H.members)
    for x in X:
        mask[G.add_table[int(x), h]] = True
    return mask
