"""Batch runs shared by the command line, the scripts and the acceptance suite."""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import abelian
from .constructions import build_A_iM, build_A_star, well_defined_orders
from .enumeration import cayley_orbits_of_order, enumerate_srings
from .errors import InvalidInput
from .iso import AlgIso, Budget, PointMap, algebraically_isomorphic, is_separable, replay
from .sring import SRing, sring_from_json
from .wl import (
    cayley_adjacency,
    certificate,
    closed_walk_invariant,
    digraph_coloring,
    graph_isomorphism,
    wl2_equivalent,
    wl2_stabilize,
)


# ------------------------------------------------------------ separability


@dataclass
class SweepConfig:
    order: int
    budget_nodes: int | None = None
    representatives_only: bool = False
    with_witnesses: bool = True


def separability_sweep(cfg: SweepConfig, skip=frozenset()):
    """Yield one record per S-ring over every abelian group of order ``cfg.order``.

    Catalog records come first so witnesses can refer to targets by
    ``(group, index)``.
    """
    budget = Budget(cfg.budget_nodes)
    groups = abelian.abelian_groups_of_order(cfg.order)
    cats = {G.spec(): enumerate_srings(G) for G in groups}
    index = {}
    for spec, cat in cats.items():
        index.update({(A.group, A.classes): (spec, i) for i, A in enumerate(cat.all)})
        yield {"kind": "catalog", "group": spec, "srings": [[list(X) for X in A.classes] for A in cat.all]}
    by_rank: dict[int, list] = {}
    for spec, cat in cats.items():
        subjects = [orb[0][0] for orb in cat.orbits] if cfg.representatives_only else cat.all
        for A in subjects:
            key = index[(A.group, A.classes)]
            if key in skip:
                continue
            if A.rank not in by_rank:
                by_rank[A.rank] = cayley_orbits_of_order(cfg.order, rank=A.rank)
            rep = is_separable(A, target_orbits=by_rank[A.rank], budget=budget)
            rec = {"kind": "sring", "group": key[0], "index": key[1], **rep.summary()}
            if cfg.with_witnesses:
                rec["witnesses"] = [
                    {
                        "target": list(index[(w.target.group, w.target.classes)]),
                        "class_map": list(w.class_map),
                        "images": None if w.images is None else list(w.images),
                    }
                    for w in rep.witnesses
                ]
            yield rec


def verify_records(records) -> tuple[int, int]:
    """Replay every witness in a sweep report; returns ``(checked, failed)``."""
    cats: dict[str, list[SRing]] = {}
    checked = failed = 0
    for rec in records:
        if rec.get("kind") == "catalog":
            cats[rec["group"]] = [sring_from_json({"group": rec["group"], "classes": c}) for c in rec["srings"]]
            continue
        if rec.get("kind") != "sring":
            continue
        A = cats[rec["group"]][rec["index"]]
        for w in rec.get("witnesses", []):
            B = cats[w["target"][0]][w["target"][1]]
            phi = AlgIso(A, B, tuple(w["class_map"]))
            checked += 1
            ok = phi.is_valid() and w["images"] is not None and replay(phi, PointMap(tuple(w["images"])))
            failed += not ok
    return checked, failed


# -------------------------------------------------------- nonisom matrix


@dataclass
class NonisomEntry:
    name: str
    sring: SRing


def nonisom_families(p: int, H: str = "E", lines=range(1, 12)) -> list[NonisomEntry]:
    out = [NonisomEntry(f"A{i}*", build_A_star(i, H, p)) for i in (1, 2, 3)]
    if H == "E":
        for i in lines:
            for k in well_defined_orders(i, p):
                out.append(NonisomEntry(f"A{i}(k={k})", build_A_iM(i, p, k)))
    return out


def nonisom_matrix(entries: list[NonisomEntry], budget: Budget | None = None) -> np.ndarray:
    """``M[a, b]``: are entries ``a`` and ``b`` algebraically isomorphic."""
    n = len(entries)
    M = np.eye(n, dtype=bool)
    for a, b in itertools.combinations(range(n), 2):
        A, B = entries[a].sring, entries[b].sring
        if A.group.order != B.group.order:
            continue
        M[a, b] = M[b, a] = algebraically_isomorphic(A, B, budget=budget)
    return M


# ------------------------------------------------------------- WL sweep


def inverse_closed_sets(G: abelian.Group) -> list[list[int]]:
    """All inverse-closed subsets of ``G#`` (``2^(#inverse pairs)`` of them)."""
    pairs = sorted({tuple(sorted({x, int(G.neg[x])})) for x in range(1, G.order)})
    out = []
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        out.append(sorted(y for b, pr in zip(bits, pairs) if b for y in pr))
    return out


def sampled_sets(G: abelian.Group, count: int, seed: int, with_images: bool = True) -> list[list[int]]:
    """Random inverse-closed sets, each followed by a random automorphic image."""
    rng = random.Random(seed)
    pairs = sorted({tuple(sorted({x, int(G.neg[x])})) for x in range(1, G.order)})
    auts = abelian.automorphisms(G, bound=10**6) if with_images else []
    out = []
    for _ in range(count):
        X = sorted(y for pr in pairs if rng.random() < 0.5 for y in pr)
        out.append(X)
        if with_images:
            s = rng.choice(auts)
            out.append(sorted(int(s.table[x]) for x in X))
    return out


@dataclass
class WLSweepResult:
    graphs: int
    iso_classes: int
    wl_classes: int
    disagreeing_pairs: int
    joint_checks: int = 0
    joint_mismatches: int = 0
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.disagreeing_pairs == 0 and self.joint_mismatches == 0


def iso_classes(adjs) -> list[int]:
    """Isomorphism classes by exact invariants and backtracking."""
    buckets = defaultdict(list)
    for i, a in enumerate(adjs):
        buckets[closed_walk_invariant(a)].append(i)
    cls = [-1] * len(adjs)
    nc = 0
    for b in buckets.values():
        reps = []
        for i in b:
            for r in reps:
                if graph_isomorphism(adjs[i], adjs[r]) is not None:
                    cls[i] = cls[r]
                    break
            else:
                reps.append(i)
                cls[i] = nc
                nc += 1
    return cls


def wl_sweep(items, joint_samples: int = 0, seed: int = 0) -> WLSweepResult:
    """Compare 2-WL equivalence with isomorphism over all pairs of ``items``.

    ``items`` is a list of ``(group, connection set)``. Equivalence classes
    come from canonical refinement histories; ``joint_samples`` random pairs
    (plus every pair sharing a certificate across iso classes) are rechecked
    with the joint run on the disjoint union.
    """
    adjs = [cayley_adjacency(G, X) for G, X in items]
    certs = [certificate(wl2_stabilize(digraph_coloring(a))) for a in adjs]
    cls = iso_classes(adjs)
    wl_id: dict[str, int] = {}
    wl = [wl_id.setdefault(c, len(wl_id)) for c in certs]
    # pairs disagree iff iso-class and wl-class relations differ
    joint = defaultdict(set)
    for c, w in zip(cls, wl):
        joint[w].add(c)
    size_c = np.bincount(cls)
    size_w = np.bincount(wl)
    size_cw = defaultdict(int)
    for c, w in zip(cls, wl):
        size_cw[(c, w)] += 1
    same_c = sum(int(s) * (int(s) - 1) // 2 for s in size_c)
    same_w = sum(int(s) * (int(s) - 1) // 2 for s in size_w)
    same_both = sum(s * (s - 1) // 2 for s in size_cw.values())
    res = WLSweepResult(len(items), int(max(cls)) + 1, len(wl_id), (same_c - same_both) + (same_w - same_both))
    rng = random.Random(seed)
    checks = [(rng.randrange(len(items)), rng.randrange(len(items))) for _ in range(joint_samples)]
    for w, cs in joint.items():
        if len(cs) > 1:
            members = [i for i in range(len(items)) if wl[i] == w]
            checks.append((members[0], members[-1]))
    for i, j in checks:
        eq = wl2_equivalent(digraph_coloring(adjs[i]), digraph_coloring(adjs[j]))
        res.joint_checks += 1
        if eq != (certs[i] == certs[j]):
            res.joint_mismatches += 1
            res.details.append({"pair": [i, j], "joint": eq})
        if eq != (cls[i] == cls[j]):
            res.details.append({"pair": [i, j], "joint": eq, "isomorphic": cls[i] == cls[j]})
    return res


def groups_of_order_9p(p: int) -> list[abelian.Group]:
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise InvalidInput(f"{p} is not prime")
    return abelian.abelian_groups_of_order(9 * p)

