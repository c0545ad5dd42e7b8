import itertools

import numpy as np
import pytest

from schurkit import abelian, enumeration
from schurkit.abelian import make_group, subgroup_generated
from schurkit.constructions import build_A_iM, build_A_star
from schurkit.enumeration import (
    brute_force_srings,
    cayley_orbits_of_order,
    classify,
    cyclotomic_catalog,
    dedupe_cayley,
    enumerate_srings,
    enumerate_with_stats,
    is_cyclotomic,
    lemma_statements,
    radical_of_sring,
    s_wreath_sections,
    tensor_decompositions,
)
from schurkit.errors import TooLarge
from schurkit.iso import cayley_image
from schurkit.products import tensor, wreath
from schurkit.sring import group_ring, multiplier_image, radical, tau, wielandt_closure

from conftest import brute_srings


@pytest.mark.parametrize("spec,count", [("4", 3), ("2x2", 5), ("5", 3), ("7", 4)])
def test_small_counts(spec, count):
    assert len(enumerate_srings(make_group(spec))) == count


@pytest.mark.parametrize("spec", ["2", "3", "4", "2x2", "5", "6", "7", "8", "4x2", "2x2x2"])
def test_matches_partition_oracle(spec):
    G = make_group(spec)
    assert {A.partition for A in enumerate_srings(G).all} == brute_srings(G)


@pytest.mark.parametrize("spec", ["9", "3x3", "10"])
def test_matches_packaged_brute_force(spec):
    G = make_group(spec)
    assert {A.partition for A in enumerate_srings(G).all} == {A.partition for A in brute_force_srings(G)}


@pytest.mark.parametrize("spec", ["6", "8", "3x3", "4x2", "12", "6x2"])
def test_multiplier_filter_is_complete(spec):
    """The pruned search finds the same S-rings as trying every subset."""
    G = make_group(spec)
    fast, _ = enumerate_with_stats(G)
    slow, _ = enumerate_with_stats(G, unfiltered=True)
    assert fast == slow


# Counts below 17 are backed by the subset search above; order 18 and up are regression values.
@pytest.mark.parametrize(
    "spec,count",
    [("9", 7), ("3x3", 40), ("5x2", 10), ("4x3", 32), ("7x2", 13), ("5x3", 21), ("9x2", 42), ("3x3x2", 297), ("9x5", 140)],
)
def test_frozen_counts(spec, count):
    assert len(enumerate_srings(make_group(spec))) == count


@pytest.mark.parametrize("p,count", [(5, 3), (7, 4), (11, 4), (13, 6)])
def test_prime_counts_equal_cyclotomic(p, count):
    G = make_group([p])
    cat = enumerate_srings(G)
    assert len(cat) == count
    assert {A.partition for A in cat.all} == {A.partition for A in cyclotomic_catalog(G)}


@pytest.mark.parametrize("spec", ["9x2", "3x3x2", "12", "2x2x2"])
def test_catalog_invariants(spec):
    G = make_group(spec)
    cat = enumerate_srings(G)
    assert group_ring(G) in cat and tau(G) in cat
    assert len({A.partition for A in cat.all}) == len(cat)
    for A in cat.all:
        assert wielandt_closure(G, [list(X) for X in A.classes]) == A
        for m in abelian.units(G):
            assert multiplier_image(A, m) in cat


def test_cap():
    with pytest.raises(TooLarge):
        enumerate_srings(make_group([64]))
    with pytest.raises(TooLarge):
        enumerate_srings(make_group([9, 2]), cap=10)


def test_disk_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv("SCHURKIT_CACHE", str(tmp_path))
    enumeration._enumerate_cached.cache_clear()
    G = make_group([3, 3])
    first = enumerate_srings(G).all
    files = list(tmp_path.glob("srings-3x3-*.jsonl"))
    assert len(files) == 1 and len(files[0].read_text().splitlines()) == 40
    enumeration._enumerate_cached.cache_clear()
    assert enumerate_srings(G).all == first
    monkeypatch.setenv("SCHURKIT_CACHE", "off")
    assert enumeration.cache_dir() is None
    enumeration._enumerate_cached.cache_clear()


def test_dedupe_examples():
    G = make_group([5])
    cat = enumerate_srings(G)
    sizes = {orb[0][0].rank: len(orb) for orb in cat.orbits}
    assert sizes == {5: 1, 2: 1, 3: 1}
    G = make_group([3, 3])
    cat = enumerate_srings(G)
    assert sum(len(o) for o in cat.orbits) == len(cat)
    for orb in cat.orbits:
        rep = orb[0][0]
        for member, sigma in orb:
            assert cayley_image(rep, sigma) == member
    assert len(dedupe_cayley(cat)) == len(cat.orbits)
    ranks = {orb[0][0] for orb in cat.orbits if len(orb) == 1}
    assert group_ring(G) in ranks and tau(G) in ranks


def test_cayley_orbits_of_order():
    orbs = cayley_orbits_of_order(18)
    assert sum(len(members) for _, members in orbs) == 42 + 297
    assert all(rep.rank == 4 for rep, _ in cayley_orbits_of_order(18, rank=4))


def test_radical_examples():
    C15 = make_group([15])
    assert radical_of_sring(group_ring(C15)).order == 1
    assert radical_of_sring(tau(C15)).order == 1
    L = subgroup_generated(C15, [5])
    W = wreath(group_ring(make_group([3])), group_ring(make_group([5])), L)
    assert L.member_set <= radical_of_sring(W).member_set


def test_radical_is_independent_of_choice():
    for A in enumerate_srings(make_group([9, 2])).all:
        gens = [X for X in A.classes if (A.group.element_orders[list(X)] == 18).any()]
        assert len({radical(A, X).members for X in gens}) == 1


def test_classify_examples():
    G = make_group([9, 5])
    assert lemma_statements(classify(tau(G))) == [1]
    t = classify(group_ring(G))
    assert "tensor-decomposable" in t.tags
    t = classify(build_A_star(1, "E", 5))
    assert "family-A_i*" in t.tags and "s-wreath-aut" not in t.tags
    assert "s-wreath" in t.tags
    t = classify(build_A_iM(9, 5, 4))
    assert "cyclotomic-table1" in t.tags
    assert t.to_json()["tags"]


@pytest.mark.parametrize("i", [1, 2, 3])
@pytest.mark.parametrize("H", ["C", "E"])
def test_star_families_fail_statement_three(i, H):
    t = classify(build_A_star(i, H, 5))
    assert 3 not in lemma_statements(t) and 4 in lemma_statements(t)


def test_tensor_decomposition_detection():
    C3, C5 = make_group([3]), make_group([5])
    T = tensor(tau(C3), tau(C5))
    assert tensor_decompositions(T)
    assert not tensor_decompositions(tau(make_group([15])))


def test_s_wreath_sections_radicals():
    for A in enumerate_srings(make_group([3, 3, 2])).all[:80]:
        for S in s_wreath_sections(A):
            assert S.lower.order > 1 and S.upper.order < A.group.order
            for X in A.classes:
                if X[0] not in S.upper.member_set:
                    assert S.lower.member_set <= radical(A, X).member_set


def test_is_cyclotomic():
    G = make_group([15])
    assert is_cyclotomic(group_ring(G)) and is_cyclotomic(tau(make_group([5])))
    assert not is_cyclotomic(tau(G))
    L = subgroup_generated(G, [5])
    W = wreath(tau(make_group([3])), tau(make_group([5])), L)
    assert not is_cyclotomic(W)


@pytest.mark.parametrize("n", [4, 6, 8, 9, 10, 12, 14, 15, 16])
def test_cyclic_classification_is_exhaustive(n):
    for A in enumerate_srings(make_group([n])).all:
        assert lemma_statements(classify(A, mode="circ"))



@pytest.mark.parametrize("spec,counts", [
    ("9x5", {(1,): 1, (2,): 5, (3,): 113, (4,): 3, (5,): 2, (2, 3): 12, (2, 5): 4}),
    ("5x3x3", {(1,): 1, (2,): 144, (3,): 596, (4,): 12, (6,): 50, (2, 3): 288}),
])
def test_order_45_classification_is_exhaustive(spec, counts):
    got = {}
    for A in enumerate_srings(make_group(spec)).all:
        key = tuple(lemma_statements(classify(A)))
        got[key] = got.get(key, 0) + 1
    assert got == counts

def _h_projection(G, p):
    u = next(u for u in range(1, 9 * p) if u % 9 == 1 and u % p == 0)
    return G.scale(u)


@pytest.mark.parametrize("spec,p", [("9x5", 5), ("5x3x3", 5), ("9x7", 7), pytest.param("7x3x3", 7, marks=pytest.mark.slow)])
def test_equal_projection_implies_conjugate_outside_H(spec, p):
    """Basic sets outside H with equal H-projections are rationally conjugate.

    The hypothesis is needed: a basic set inside H and one outside can share a projection.
    """
    G = make_group(spec)
    proj = _h_projection(G, p)
    scales = [G.scale(m) for m in abelian.units(G)]
    inside_counterexample = False
    for A in enumerate_srings(G, with_orbits=False).all:
        prj = [frozenset(proj[list(X)].tolist()) for X in A.classes]
        for i, j in itertools.combinations(range(A.rank), 2):
            if prj[i] != prj[j]:
                continue
            X, Y = A.classes[i], A.classes[j]
            conj = any(frozenset(s[list(X)].tolist()) == frozenset(Y) for s in scales)
            outside = all((proj[list(Z)] != np.asarray(Z)).all() for Z in (X, Y))
            if outside:
                assert conj
            elif not conj:
                inside_counterexample = True
    assert inside_counterexample
