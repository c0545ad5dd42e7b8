import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurkit import abelian
from schurkit.abelian import (
    GroupMap,
    Section,
    all_subgroups,
    automorphisms,
    element_order,
    make_group,
    multiplier_map,
    orbits,
    subgroup_generated,
    whole_group,
    trivial_subgroup,
)
from schurkit.errors import InvalidSpec, TooLarge

small_specs = st.lists(st.sampled_from([2, 3, 4, 5, 6, 9]), min_size=1, max_size=3).filter(
    lambda fs: int(np.prod(fs)) <= 60
)


def brute_subgroups(G):
    """Every subset containing 0 and closed under addition (tiny groups only)."""
    out = []
    rest = list(range(1, G.order))
    for r in range(len(rest) + 1):
        for comb in itertools.combinations(rest, r):
            S = set((0,) + comb)
            if all(G.add(x, y) in S for x in S for y in S):
                out.append(frozenset(S))
    return out


def test_make_group_orders():
    assert make_group([9, 5]).order == 45
    assert make_group("3x3x5").order == 45
    assert make_group([5, 9]).factors == (9, 5)
    with pytest.raises(InvalidSpec):
        make_group([1])
    with pytest.raises(InvalidSpec):
        make_group([])
    with pytest.raises(InvalidSpec):
        make_group("3y3")


def test_element_orders():
    G = make_group([9, 5])
    assert element_order(G, (0, 0)) == 1
    assert element_order(G, (1, 0)) == 9
    assert element_order(G, (3, 1)) == 15


def test_element_literals_round_trip():
    G = make_group("3x3x5")
    for i in range(G.order):
        assert G.parse_element(G.format_element(i)) == i


def test_subgroup_generated():
    G = make_group([9, 5])
    assert subgroup_generated(G, []).order == 1
    H = subgroup_generated(G, [G.index((3, 0))])
    assert H.members == tuple(sorted(G.index((k, 0)) for k in (0, 3, 6)))
    assert subgroup_generated(G, [G.index((1, 1))]).order == 45


def test_subgroup_counts():
    G = make_group([9, 5])
    subs = all_subgroups(G)
    assert sorted(H.order for H in subs) == [1, 3, 5, 9, 15, 45]
    E9 = make_group([3, 3])
    assert sorted(H.order for H in all_subgroups(E9)) == [1, 3, 3, 3, 3, 9]
    assert len(all_subgroups(make_group([5]))) == 2
    with pytest.raises(TooLarge):
        all_subgroups(make_group([9, 5]), bound=20)


@pytest.mark.parametrize("spec", ["4", "2x2", "6", "3x3", "2x2x2", "4x2"])
def test_subgroups_match_brute_force(spec):
    G = make_group(spec)
    assert {H.member_set for H in all_subgroups(G)} == set(brute_subgroups(G))


@pytest.mark.parametrize("spec,count", [("15", 8), ("3x3", 48), ("9x5", 24), ("2x2x2", 168), ("6x2", 12)])
def test_automorphism_counts(spec, count):
    assert len(automorphisms(make_group(spec), bound=10**4)) == count


def test_automorphisms_closed_under_composition():
    for spec in ("3x3", "6x2", "9x5"):
        G = make_group(spec)
        auts = automorphisms(G, bound=10**4)
        keys = {tuple(a.table.tolist()) for a in auts}
        for a, b in itertools.product(auts[:12], auts[:12]):
            assert tuple(a.then(b).table.tolist()) in keys
        for a in auts:
            assert tuple(a.inverse().table.tolist()) in keys


def test_orbits_examples():
    C15 = make_group([15])
    orb = {frozenset(o) for o in orbits([multiplier_map(C15, 2)], range(15))}
    assert orb == {frozenset(s) for s in ([0], [1, 2, 4, 8], [7, 11, 13, 14], [3, 6, 9, 12], [5, 10])}
    C5 = make_group([5])
    assert {frozenset(o) for o in orbits([multiplier_map(C5, -1)], range(5))} == {
        frozenset([0]), frozenset([1, 4]), frozenset([2, 3])}
    assert len(orbits([abelian.identity_map(C5)], range(5))) == 5


def test_quotients():
    G = make_group([9, 5])
    L = subgroup_generated(G, [G.index((3, 0))])
    Q, pr = Section(whole_group(G), L).quotient()
    assert Q.order == 15
    # projection is a homomorphism
    a, b = np.meshgrid(range(G.order), range(G.order), indexing="ij")
    assert np.array_equal(pr[G.add_table], Q.add_table[pr[a], pr[b]])
    Q1, _ = Section(L, L).quotient()
    assert Q1.order == 1
    Q2, pr2 = Section(whole_group(G), trivial_subgroup(G)).quotient()
    assert Q2.order == G.order and len(set(pr2.tolist())) == G.order


def test_section_cosets():
    G = make_group("3x3x5")
    U = subgroup_generated(G, [G.unit(1), G.unit(0)])
    L = subgroup_generated(G, [G.unit(1)])
    S = Section(U, L)
    cos = S.cosets
    assert len(cos) == U.order // L.order
    assert all(len(c) == L.order for c in cos)
    assert sorted(x for c in cos for x in c) == list(U.members)


@settings(max_examples=40, deadline=None)
@given(small_specs)
def test_group_axioms(factors):
    G = make_group(factors)
    add = G.add_table
    assert np.array_equal(add, add.T)
    assert np.array_equal(add[:, 0], np.arange(G.order))
    assert (add[np.arange(G.order), G.neg] == 0).all()
    x, y, z = np.random.default_rng(0).integers(0, G.order, size=(3, 50))
    assert np.array_equal(add[add[x, y], z], add[x, add[y, z]])


@settings(max_examples=30, deadline=None)
@given(small_specs)
def test_subgroup_lagrange(factors):
    G = make_group(factors)
    for H in all_subgroups(G):
        assert G.order % H.order == 0
        assert 0 in H.member_set
        assert all(int(G.neg[x]) in H.member_set for x in H.members)


@settings(max_examples=30, deadline=None)
@given(small_specs, st.integers(1, 200), st.integers(1, 200))
def test_multiplier_composition(factors, m, n):
    G = make_group(factors)
    e = G.exponent
    if np.gcd(m, e) != 1 or np.gcd(n, e) != 1:
        return
    a, b = multiplier_map(G, m), multiplier_map(G, n)
    assert np.array_equal(a.then(b).table, multiplier_map(G, (m * n) % e or e).table)


def test_group_map_rejects_non_homomorphism():
    C4 = make_group([4])
    C2 = make_group([2])
    with pytest.raises(Exception):
        GroupMap(C2, C4, (1,))


def test_abelian_groups_of_order():
    assert sorted(G.spec() for G in abelian.abelian_groups_of_order(45)) == sorted(["9x5", "5x3x3"])
    assert len(abelian.abelian_groups_of_order(16)) == 5
    assert len(abelian.abelian_groups_of_order(18)) == 2
