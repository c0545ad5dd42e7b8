import dataclasses

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schurkit import abelian
from schurkit.abelian import make_group, subgroup_from_mask
from schurkit.constructions import (
    E9,
    TABLE1,
    TABLE2,
    build_A0,
    build_A_iM,
    build_A_star,
    build_family,
    check_conditions,
    conj_pairs,
    named_elements,
    p_subgroup,
    printed_witness,
    radical_free,
    radical_free_brute,
    rationally_conjugate,
    subdirect_spec_for,
    table1_groups,
    table2_check,
    union_witness,
    well_defined_orders,
    witness_set,
)
from schurkit.errors import InvalidInput, NoWitnessFound, NotWellDefined, OutOfRange
from schurkit.iso import algebraically_isomorphic, cayley_isomorphic
from schurkit.products import _power, cyclotomic, subdirect
from schurkit.sring import is_A_set, restriction, wielandt_closure

from conftest import axioms_hold


def test_A0_p5_classes():
    A = build_A0(5)
    assert set(A.class_sets) == {
        frozenset(s) for s in ([0], [1, 2, 4, 8], [7, 11, 13, 14], [3, 6, 9, 12], [5, 10])
    }


def test_A0_p7():
    A = build_A0(7)
    assert A.rank == 5 and sorted(A.sizes) == [1, 2, 6, 6, 6]
    G = A.group
    for n in (3, 7):
        H = subgroup_from_mask(G, np.isin(G.element_orders, [1, n]))
        assert restriction(A, H).rank == 2


def test_A0_rejects_small_or_composite_p():
    for p in (2, 3, 9):
        with pytest.raises(OutOfRange):
            build_A0(p)


def test_A_star_profiles_p5():
    A1 = build_A_star(1, "E", 5)
    assert A1.rank == 9 and sorted(A1.sizes) == [1, 2, 3, 3, 4, 4, 4, 12, 12]
    A2 = build_A_star(2, "E", 5)
    assert A2.rank == 7 and 6 in A2.sizes
    A3 = build_A_star(3, "E", 5)
    assert A3.rank == 8 and sorted(A3.sizes) == [1, 2, 4, 4, 4, 6, 12, 12]
    with pytest.raises(InvalidInput):
        build_A_star(4, "E", 5)


def test_A2_star_contains_b_coset_union():
    A = build_A_star(2, "E", 5)
    G = A.group
    nm = named_elements(G)
    a, b = nm["a"], nm["b"]
    Aset = [0, a, int(G.neg[a])]
    X = {G.add(b, x) for x in Aset} | {G.add(int(G.neg[b]), x) for x in Aset}
    assert frozenset(X) in A.class_sets


@pytest.mark.parametrize("H", ["C", "E"])
@pytest.mark.parametrize("i", [1, 2, 3])
def test_A_star_is_valid_over_both_groups(i, H):
    A = build_A_star(i, H, 7)
    assert A.group.order == 63
    assert axioms_hold(A.group, A.classes)


def test_table1_indices():
    assert [line.index for line in TABLE1] == [2, 2, 3, 3, 6, 2, 2, 4, 2, 4, 8]
    for i in range(1, 12):
        _, _, K, K0 = table1_groups(i)
        assert len(K) // len(K0) == TABLE1[i - 1].index
        keys = {tuple(f.table.tolist()) for f in K0}
        # K0 is normal in K
        for f in K:
            for g in K0:
                assert tuple(f.inverse().then(g).then(f).table.tolist()) in keys


def test_A_iM_examples():
    A = build_A_iM(1, 5, 4)
    assert {2, 4} <= set(A.sizes)
    with pytest.raises(NotWellDefined):
        build_A_iM(3, 5, 4)
    with pytest.raises(OutOfRange):
        build_A_iM(1, 5, 3)
    inst = build_family("A11", 17, M_order=16)
    assert table2_check(inst)
    assert {8, 16} <= set(inst.sring.sizes)


@pytest.mark.parametrize("i,p,k", [(i, p, k) for p in (5, 7) for i in range(1, 12) for k in well_defined_orders(i, p)])
def test_A_iM_structure(i, p, k):
    A = build_A_iM(i, p, k)
    G = A.group
    P = p_subgroup(G)
    E = subgroup_from_mask(G, np.isin(G.element_orders, [1, 3]))
    assert is_A_set(A, P.members) and is_A_set(A, E.members)
    # N(A_P) = {|M|}
    assert {len(X) for X in A.classes[1:] if X[0] in P.member_set} == {k}
    # A_E is the orbit partition of K on E9 = <a> x <b>
    _, _, K, _ = table1_groups(i)
    nm = named_elements(G)
    into_G = [G.add(int(G.scale(u)[nm["a"]]), int(G.scale(v)[nm["b"]])) for u, v in (E9.coords(x) for x in range(9))]
    expected = {frozenset(into_G[y] for y in orb) for orb in abelian.orbits(K, range(9))}
    assert {X for X in A.class_sets if next(iter(X)) in E.member_set} == expected


def test_table2_examples():
    inst = build_family("A1*", 5)
    assert set(inst.sring.size_profile()) == {2, 3, 4, 12}
    assert table2_check(inst)
    inst = build_family("A1", 5, M_order=4)
    assert set(inst.sring.size_profile()) == {2, 4} and table2_check(inst)
    inst = build_family("A3", 7, M_order=3)
    assert {1, 3} <= set(inst.sring.size_profile())


def test_table2_rows_cover_families():
    assert set(TABLE2) == {"A1*", "A2*", "A3*"} | {f"A{i}" for i in range(1, 12)}


def test_printed_witnesses():
    X = printed_witness(1, 5, 4)
    assert [len(x) for x in X] == [2, 4, 4]
    X = printed_witness(7, 5, 4)
    assert [len(x) for x in X] == [4, 8, 8]
    with pytest.raises(InvalidInput):
        printed_witness(2, 5, 4)


@pytest.mark.parametrize("i", [1, 4, 5, 6, 7, 8, 9, 10])
def test_witness_generates(i):
    p = 7 if i in (4, 5) else 5
    k = well_defined_orders(i, p)[-1]
    inst = build_family(f"A{i}", p, M_order=k)
    X = witness_set(inst)
    assert all(check_conditions(inst.sring, X).values())
    assert wielandt_closure(inst.sring.group, [X]) == inst.sring


@pytest.mark.parametrize("i,p,k", [(2, 5, 4), (2, 5, 2), (3, 7, 3), (3, 7, 6)])
def test_no_basic_set_witness_on_lines_2_and_3(i, p, k):
    """A single basic set never works here; unions of basic sets do."""
    inst = build_family(f"A{i}", p, M_order=k)
    A = inst.sring
    with pytest.raises(NoWitnessFound):
        witness_set(inst)
    for X in A.classes[1:]:
        c = check_conditions(A, X)
        if not c["C1"]:
            continue
        if i == 2:
            assert all(c.values()) and wielandt_closure(A.group, [X]).rank < A.rank
        else:
            assert not c["C3"] and wielandt_closure(A.group, [X]) == A
    X = union_witness(A)
    assert X is not None and wielandt_closure(A.group, [X]) == A


def test_check_conditions_rejects():
    A = build_A_iM(1, 5, 4)
    G = A.group
    assert not check_conditions(A, list(range(1, G.order)))["C2"]
    nm = named_elements(G)
    assert not check_conditions(A, [nm["a"], nm["b"]])["C1"]
    # a coset of <a> has nontrivial radical
    coset = [G.add(nm["z"], x) for x in (0, nm["a"], G.add(nm["a"], nm["a"]))]
    assert not check_conditions(A, coset)["C4"]


@given(st.sampled_from(["5x3x3", "9x5", "9x2", "15"]), st.data())
def test_radical_free_matches_brute_force(spec, data):
    G = make_group(spec)
    X = data.draw(st.lists(st.integers(1, G.order - 1), min_size=1, max_size=14, unique=True))
    assert radical_free(G, X) == radical_free_brute(G, X)


def test_radical_free_on_witness_subsets():
    inst = build_family("A1", 5, M_order=2)
    X = witness_set(inst)
    assert len(X) <= 22
    assert radical_free_brute(inst.sring.group, X)


@pytest.mark.parametrize("i", [2, 3, 4, 5, 6, 9, 10])
def test_generating_sets_rationally_conjugate(i):
    p = 7 if i in (3, 4, 5) else 5
    for k in well_defined_orders(i, p):
        assert all(c for _, _, c in conj_pairs(build_A_iM(i, p, k)))


@pytest.mark.parametrize("i", [7, 8])
def test_conjugacy_counterexamples(i):
    A = build_A_iM(i, 5, 4)
    assert any(not c for _, _, c in conj_pairs(A))


def test_line1_has_no_generating_basic_set():
    A = build_A_iM(1, 5, 4)
    G = A.group
    assert not any(abelian.subgroup_generated(G, X).order == G.order for X in A.classes)
    # the displayed pieces are not rationally conjugate to each other as A-sets
    X0, X1, X2 = printed_witness(1, 5, 4)
    assert not rationally_conjugate(G, X1, X2)


def test_psi_choice_is_pinned():
    a = build_A_iM(5, 7, 6)
    b = build_A_iM(5, 7, 6)
    assert a.dumps() == b.dumps()


def _with_psi_power(i, p, k, j):
    spec = subdirect_spec_for(i, p, k)
    gk, gm = spec.psi
    W = subdirect(dataclasses.replace(spec, psi=(gk, _power(gm, j, spec.P))))
    return cyclotomic(W, W[0].source)


@pytest.mark.parametrize("i,p,k,j", [(3, 7, 6, 2), (4, 7, 3, 2), (5, 7, 6, 5), (8, 5, 4, 3), (10, 17, 8, 3),
                                     (11, 17, 8, 3), (11, 17, 16, 3)])
def test_other_psi_gives_cayley_isomorphic_sring(i, p, k, j):
    assert cayley_isomorphic(_with_psi_power(i, p, k, j), build_A_iM(i, p, k))


@pytest.mark.parametrize("k,j", [(8, 5), (8, 7), (16, 5), (16, 7)])
def test_line_11_psi_choice_matters(k, j):
    # twisting psi by 5 or 7 on the cyclic quotient of order 8 is not realised by Aut(G)
    A, B = _with_psi_power(11, 17, k, j), build_A_iM(11, 17, k)
    assert sorted(A.sizes) == sorted(B.sizes)
    assert not algebraically_isomorphic(A, B)
