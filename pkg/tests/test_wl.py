import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schurkit.abelian import automorphisms, make_group
from schurkit.batch import inverse_closed_sets, iso_classes, sampled_sets, wl_sweep
from schurkit.enumeration import enumerate_srings
from schurkit.errors import InvalidConnectionSet
from schurkit.wl import (
    cayley_adjacency,
    cayley_digraph,
    certificate,
    closed_walk_invariant,
    digraph_coloring,
    graph_from_json,
    graph_isomorphism,
    graph_to_json,
    is_stable,
    sring_coloring,
    wl2_equivalent,
    wl2_stabilize,
    wl_closure_vs_sring,
)

C5, C6 = make_group([5]), make_group([6])


def test_initial_colourings():
    assert cayley_digraph(C5, [1, 2, 3, 4]).num_colors == 2
    assert cayley_digraph(C5, [1, 4]).num_colors == 3
    assert cayley_digraph(C5, []).num_colors == 2
    with pytest.raises(InvalidConnectionSet):
        cayley_digraph(C5, [0, 1])
    with pytest.raises(InvalidConnectionSet):
        digraph_coloring(np.eye(3, dtype=bool))


def test_stabilize_examples():
    K = wl2_stabilize(cayley_digraph(C5, [1, 2, 3, 4]))
    assert K.num_colors == 2
    pent = wl2_stabilize(cayley_digraph(C5, [1, 4]))
    assert pent.num_colors == 3
    hexa = wl2_stabilize(cayley_digraph(C6, [1, 5]))
    assert hexa.num_colors == 4
    assert all(is_stable(c) and c.check_diagonal() for c in (K, pent, hexa))


def test_pentagon_matches_closure():
    cmp = wl_closure_vs_sring(C5, [1, 4])
    assert cmp.equal and cmp.wl_colors == cmp.sring_rank == 3


def test_rank2_closure():
    cmp = wl_closure_vs_sring(C5, [1, 2, 3, 4])
    assert cmp.equal and cmp.sring_rank == 2


def test_directed_input():
    st_ = wl2_stabilize(cayley_digraph(make_group([7]), [1, 2, 4]))
    assert is_stable(st_) and st_.num_colors == 3


def test_equivalence_basics():
    G = make_group([9, 2])
    a = cayley_digraph(G, [1, 17, 2, 16])
    assert wl2_equivalent(a, a)
    s = automorphisms(G)[3]
    b = cayley_digraph(G, [int(s.table[x]) for x in (1, 17, 2, 16)])
    assert wl2_equivalent(a, b)
    assert not wl2_equivalent(a, cayley_digraph(C5, [1, 4]))


def test_nonisomorphic_pair_across_groups():
    C18, E = make_group([9, 2]), make_group([3, 3, 2])
    X = [1, 17]  # two 18-cycles
    Y = [E.index((1, 0, 1)), E.index((2, 0, 1))]  # three hexagons
    g1, g2 = cayley_adjacency(C18, X), cayley_adjacency(E, Y)
    assert graph_isomorphism(g1, g2) is None
    assert not wl2_equivalent(digraph_coloring(g1), digraph_coloring(g2))


def _random_sets(G, k, seed):
    rng = random.Random(seed)
    return [sorted(rng.sample(range(1, G.order), rng.randint(0, G.order - 1))) for _ in range(k)]


@pytest.mark.parametrize("spec", ["9x2", "3x3x2", "12", "5x3"])
def test_stable_refinement_properties(spec):
    G = make_group(spec)
    for X in _random_sets(G, 10, 7):
        init = cayley_digraph(G, X)
        st_ = wl2_stabilize(init)
        assert is_stable(st_) and st_.check_diagonal()
        # refines the initial colouring
        for c in range(st_.num_colors):
            assert len(np.unique(init.color[st_.color == c])) == 1
        again = wl2_stabilize(st_)
        assert again.num_colors == st_.num_colors
        cmp = wl_closure_vs_sring(G, X)
        assert cmp.unions_of_relations


@pytest.mark.parametrize("spec", ["9x2", "3x3x2", "9x5"])
def test_sring_colourings_are_stable(spec):
    for A in enumerate_srings(make_group(spec)).all:
        assert is_stable(sring_coloring(A))


def test_sring_colourings_are_stable_order45_sample():
    cat = enumerate_srings(make_group("5x3x3")).all
    for A in random.Random(2).sample(cat, 150):
        assert is_stable(sring_coloring(A))


@pytest.mark.parametrize("spec", ["9x2", "3x3x2"])
def test_certificate_agrees_with_joint_run(spec):
    G = make_group(spec)
    sets = sampled_sets(G, 15, seed=4)
    cols = [cayley_digraph(G, X) for X in sets]
    certs = [certificate(wl2_stabilize(c)) for c in cols]
    rng = random.Random(9)
    for _ in range(25):
        i, j = rng.randrange(len(sets)), rng.randrange(len(sets))
        assert wl2_equivalent(cols[i], cols[j]) == (certs[i] == certs[j])
    # each set and its automorphic image share a certificate
    assert all(certs[2 * k] == certs[2 * k + 1] for k in range(15))


def test_inverse_closed_sets():
    assert len(inverse_closed_sets(make_group([9, 2]))) == 512
    assert len(inverse_closed_sets(make_group([3, 3, 2]))) == 512
    assert all(len(s) % 2 == 0 for s in inverse_closed_sets(make_group([9])))


def test_small_wl_sweep():
    G = make_group([12])
    items = [(G, X) for X in inverse_closed_sets(G)]
    res = wl_sweep(items, joint_samples=20, seed=1)
    assert res.ok and res.iso_classes == res.wl_classes


def _nx(adj):
    return nx.from_numpy_array(adj.astype(int), create_using=nx.DiGraph)


@given(st.integers(3, 9), st.integers(0, 2**31), st.booleans())
def test_iso_oracle_matches_networkx(n, seed, relabel):
    rng = np.random.default_rng(seed)
    a = rng.random((n, n)) < 0.4
    np.fill_diagonal(a, False)
    if relabel:
        perm = rng.permutation(n)
        b = a[np.ix_(perm, perm)]
    else:
        b = rng.random((n, n)) < 0.4
        np.fill_diagonal(b, False)
    f = graph_isomorphism(a, b)
    assert (f is not None) == nx.is_isomorphic(_nx(a), _nx(b))
    if f is not None:
        assert np.array_equal(b[np.ix_(f, f)], a)
        assert closed_walk_invariant(a) == closed_walk_invariant(b)


def test_iso_classes_on_circulants():
    G = make_group([8])
    adjs = [cayley_adjacency(G, X) for X in inverse_closed_sets(G)]
    cls = iso_classes(adjs)
    graphs = [nx.from_numpy_array(a.astype(int)) for a in adjs]
    for i in range(len(adjs)):
        for j in range(i):
            assert (cls[i] == cls[j]) == nx.is_isomorphic(graphs[i], graphs[j])


def test_graph_json_round_trip():
    adj = cayley_adjacency(C6, [1, 5])
    assert np.array_equal(graph_from_json(graph_to_json(adj)), adj)
    assert np.array_equal(graph_from_json({"group": "6", "connection_set": [1, 5]}), adj)
