import itertools
from collections import Counter

import pytest
from hypothesis import settings

settings.register_profile("ci", deadline=None, max_examples=40)
settings.load_profile("ci")


def axioms_hold(G, classes) -> bool:
    """Independent S-ring check by expanding every class-sum product with plain Python."""
    classes = [frozenset(X) for X in classes]
    if frozenset([0]) not in classes:
        return False
    where = {x: i for i, X in enumerate(classes) for x in X}
    for X in classes:
        if frozenset(int(G.neg[x]) for x in X) not in classes:
            return False
    for X, Y in itertools.combinations_with_replacement(classes, 2):
        coef = Counter(G.add(x, y) for x in X for y in Y)
        for Z in classes:
            if len({coef.get(z, 0) for z in Z}) > 1:
                return False
    return bool(where)


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def brute_srings(G):
    return {
        frozenset(frozenset(X) for X in [[0]] + p)
        for p in set_partitions(list(range(1, G.order)))
        if axioms_hold(G, [[0]] + p)
    }


@pytest.fixture
def C15():
    from schurkit.abelian import make_group

    return make_group([15])


@pytest.fixture
def A0_15(C15):
    from schurkit.products import cyclotomic_multipliers

    return cyclotomic_multipliers(C15, [2])
