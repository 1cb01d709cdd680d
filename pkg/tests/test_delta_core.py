import itertools
from math import comb

import pytest

from thetaspaces.delta_core import (Functor, OrdinalMap, check_category_equivalence, check_groupoid_equivalence,
                                    discrete, enumerate_functors, enumerate_ordinal_maps, groupoid_core,
                                    identity_functor, iso_chain, ordinal, product, terminal)


@pytest.mark.parametrize("m,n,count", [(0, 3, 4), (1, 1, 3), (1, 2, 6)])
def test_ordinal_map_counts(m, n, count):
    assert len(enumerate_ordinal_maps(m, n)) == count


def test_ordinal_map_count_formula():
    for m in range(6):
        for n in range(6):
            assert len(enumerate_ordinal_maps(m, n)) == comb(m + n + 1, m + 1)


def test_ordinal_composition_is_associative_and_unital():
    maps = {(m, n): enumerate_ordinal_maps(m, n) for m in range(4) for n in range(4)}
    for a, b, c in itertools.product(range(3), repeat=3):
        for f in maps[(a, b)]:
            assert f.compose(OrdinalMap.identity(a)) == f == OrdinalMap.identity(b).compose(f)
            for g in maps[(b, c)]:
                for h in maps[(c, 2)]:
                    assert h.compose(g.compose(f)) == h.compose(g).compose(f)


def test_non_monotone_map_rejected():
    with pytest.raises(AssertionError):
        OrdinalMap(1, 1, (1, 0))


def test_iso_chain_shapes():
    assert len(iso_chain(0).objects) == 1 and len(iso_chain(0).morphisms) == 1
    I = iso_chain(1)
    assert len(I.objects) == 2 and len(I.morphisms) == 4
    I2 = iso_chain(2)
    assert len(I2.objects) == 3 and len(I2.morphisms) == 9
    for x in I2.objects:
        for y in I2.objects:
            assert len(I2.hom(x, y)) == 1


@pytest.mark.parametrize("m", range(4))
def test_functors_into_walking_iso(m):
    assert len(enumerate_functors(ordinal(m), iso_chain(1))) == 2 ** (m + 1)


def test_functor_counts():
    assert len(enumerate_functors(iso_chain(2), terminal())) == 1
    assert len(enumerate_functors(product(ordinal(1), iso_chain(1)), ordinal(1))) == 3


def test_functor_composition_closed():
    C, D, E = ordinal(1), iso_chain(1), ordinal(2)
    second = set(enumerate_functors(C, E))
    for F in enumerate_functors(C, D):
        for G in enumerate_functors(D, E):
            assert G.compose(F) in second


def test_category_equivalences():
    I, pt = iso_chain(1), terminal()
    to_point = enumerate_functors(I, pt)[0]
    assert check_category_equivalence(to_point)
    assert check_category_equivalence(identity_functor(ordinal(2)))
    endpoint = Functor(ordinal(0), ordinal(1), (0,), (ordinal(1).identities[0],))
    rep = check_category_equivalence(endpoint)
    assert not rep and rep.counterexample[0] == "not essentially surjective"


def test_groupoid_core():
    assert len(groupoid_core(iso_chain(1)).morphisms) == 4
    core = groupoid_core(ordinal(1))
    assert len(core.objects) == 2 and len(core.morphisms) == 2
    assert len(groupoid_core(terminal()).morphisms) == 1


def test_groupoid_equivalences():
    for p in range(4):
        assert check_groupoid_equivalence(groupoid_core(iso_chain(p)), groupoid_core(terminal()))
    assert not check_groupoid_equivalence(groupoid_core(discrete([0, 1])), groupoid_core(discrete([0, 1, 2])))
    G = groupoid_core(iso_chain(2))
    assert check_groupoid_equivalence(G, G)


def test_equivalence_checkers_agree_on_groupoids():
    G, H = groupoid_core(iso_chain(1)), groupoid_core(terminal())
    for F in enumerate_functors(G, H):
        assert bool(check_category_equivalence(F)) == bool(check_groupoid_equivalence(G, H))
