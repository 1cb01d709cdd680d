import random

import pytest

from thetaspaces.delta_core import enumerate_functors, iso_chain, ordinal, product as cat_product
from thetaspaces.presheaf_engine import Nerve, Representable
from thetaspaces.strict_ncat import (NCatSyntaxError, enumerate_nfunctors, equivalence_cells, from_category, glue_many,
                                     hom_ncat_object, is_gaunt_in_dimension, is_isomorphic, iso_chain_flat,
                                     nerve_level, ordinal_ncat, parse_ncat, product, suspension, terminal_ncat,
                                     theta_ncat)
from thetaspaces.theta_cell import hom_theta, ordinal_object, parse_theta, theta_objects

I_FLAT = iso_chain_flat(1, 1)
SIGMA_I = suspension(I_FLAT)
SIGMA2_I = suspension(SIGMA_I)


def test_suspension_homs():
    assert len(SIGMA_I.cells[0]) == 2
    x, y = SIGMA_I.cells[0]
    assert is_isomorphic(hom_ncat_object(SIGMA_I, x, y), I_FLAT)
    assert len(hom_ncat_object(SIGMA_I, y, x).cells[0]) == 0
    loop = hom_ncat_object(SIGMA_I, x, x)
    assert len(loop.cells[0]) == 1


def test_glue_realizes_theta_object():
    glued = glue_many([suspension(ordinal_ncat(2)), suspension(ordinal_ncat(0)), suspension(ordinal_ncat(1))])
    assert is_isomorphic(glued, theta_ncat(parse_theta("[3]([2],[0],[1])")))


def test_product_with_terminal():
    assert is_isomorphic(product(SIGMA_I, terminal_ncat(2)), SIGMA_I)


@pytest.mark.parametrize("m", range(4))
def test_nerve_of_walking_iso(m):
    assert len(nerve_level(I_FLAT, ordinal_object(m))) == 2 ** (m + 1)


def test_nerve_levels():
    assert len(nerve_level(SIGMA_I, parse_theta("[1]([1])"))) == 6
    for x in theta_objects(2, 3):
        assert len(nerve_level(terminal_ncat(2), x)) == 1


def test_nerve_of_theta_object_is_representable():
    rng = random.Random(0)
    objects = theta_objects(2, 3)
    for _ in range(20):
        a, b = rng.choice(objects), rng.choice(objects)
        assert len(nerve_level(theta_ncat(b), a)) == len(hom_theta(a, b))
        assert Nerve(theta_ncat(b)).count(a) == Representable(b).count(a)


def test_functor_enumeration():
    for A in (I_FLAT, SIGMA_I, ordinal_ncat(2)):
        assert len(enumerate_nfunctors(terminal_ncat(A.n), A)) == len(A.cells[0])
        assert len(enumerate_nfunctors(A, terminal_ncat(A.n))) == 1
    square = from_category(cat_product(ordinal(1), iso_chain(1)))
    assert len(enumerate_nfunctors(square, ordinal_ncat(1))) == 3
    assert len(enumerate_nfunctors(square, ordinal_ncat(1))) == len(
        enumerate_functors(cat_product(ordinal(1), iso_chain(1)), ordinal(1)))


def test_equivalence_cells_and_gauntness():
    assert set(equivalence_cells(I_FLAT, 1)) == set(I_FLAT.cells[1])
    assert set(equivalence_cells(ordinal_ncat(1), 1)) == set(ordinal_ncat(1).identity_cells(1))
    assert set(equivalence_cells(SIGMA2_I, 3)) == set(SIGMA2_I.cells[3])
    assert [is_gaunt_in_dimension(SIGMA2_I, k) for k in (1, 2, 3)] == [True, True, False]
    assert not is_gaunt_in_dimension(I_FLAT, 1)
    for m in range(4):
        assert is_gaunt_in_dimension(ordinal_ncat(m), 1)
    A = theta_ncat(parse_theta("[2]([1],[0])"))
    assert all(is_gaunt_in_dimension(A, k) for k in (1, 2))


def test_equivalence_cells_closed_under_composition():
    for A, k in ((SIGMA2_I, 3), (I_FLAT, 1), (SIGMA_I, 2)):
        eq = set(equivalence_cells(A, k))
        assert set(A.identity_cells(k)) <= eq
        for (kk, j), table in A.comp_.items():
            if kk == k:
                for (g, f), h in table.items():
                    if g in eq and f in eq:
                        assert h in eq


def test_parse_ncat():
    assert is_isomorphic(parse_ncat("ord(3)"), ordinal_ncat(3))
    assert is_isomorphic(parse_ncat("susp(susp(isochain(1)@1))"), SIGMA2_I)
    assert is_isomorphic(parse_ncat("prod(ord(1),term@1)"), ordinal_ncat(1))
    with pytest.raises(NCatSyntaxError):
        parse_ncat("susp(ord(1)")
