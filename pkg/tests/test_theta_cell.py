import random

import pytest

from thetaspaces.delta_core import enumerate_ordinal_maps
from thetaspaces.theta_cell import (ThetaSyntaxError, compose, dimension, hom_theta, identity, ordinal_object,
                                    parse_theta, pi_morphism, pi_object, point_at, suspend_object, tau_morphism,
                                    tau_object, theta_objects)


def test_parse_and_print_round_trip():
    for text in ("[3]([2],[0],[1])", "[1]([0])", "[0]", "[2]([1]([0]),[0])"):
        assert str(parse_theta(text)) == text
    for x in theta_objects(2, 3):
        assert parse_theta(str(x), depth=2) == x


def test_parse_error():
    with pytest.raises(ThetaSyntaxError):
        parse_theta("[2]([1]")


def test_dimension():
    assert dimension(parse_theta("[3]([2],[0],[1])")) == 2
    assert dimension(point_at(0)) == 0
    x = point_at(0)
    for k in range(1, 4):
        x = suspend_object(x)
        assert dimension(x) == k


def test_suspension():
    assert suspend_object(point_at(0)) == parse_theta("[1]")
    assert suspend_object(point_at(1)) == parse_theta("[1]([0])")
    assert suspend_object(ordinal_object(2)) == parse_theta("[1]([2])")


def test_hom_counts():
    for x in theta_objects(2, 3):
        assert len(hom_theta(point_at(2), x)) == x.arity + 1
        assert identity(x) in hom_theta(x, x)
    assert len(hom_theta(parse_theta("[1]([0])"), parse_theta("[1]([1])"))) == 4


def test_theta_one_is_delta():
    rng = random.Random(0)
    for _ in range(50):
        a, b, c = (rng.randint(0, 3) for _ in range(3))
        f = rng.choice(hom_theta(ordinal_object(a), ordinal_object(b)))
        g = rng.choice(hom_theta(ordinal_object(b), ordinal_object(c)))
        assert compose(g, f).delta == g.delta.compose(f.delta)
    assert len(hom_theta(ordinal_object(2), ordinal_object(3))) == len(enumerate_ordinal_maps(2, 3))


def test_composition_laws_in_theta_two():
    rng = random.Random(1)
    objects = theta_objects(2, 3)
    for x in objects[:12]:
        for f in hom_theta(x, rng.choice(objects)):
            assert compose(identity(f.target), f) == f == compose(f, identity(f.source))
    checked = 0
    while checked < 100:
        a, b, c, d = (rng.choice(objects) for _ in range(4))
        fs, gs, hs = hom_theta(a, b), hom_theta(b, c), hom_theta(c, d)
        if not (fs and gs and hs):
            continue
        f, g, h = rng.choice(fs), rng.choice(gs), rng.choice(hs)
        assert compose(h, compose(g, f)) == compose(compose(h, g), f)
        assert compose(g, f) in hom_theta(a, c)
        checked += 1


def test_truncation_functors():
    assert pi_object(parse_theta("[3]([2],[0],[1])"), 1) == parse_theta("[3]")
    assert tau_object(parse_theta("[2]"), 2) == parse_theta("[2]([0],[0])")
    for n in (2, 3):
        for k in range(n + 1):
            for x in theta_objects(k, 3):
                assert pi_object(tau_object(x, n), k) == x
            for x in theta_objects(k, 2):
                for y in theta_objects(k, 2):
                    for f in hom_theta(x, y):
                        assert pi_morphism(tau_morphism(f, n), k) == f
