import pytest

from thetaspaces.completion import (MATERIALIZE_LIMIT, classifying_diagram_level, eta, precompletion,
                                    precompletion_level, q_level, q_presheaf, total_eta, total_precompletion,
                                    verify_eta_properties)
from thetaspaces.delta_core import check_groupoid_equivalence, groupoid_core, iso_chain, ordinal, terminal
from thetaspaces.presheaf_engine import Nerve, Representable, truncated_hom, window_slots
from thetaspaces.reports import SizeGuardExceeded
from thetaspaces.segal_complete import check_dk, check_levelwise_bijection, check_segal, presented_groupoid
from thetaspaces.strict_ncat import (from_category, iso_chain_flat, ordinal_ncat, suspension, theta_ncat)
from thetaspaces.theta_cell import ordinal_object, parse_theta, point_at, theta_objects

I_FLAT = iso_chain_flat(1, 1)
SIGMA_I = suspension(I_FLAT)


def test_classifying_diagram_examples():
    assert classifying_diagram_level(ordinal(1), 0, 1).count == 2
    assert classifying_diagram_level(iso_chain(1), 0, 1).count == 4
    for m in range(4):
        for p in range(4):
            assert classifying_diagram_level(terminal(), m, p).count == 1


def test_classifying_diagram_counts_without_materializing():
    level = classifying_diagram_level(iso_chain(2), 3, 3)
    assert level.count == 3 ** 16 and level.count > MATERIALIZE_LIMIT
    assert level.elements is None and level.provenance == "grid"
    small = classifying_diagram_level(iso_chain(1), 1, 1, present=True)
    assert len(small.elements) == small.count == 16
    assert small.to_json()["groupoid"]["components"] == 1


def test_q_levels():
    # from k = 2 on the recursion bottoms out in V[0], the point; Q^1 at [0] is F[0] x E(p) instead
    for n, k in ((2, 2), (3, 2), (3, 3)):
        for p in range(3):
            for probe in theta_objects(n, 2):
                assert len(q_level(k, point_at(n), p, probe)) == Representable(point_at(n)).count(probe)
    assert len(q_level(1, point_at(1), 2, point_at(1))) == 3
    assert len(q_level(1, ordinal_object(1), 1, ordinal_object(1))) == 12
    for p in range(3):
        assert len(q_level(2, parse_theta("[1]([0])"), p, point_at(2))) == 2


def test_precompletion_matches_grid():
    for C in (ordinal(2), iso_chain(1), iso_chain(2)):
        T = precompletion(from_category(C), 1)
        for m in range(3):
            for p in range(3):
                assert T.count(ordinal_object(m), p) == classifying_diagram_level(C, m, p).count


def test_sigma_i_values():
    x = parse_theta("[1]([0])")
    for p in range(4):
        assert precompletion_level(SIGMA_I, 2, x, p).count == 2 + 2 ** (p + 1)
        assert precompletion_level(SIGMA_I, 2, point_at(2), p).count == 2


def test_gaunt_levels_collapse():
    for A in (ordinal_ncat(2), theta_ncat(parse_theta("[1]([1])"))):
        for k in range(1, A.n + 1):
            T = precompletion(A, k)
            for x in theta_objects(A.n, 2):
                for p in range(3):
                    assert T.count(x, p) == Nerve(A).count(x)


def test_gaunt_fixed_points_are_idempotent():
    # eta is a levelwise bijection for gaunt input, so a second application sees the same nerve again
    A = ordinal_ncat(2)
    T = precompletion(A, 1)
    e = eta(A, 1)
    assert check_levelwise_bijection(e, theta_objects(1, 3), (0, 1, 2))
    assert check_segal(T, theta_objects(1, 2), (0, 1))


def test_eta_examples():
    e = eta(I_FLAT, 1)
    image = {e(point_at(1), 1, a) for a in e.source.eval(point_at(1), 1)}
    assert len(image) == 2 and e.target.count(point_at(1), 1) == 4
    e2 = eta(SIGMA_I, 2)
    assert check_levelwise_bijection(e2, [point_at(2)], (0, 1, 2))


def test_verify_eta_properties():
    for A, k in ((I_FLAT, 1), (SIGMA_I, 1), (SIGMA_I, 2), (ordinal_ncat(2), 1)):
        reports = verify_eta_properties(A, k)
        assert all(r.verdict for r in reports.values()), {n: r.counterexample for n, r in reports.items()}
    T = precompletion(I_FLAT, 1)
    for p in range(4):
        assert T.count(point_at(1), p) == 2 ** (p + 1)
    assert check_groupoid_equivalence(presented_groupoid(T, point_at(1)), groupoid_core(terminal()))


def test_underlying_space_unchanged_for_sigma2_i():
    S2 = suspension(SIGMA_I)
    rep = verify_eta_properties(S2, 3, max_arity=2, degrees=(0, 1))
    assert rep["underlying"].verdict and rep["monomorphism"].verdict


def test_total_precompletion():
    C = iso_chain(1)
    T = total_precompletion(from_category(C))
    for m in range(3):
        for p in range(3):
            assert T.count(ordinal_object(m), p) == classifying_diagram_level(C, m, p).count
    A = theta_ncat(parse_theta("[1]([1])"))
    for x in theta_objects(2, 2):
        for p in range(2):
            assert total_precompletion(A).count(x, p) == Nerve(A).count(x)
    T2 = total_precompletion(SIGMA_I)
    for p in range(3):
        assert T2.count(point_at(2), p) == 2
    assert [T2.count(parse_theta("[1]([0])"), p) for p in range(3)] == [4, 6, 10]


def test_total_precompletion_agrees_with_oracle():
    # on the underlying Theta_1 shapes the total precompletion of Sigma I agrees with T2 and its oracle
    T = total_precompletion(SIGMA_I)
    slots = window_slots(2, 3)
    for x in (point_at(2), parse_theta("[1]([0])"), parse_theta("[2]([0],[0])")):
        for p in range(3):
            oracle = truncated_hom(q_presheaf(2, x, p), Nerve(SIGMA_I), slots, keep=False).count
            assert T.count(x, p) == oracle


def test_total_eta_is_dk_for_sigma_i():
    assert check_dk(total_eta(SIGMA_I))


def test_size_guards():
    with pytest.raises(SizeGuardExceeded):
        precompletion_level(I_FLAT, 1, ordinal_object(1), 9)
    with pytest.raises(SizeGuardExceeded):
        precompletion_level(I_FLAT, 1, ordinal_object(7), 0)
    with pytest.raises(SizeGuardExceeded):
        total_precompletion(suspension(SIGMA_I))
    assert precompletion_level(ordinal_ncat(1), 1, ordinal_object(1), 5, force=True).count == 3


def test_presented_level_json():
    level = precompletion_level(SIGMA_I, 2, parse_theta("[1]([0])"), 1, present=True)
    data = level.to_json()
    assert data["count"] == 6 and data["provenance"] == "recursive"
    assert data["groupoid"]["objects"] == 4
