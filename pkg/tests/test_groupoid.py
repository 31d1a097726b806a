"""The corrected action, cocycle pairs, and the groupoid laws."""

from fractions import Fraction

import pytest

from negcurve.extensions import ExtClass, ModuliParams, TransitionMatrix, restrict_level
from negcurve.groupoid import (CocyclePair, GroupElem, act, cocycle_matrices,
                               extract_group_elem, induced_inverse, induced_product,
                               sample_ext_class, sample_group_elem, substream,
                               verify_groupoid)
from negcurve.ring import RingElem, RingParams, invert_unit, sector_split, truncate


def params_of(k, j, m):
    return ModuliParams(RingParams(k, m), j)


MP = params_of(1, 2, 3)


def gelem(params, a, b, c, d):
    return GroupElem.from_reps(params, a, b, c, d)


def mobius_series(g, p):
    """Independent oracle: the fractional-linear formula evaluated by a
    truncated geometric series, then projected to the band sector.

    Agrees with the corrected action whenever the chart corrections of
    the cocycle pair vanish, e.g. for c = 0 or the worked c = z example.
    """
    params = g.params
    j = params.j
    numer = g.a.rep * p.p - g.b.rep.shift(j)
    denom = g.d.rep - (p.p * g.c.rep).shift(-j)
    full = numer * invert_unit(denom)
    full_high = full.select(lambda l, i: i >= 1)
    return ExtClass(params, sector_split(full_high, j).good)


# -- the action ---------------------------------------------------------------

def test_identity_acts_trivially():
    e = GroupElem.identity(MP)
    for vec in ([0, 0, 0], [1, 2, 5], [0, 0, 1]):
        p = ExtClass.from_vector(MP, vec)
        assert act(e, p) == p


def test_diagonal_scaling():
    g = GroupElem.diagonal(MP, 2, 1)
    p = ExtClass.from_vector(MP, [1, 1, 1])
    assert act(g, p).to_vector() == [2, 2, 2]


def test_lower_triangular_example():
    # a = d = 1, c = z moves (0,1,0) to (0,1,1); cross-checked against
    # the series oracle, whose corrections vanish here.
    ring = MP.ring
    g = gelem(MP, RingElem.one(ring), RingElem.zero(ring),
              RingElem.monomial(ring, 1, 0), RingElem.one(ring))
    p = ExtClass.from_vector(MP, [0, 1, 0])
    q = act(g, p)
    assert q.to_vector() == [0, 1, 1]
    assert q == mobius_series(g, p)


def test_action_matches_series_for_vanishing_c():
    for (k, j, m) in [(1, 2, 3), (1, 3, 4), (2, 3, 3)]:
        params = params_of(k, j, m)
        for idx in range(40):
            rng = substream(1001, idx)
            g_full = sample_group_elem(params, rng)
            g = gelem(params, g_full.a.rep, g_full.b.rep,
                      RingElem.zero(params.ring), g_full.d.rep)
            p = sample_ext_class(params, rng)
            assert act(g, p) == mobius_series(g, p)


def test_first_level_action_is_scaling():
    # At m = 2 the orbit of p is its line: act(g, p) = (a00/d00) * p.
    for (k, j) in [(1, 2), (1, 3), (2, 3)]:
        params = params_of(k, j, 2)
        for idx in range(40):
            rng = substream(77, idx)
            g = sample_group_elem(params, rng)
            p = sample_ext_class(params, rng)
            scalar = g.a.rep.coeff(0, 0) / g.d.rep.coeff(0, 0)
            assert act(g, p).p == p.p.scale(scalar)


def test_act_rejects_mismatched_params():
    g = GroupElem.identity(MP)
    p = ExtClass.zero(params_of(1, 2, 2))
    with pytest.raises(ValueError, match="mismatched"):
        act(g, p)


# -- cocycle pairs ------------------------------------------------------------

def test_identity_pair_is_identity_matrix():
    p = ExtClass.from_vector(MP, [1, 2, 5])
    pair = cocycle_matrices(GroupElem.identity(MP), p)
    from negcurve.extensions import Mat2

    assert pair.A == Mat2.identity(MP.ring)
    assert pair.B == Mat2.identity(MP.ring)


def test_diagonal_pair_has_no_corrections():
    g = GroupElem.diagonal(MP, 3, Fraction(1, 2))
    p = ExtClass.from_vector(MP, [1, 0, 2])
    pair = cocycle_matrices(g, p)
    ring = MP.ring
    assert pair.A.a11 == RingElem.constant(ring, 3)
    assert pair.A.a22 == RingElem.constant(ring, Fraction(1, 2))
    assert pair.A.a12.is_zero() and pair.A.a21.is_zero()
    assert pair.B == pair.A


def test_pair_intertwines_exactly():
    ring = MP.ring
    g = gelem(MP, RingElem.one(ring), RingElem.zero(ring),
              RingElem.monomial(ring, 1, 0), RingElem.one(ring))
    p = ExtClass.from_vector(MP, [0, 1, 0])
    q = act(g, p)
    pair = cocycle_matrices(g, p)
    assert pair.intertwines(p, q)
    assert pair.is_chart_regular()
    t_p = TransitionMatrix(MP, p).matrix()
    t_q = TransitionMatrix(MP, q).matrix()
    assert pair.B * t_p == t_q * pair.A


def test_pair_intertwines_with_large_c_corrections():
    # c of top z-degree forces nonzero chart corrections in both A and B.
    params = params_of(1, 3, 3)
    ring = params.ring
    g = gelem(params, RingElem.one(ring), RingElem.zero(ring),
              RingElem.monomial(ring, 6, 0), RingElem.one(ring))
    p = ExtClass(params, RingElem.monomial(ring, -1, 1))
    q = act(g, p)
    pair = cocycle_matrices(g, p)
    assert pair.intertwines(p, q)
    assert pair.is_chart_regular()
    assert not (pair.A.a11 - g.a.rep).is_zero()  # corrections present
    # The series formula disagrees here; only the pair condition is right.
    assert mobius_series(g, p) != q


def test_extract_round_trip_sampled():
    for (k, j, m) in [(1, 2, 3), (2, 3, 4), (3, 3, 2)]:
        params = params_of(k, j, m)
        for idx in range(30):
            rng = substream(4242, idx)
            g = sample_group_elem(params, rng)
            p = sample_ext_class(params, rng)
            q = act(g, p)
            pair = cocycle_matrices(g, p)
            assert extract_group_elem(pair, p, q) == g


def test_extract_identity_and_diagonal():
    p = ExtClass.from_vector(MP, [1, 2, 5])
    e = GroupElem.identity(MP)
    assert extract_group_elem(cocycle_matrices(e, p), p, p) == e
    g = GroupElem.diagonal(MP, 5, 1)
    q = act(g, p)
    assert extract_group_elem(cocycle_matrices(g, p), p, q) == g


def test_extract_rejects_garbage():
    from negcurve.extensions import Mat2

    ring = MP.ring
    p = ExtClass.from_vector(MP, [1, 0, 0])
    bad = CocyclePair(MP, Mat2(RingElem.one(ring), RingElem.zero(ring),
                               RingElem.zero(ring), RingElem.monomial(ring, 1, 1)),
                      Mat2.identity(ring))
    with pytest.raises(ValueError, match="normalized cocycle pair"):
        extract_group_elem(bad, p, p)


def test_extract_rejects_degenerate_determinant():
    from negcurve.extensions import Mat2

    ring = MP.ring
    p = ExtClass.zero(MP)
    u = RingElem.monomial(ring, 0, 1)
    pair = CocyclePair(MP, Mat2(u, RingElem.zero(ring), RingElem.zero(ring), u),
                       Mat2(u, RingElem.zero(ring), RingElem.zero(ring), u))
    with pytest.raises(ValueError, match="not invertible"):
        extract_group_elem(pair, p, p)


# -- induced product and inverse ----------------------------------------------

def test_diagonal_product():
    g1 = GroupElem.diagonal(MP, 2, 1)
    g2 = GroupElem.diagonal(MP, 3, 1)
    for vec in ([0, 0, 0], [1, 2, 5]):
        p = ExtClass.from_vector(MP, vec)
        assert induced_product(g1, g2, p) == GroupElem.diagonal(MP, 6, 1)


def test_product_at_origin_is_matrix_product():
    zero = ExtClass.zero(MP)
    for idx in range(25):
        rng = substream(31337, idx)
        g1 = sample_group_elem(MP, rng)
        g2 = sample_group_elem(MP, rng)
        assert induced_product(g1, g2, zero) == g1.matrix_product(g2)


def test_product_compatibility_and_pair_multiplicativity():
    for (k, j, m) in [(1, 2, 3), (2, 3, 3)]:
        params = params_of(k, j, m)
        for idx in range(25):
            rng = substream(999, idx)
            g1 = sample_group_elem(params, rng)
            g2 = sample_group_elem(params, rng)
            p = sample_ext_class(params, rng)
            h = induced_product(g1, g2, p)
            q = act(g2, p)
            assert act(h, p) == act(g1, q)
            pair = cocycle_matrices(g1, q).compose(cocycle_matrices(g2, p))
            assert pair.A == cocycle_matrices(h, p).A
            assert pair.B == cocycle_matrices(h, p).B


def test_inverse_of_identity_and_diagonal():
    p = ExtClass.from_vector(MP, [1, 2, 5])
    e = GroupElem.identity(MP)
    assert induced_inverse(e, p) == e
    g = GroupElem.diagonal(MP, 4, 1)
    assert induced_inverse(g, p) == GroupElem.diagonal(MP, Fraction(1, 4), 1)


def test_inverse_laws_sampled():
    e = GroupElem.identity(MP)
    for idx in range(25):
        rng = substream(2718, idx)
        g = sample_group_elem(MP, rng)
        p = sample_ext_class(MP, rng)
        q = act(g, p)
        ginv = induced_inverse(g, p)
        assert act(ginv, q) == p
        assert induced_product(ginv, g, p) == e
        assert induced_product(g, ginv, q) == e


def test_truncation_commutes_with_everything():
    for (k, j, m) in [(1, 2, 3), (1, 3, 4), (2, 3, 4)]:
        params = params_of(k, j, m)
        for idx in range(20):
            rng = substream(55, idx)
            g1 = sample_group_elem(params, rng)
            g2 = sample_group_elem(params, rng)
            p = sample_ext_class(params, rng)
            m_new = m - 1
            tp = restrict_level(p, m_new)
            assert act(g1.truncated(m_new), tp) == restrict_level(act(g1, p), m_new)
            assert (induced_product(g1.truncated(m_new), g2.truncated(m_new), tp)
                    == induced_product(g1, g2, p).truncated(m_new))
            assert (induced_inverse(g1.truncated(m_new), tp)
                    == induced_inverse(g1, p).truncated(m_new))


# -- group element plumbing ----------------------------------------------------

def test_group_elem_validation():
    ring = MP.ring
    with pytest.raises(ValueError, match="not invertible"):
        gelem(MP, RingElem.zero(ring), RingElem.zero(ring),
              RingElem.zero(ring), RingElem.one(ring))
    with pytest.raises(ValueError):
        # b support violates the O(-2j) bound
        gelem(MP, RingElem.one(ring), RingElem.monomial(ring, 1, 1),
              RingElem.zero(ring), RingElem.one(ring))


def test_group_elem_json_round_trip():
    rng = substream(12, 0)
    g = sample_group_elem(MP, rng)
    assert GroupElem.from_dict(g.to_dict(), MP) == g
    bad = g.to_dict()
    bad["extra"] = []
    with pytest.raises(ValueError, match="unknown fields"):
        GroupElem.from_dict(bad, MP)


# -- randomized axiom verification ---------------------------------------------

def test_verify_groupoid_smoke():
    report = verify_groupoid(params_of(1, 2, 3), 60, 7, truncation_samples=30)
    assert report["all_passed"]
    assert report["families"]["associativity"]["checked"] == 60
    assert report["families"]["truncation"]["checked"] == 30
    assert report["families"]["roundtrip"]["passed"] == 60


def test_verify_groupoid_degenerate_band():
    # Empty band: only p = 0; all laws hold trivially but are still run.
    report = verify_groupoid(params_of(3, 1, 3), 25, 1)
    assert report["dim_W"] == 0
    assert report["all_passed"]


def test_verify_groupoid_deterministic_across_workers():
    a = verify_groupoid(params_of(1, 2, 3), 30, 99, truncation_samples=10, workers=1)
    b = verify_groupoid(params_of(1, 2, 3), 30, 99, truncation_samples=10, workers=2)
    assert a == b
