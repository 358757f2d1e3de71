import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import (
    birkhoff_perm_elimination,
    bruhat_perm_elimination,
    leibniz_det,
    twisted_perms_elimination,
)
from tnnflag.ratmat import RationalMatrix
from tnnflag.slgroup import (
    LeviContext,
    all_perms_weyl,
    birkhoff_cell,
    bruhat_cell,
    chart_membership,
    conj_twisted_borel_minus,
    conj_twisted_borel_plus,
    gen_torus,
    gen_x,
    gen_y,
    in_levi,
    in_parabolic_minus,
    in_parabolic_plus,
    in_twisted_borel_minus,
    in_twisted_borel_plus,
    in_twisted_unipotent_minus,
    in_twisted_unipotent_plus,
    in_unipotent_radical_minus,
    in_unipotent_radical_plus,
    iota,
    jc_chart,
    jc_chart_inv,
    perm_of,
    pi_J,
    same_flag,
    sdot,
    sigma_factor,
    twisted_cells,
    verify_gkl_memberships,
    verify_xy_identities,
    wdot,
    wdot_inv_of,
    wdot_of,
    weyl_ctx,
)
from tnnflag.verify import subsets
from tnnflag.weyl import from_word, identity

F = Fraction
entries = st.sampled_from([F(0), F(0), F(1), F(-1), F(2), F(1, 2), F(-3, 2)])


def w(n, word):
    return from_word(weyl_ctx(n), list(word))


def rand_unit_lower(rng, size):
    return RationalMatrix([[F(rng.randint(-4, 4), rng.randint(1, 3)) if c < r else F(int(r == c))
                            for c in range(size)] for r in range(size)])


@st.composite
def invertible(draw, size=None):
    size = size or draw(st.integers(2, 4))
    m = RationalMatrix([[draw(entries) for _ in range(size)] for _ in range(size)])
    return m if m.det() != 0 else RationalMatrix.identity(size)


def test_generators():
    assert sdot(1, 1).rows == ((0, -1), (1, 0))
    assert gen_x(2, 1, 0) == RationalMatrix.identity(3)
    assert wdot(2, [1, 2, 1]) == wdot(2, [2, 1, 2])
    assert wdot(3, [1, 2, 1, 3, 2, 1]) == wdot(3, [3, 2, 3, 1, 2, 3])
    with pytest.raises(ValueError):
        gen_x(2, 3, 1)
    with pytest.raises(ValueError):
        gen_torus(2, 1, 0)


def test_signed_permutation_pattern():
    for x in all_perms_weyl(3):
        m = wdot_of(x)
        p = perm_of(x)
        assert all((m[i, j] != 0) == (p[j] == i) for i in range(4) for j in range(4))
        assert m * wdot_inv_of(x) == RationalMatrix.identity(4)


def test_iota_on_generators():
    a, b = F(3, 2), F(5)
    assert iota(gen_x(2, 1, a)) == gen_x(2, 1, -a)
    assert iota(gen_y(2, 2, a)) == gen_y(2, 2, -a)
    assert iota(gen_torus(2, 1, b)) == gen_torus(2, 1, b)


@settings(max_examples=100, deadline=None)
@given(invertible(), invertible())
def test_iota_is_involutive_automorphism(g, h):
    if g.size != h.size:
        return
    assert iota(iota(g)) == g
    assert iota(g * h) == iota(g) * iota(h)


def test_pi_J_examples():
    lc = LeviContext(2, [1])
    p = RationalMatrix([[1, 0, 0], [2, 1, 0], [3, 4, 1]])
    assert pi_J(lc, p) == RationalMatrix([[1, 0, 0], [2, 1, 0], [0, 0, 1]])
    ell = RationalMatrix([[2, 1, 0], [1, 1, 0], [0, 0, 1]])
    assert pi_J(lc, ell) == ell
    with pytest.raises(ValueError):
        pi_J(lc, RationalMatrix([[1, 0, 5], [0, 1, 0], [0, 0, 1]]))


def test_pi_J_homomorphism():
    rng = random.Random(4)
    for n in (2, 3):
        for J in subsets(range(1, n + 1)):
            lc = LeviContext(n, J)
            b = lc.block
            for _ in range(100 // (2 * len(subsets(range(1, n + 1)))) + 1):
                mats = []
                for _ in range(2):
                    m = RationalMatrix([[F(rng.randint(-3, 3)) if b[i] >= b[j] and i != j
                                         else F(int(i == j)) for j in range(n + 1)] for i in range(n + 1)])
                    mats.append(m * gen_torus(n, 1, F(2)))
                p, q = mats
                assert in_parabolic_minus(lc, p * q)
                assert pi_J(lc, p * q) == pi_J(lc, p) * pi_J(lc, q)


def test_cell_examples():
    eye = RationalMatrix.identity(3)
    e = identity(weyl_ctx(2))
    assert (birkhoff_cell(eye), bruhat_cell(eye)) == (e, e)
    assert bruhat_cell(sdot(2, 1)) == w(2, "1")
    y = gen_y(2, 1, 7)
    assert bruhat_cell(y) == w(2, "1") and birkhoff_cell(y) == e
    with pytest.raises(ValueError):
        bruhat_cell(RationalMatrix([[1, 1, 0], [1, 1, 0], [0, 0, 1]]))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_cells_match_elimination(data):
    size = data.draw(st.integers(2, 4))
    g = RationalMatrix([[data.draw(entries) for _ in range(size)] for _ in range(size)])
    if g.det() == 0:
        return
    assert perm_of(bruhat_cell(g)) == bruhat_perm_elimination(g)
    assert perm_of(birkhoff_cell(g)) == birkhoff_perm_elimination(g)
    J = data.draw(st.sets(st.integers(1, size - 1)))
    v, x = twisted_cells(LeviContext(size - 1, J), g)
    assert (perm_of(v), perm_of(x)) == twisted_perms_elimination(g, J)


def test_chart_examples():
    c1 = weyl_ctx(1)
    eye = RationalMatrix.identity(2)
    assert chart_membership(identity(c1), eye)
    assert not chart_membership(from_word(c1, ["1"]), eye)
    y = gen_y(1, 1, 1)
    assert chart_membership(identity(c1), y) and chart_membership(from_word(c1, ["1"]), y)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_chart_matches_minors(data):
    g = RationalMatrix([[data.draw(entries) for _ in range(3)] for _ in range(3)])
    if g.det() == 0:
        return
    u = data.draw(st.sampled_from(all_perms_weyl(2)))
    m = wdot_inv_of(u) * g
    expected = all(leibniz_det([r[:k] for r in m.rows[:k]]) != 0 for k in range(1, 4))
    assert chart_membership(u, g) == expected


def test_subgroup_patterns_agree_with_conjugation():
    rng = random.Random(8)
    for n in (2, 3):
        for J in subsets(range(1, n + 1)):
            lc = LeviContext(n, J)
            for _ in range(30):
                g = RationalMatrix([[F(rng.choice([0, 0, 0, 1, -2])) for _ in range(n + 1)] for _ in range(n + 1)])
                assert in_twisted_borel_plus(lc, g) == conj_twisted_borel_plus(lc, g)
                assert in_twisted_borel_minus(lc, g) == conj_twisted_borel_minus(lc, g)


def _random_in(pred, lc, rng):
    n = lc.n
    while True:
        g = RationalMatrix([[F(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n + 1)] for _ in range(n + 1)])
        g = g.map_entries(lambda i, j, x: x if pred(lc, _single(n, i, j)) else F(int(i == j)))
        if g.det() != 0 and pred(lc, g):
            return g


def _single(n, i, j):
    return RationalMatrix([[F(3) if (r, c) == (i, j) else F(int(r == c)) for c in range(n + 1)]
                           for r in range(n + 1)])


@pytest.mark.parametrize("pred", [in_parabolic_plus, in_parabolic_minus, in_levi, in_unipotent_radical_plus,
                                  in_unipotent_radical_minus, in_twisted_borel_plus, in_twisted_borel_minus,
                                  in_twisted_unipotent_plus, in_twisted_unipotent_minus])
def test_subgroups_closed(pred):
    rng = random.Random(pred.__name__)
    for n in (2, 3):
        for J in subsets(range(1, n + 1)):
            lc = LeviContext(n, J)
            for _ in range(5):
                a, b = _random_in(pred, lc, rng), _random_in(pred, lc, rng)
                assert pred(lc, a * b) and pred(lc, a.inverse())


def test_sigma_factor_examples():
    c1 = weyl_ctx(1)
    eye = RationalMatrix.identity(2)
    f = sigma_factor(identity(c1), [], eye)
    assert f.plus == eye and f.minus == eye
    y = gen_y(1, 1, 5)
    f = sigma_factor(identity(c1), [], y)
    assert f.minus == y and f.plus == eye
    with pytest.raises(ValueError):
        sigma_factor(identity(c1), [], gen_x(1, 1, 1))


def test_sigma_factor_round_trips():
    rng = random.Random(6)
    for r in all_perms_weyl(2):
        for J in subsets((1, 2)):
            for _ in range(25):
                g = wdot_of(r) * rand_unit_lower(rng, 3) * wdot_inv_of(r)
                f = sigma_factor(r, J, g)
                assert f.h1 * f.h2 == g and f.g1 * f.g2 == g


def test_jc_chart_examples():
    r = w(2, "1")
    p = wdot_of(r)
    plus, minus = jc_chart(r, [], p)
    assert same_flag(plus, p) and same_flag(minus, p)
    p = gen_y(2, 1, 2) * gen_y(2, 2, 3)
    plus, minus = jc_chart(r, [], p)
    assert (birkhoff_cell(plus), bruhat_cell(plus)) == (identity(r.ctx), r)
    assert (birkhoff_cell(minus), bruhat_cell(minus)) == (r, w(2, "12"))


def test_jc_chart_round_trips():
    rng = random.Random(9)
    done = 0
    for n in (2, 3):
        perms = all_perms_weyl(n)
        Js = subsets(range(1, n + 1))
        for k in range(100):
            r = rng.choice(perms)
            J = rng.choice(Js)
            p = wdot_of(r) * rand_unit_lower(rng, n + 1) * gen_x(n, 1, F(rng.randint(-2, 2)))
            plus, minus = jc_chart(r, J, p)
            assert same_flag(jc_chart_inv(r, J, plus, minus), p)
            done += 1
    assert done == 200


def test_xy_identity_examples():
    x, y, t = (lambda a: gen_x(1, 1, a)), (lambda a: gen_y(1, 1, a)), (lambda b: gen_torus(1, 1, b))
    assert x(1) * y(1) == y(F(1, 2)) * t(2) * x(F(1, 2))
    assert x(F(1, 3)) * y(-1) == y(F(-3, 2)) * t(F(2, 3)) * x(F(1, 2))
    assert gen_x(2, 1, 3) * gen_y(2, 2, 5) == gen_y(2, 2, 5) * gen_x(2, 1, 3)


def test_xy_identities_random():
    rng = random.Random(1)
    triples = [(F(rng.randint(1, 9), rng.randint(1, 9)), F(rng.randint(1, 9), rng.randint(1, 9)),
                F(rng.randint(0, 9), rng.randint(1, 9))) for _ in range(30)]
    assert verify_xy_identities(3, triples)["ok"]
    broken = verify_xy_identities(3, triples, ident_x=lambda i, a: gen_x(3, i, 2 * a))
    assert not broken["ok"] and broken["failures"][0]["lhs"] != broken["failures"][0]["rhs"]


def test_gkl_examples():
    assert verify_gkl_memberships(w(1, "1"), w(1, ""), [[F(2)], [F(1, 3)]])["ok"]
    rng = random.Random(2)
    params = [[F(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(2)] for _ in range(50)]
    rep = verify_gkl_memberships(w(2, "12"), w(2, "1"), params)
    assert rep["ok"] and rep["checks"] == 200
    with pytest.raises(ValueError):
        verify_gkl_memberships(w(2, ""), w(2, ""), [[]])
    with pytest.raises(ValueError):
        verify_gkl_memberships(w(2, "12"), w(2, "2"), params)


@pytest.mark.parametrize("n", [2, 3])
def test_gkl_all_prefixes(n):
    rng = random.Random(n)
    for x in all_perms_weyl(n):
        if x.is_identity():
            continue
        for k in range(x.length + 1):
            x1 = from_word(x.ctx, x.word[:k])
            params = [[F(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(x.length)] for _ in range(4 - n)]
            assert verify_gkl_memberships(x, x1, params)["ok"], (x, x1)
