import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import plucker_tnn
from tnnflag.ratmat import RationalMatrix
from tnnflag.slgroup import (
    LeviContext,
    all_perms_weyl,
    gen_y,
    iota,
    sdot,
    weyl_ctx,
)
from tnnflag.tpcells import (
    CellSpec,
    draw_point,
    in_u_minus_positive,
    in_u_plus_positive,
    j_unipotent_sample,
    jg_sample,
    mr_product,
    mr_sample,
    positive_subexpression,
    positivity_test,
    projection_check,
    random_params,
    sample,
    suite_chart_containment,
    suite_closure_poset,
    suite_identities,
    suite_product_structure,
)
from tnnflag.verify import subsets
from tnnflag.weyl import bruhat_leq, coset_decompose, from_word, identity, is_min_left

F = Fraction


def w(n, word):
    return from_word(weyl_ctx(n), list(word))


def pairs(n):
    els = all_perms_weyl(n)
    return [(a, b) for a in els for b in els if bruhat_leq(a, b)]


def twisted_oracle(J, g) -> bool:
    """Positive part of a J-twisted cell: w_J^-1 g is iota of a totally nonnegative flag."""
    lc = LeviContext(g.size - 1, [int(j) for j in J])
    return plucker_tnn(iota(lc.wdot_J_inv() * g))


def signed_point(spec, rng, flips):
    """A point built from parameters with the given positions negated."""
    params = random_params(rng, spec.dim())
    for k in flips:
        params[k] = -params[k]
    if spec.family == "twisted":
        lc = spec.levi()
        wj = lc.longest()
        sub = positive_subexpression((wj * spec.w).word, wj * spec.v)
        return lc.wdot_J() * mr_product(spec.n, sub, params, "neg")
    return mr_product(spec.n, positive_subexpression(spec.w.word, spec.v), params, spec.family)


def test_positive_subexpression_examples():
    top = w(2, "121")
    sub = positive_subexpression(top.word, w(2, "2"))
    assert sub.mask == ("free", "letter", "free")
    assert positive_subexpression(top.word, identity(top.ctx)).mask == ("free",) * 3
    assert positive_subexpression(top.word, top).mask == ("letter",) * 3
    with pytest.raises(ValueError):
        positive_subexpression(("1",), w(2, "2"))


def test_mr_sample_examples():
    s = mr_sample(identity(weyl_ctx(1)), w(1, "1"), [1])
    assert s.point == gen_y(1, 1, 1)
    s = mr_sample(w(2, "2"), w(2, "121"), [1, 2])
    assert s.point == gen_y(2, 1, 1) * sdot(2, 2) * gen_y(2, 1, 2)
    assert s.spec.cells_of(s.point) == (w(2, "2"), w(2, "121"))
    neg = mr_sample(w(2, "2"), w(2, "121"), [1, 2], "neg")
    assert neg.spec.cells_of(neg.point) == (w(2, "2"), w(2, "121"))
    with pytest.raises(ValueError):
        mr_sample(w(2, "2"), w(2, "121"), [1])


@pytest.mark.parametrize("n", [2, 3])
def test_samplers_land_in_nonnegative_part(n):
    rng = random.Random(n)
    ps = pairs(n)
    if n == 3:
        ps = rng.sample(ps, 60)
    for v, x in ps:
        for _ in range(3):
            params = random_params(rng, x.length - v.length)
            g = mr_sample(v, x, params).point
            assert plucker_tnn(g)
            h = mr_sample(v, x, params, "neg").point
            assert plucker_tnn(iota(h)) and h == iota(g)


def test_rank_one_sign_calibration():
    """The rank-one sign table agrees with the Plucker oracle on every rank-one cell."""
    rng = random.Random(17)
    seen = 0
    for n in (2, 3):
        for v, x in pairs(n):
            if x.length - v.length != 1:
                continue
            for family in ("pos", "neg"):
                spec = CellSpec(v, x, family=family)
                for flips in ((), (0,)):
                    g = signed_point(spec, rng, flips)
                    expected = plucker_tnn(g if family == "pos" else iota(g))
                    assert positivity_test(spec, g) == expected
                    assert expected == (flips == ())
                    seen += 1
    assert seen == 4 * (8 + 58)


@pytest.mark.parametrize("n", [2, 3])
def test_positivity_matches_plucker_ordinary(n):
    rng = random.Random(100 + n)
    ps = [(a, b) for a, b in pairs(n) if b.length - a.length >= 2]
    if n == 3:
        ps = rng.sample(ps, 40)
    for v, x in ps:
        spec = CellSpec(v, x, family="pos")
        for _ in range(3):
            flips = [k for k in range(spec.dim()) if rng.random() < 0.3]
            g = signed_point(spec, rng, flips)
            if not spec.contains(g):
                continue
            assert positivity_test(spec, g) == plucker_tnn(g), (v, x, flips)


@pytest.mark.parametrize("n", [2, 3])
def test_positivity_matches_oracle_twisted(n):
    rng = random.Random(200 + n)
    for J in subsets(range(1, n + 1)):
        J = frozenset(str(j) for j in J)
        ps = [(a, b) for a, b in pairs(n) if CellSpec(a, a, J).leq(a, b)]
        for v, x in rng.sample(ps, min(len(ps), 12)):
            spec = CellSpec(v, x, J)
            flips = [k for k in range(spec.dim()) if rng.random() < 0.3]
            g = signed_point(spec, rng, flips)
            if spec.contains(g):
                assert positivity_test(spec, g) == twisted_oracle(J, g)


def test_chooser_independence():
    """The verdict does not depend on which intermediate chart is used."""
    rng = random.Random(5)
    ps = [(a, b) for a, b in pairs(3) if b.length - a.length >= 2]
    count = 0
    while count < 200:
        v, x = rng.choice(ps)
        J = rng.choice([frozenset(), frozenset({"1"}), frozenset({"2", "3"})])
        spec = CellSpec(v, x, J) if CellSpec(v, v, J).leq(v, x) else CellSpec(v, x, family="pos")
        flips = [k for k in range(spec.dim()) if rng.random() < 0.25]
        g = signed_point(spec, rng, flips)
        if not spec.contains(g):
            continue
        verdicts = {positivity_test(spec, g, chooser=lambda s, c: c[0]),
                    positivity_test(spec, g, chooser=lambda s, c: c[-1]),
                    positivity_test(spec, g, chooser=lambda s, c: rng.choice(c))}
        assert len(verdicts) == 1
        count += 1


def test_iota_intertwines_families():
    rng = random.Random(3)
    for v, x in pairs(2):
        pos, neg = CellSpec(v, x, family="pos"), CellSpec(v, x, family="neg")
        for flips in ((), (0,)):
            if pos.dim() == 0 and flips:
                continue
            g = signed_point(pos, rng, flips)
            if pos.contains(g):
                assert positivity_test(pos, g) == positivity_test(neg, iota(g))


def test_empty_twist_is_negative_family():
    rng = random.Random(4)
    for v, x in pairs(2):
        g = signed_point(CellSpec(v, x, family="neg"), rng, ())
        assert positivity_test(CellSpec(v, x, frozenset()), g)


def test_rank_zero_and_outside():
    x = w(2, "12")
    assert positivity_test(CellSpec(x, x, family="pos"), sample(CellSpec(x, x, family="pos"), []).point)
    with pytest.raises(ValueError):
        positivity_test(CellSpec(identity(x.ctx), x, family="pos"), RationalMatrix.identity(3))
    with pytest.raises(ValueError):
        CellSpec(x, identity(x.ctx), family="pos")


def test_unipotent_positive_parts():
    a, b = F(2), F(3)
    x = w(2, "12")
    h = gen_y(2, 1, a) * gen_y(2, 2, b)
    assert in_u_minus_positive(x, h)
    assert not in_u_minus_positive(x, gen_y(2, 1, a) * gen_y(2, 2, -b))
    assert in_u_plus_positive(x.inverse(), h.transpose())
    assert not in_u_plus_positive(x, h)


def test_j_unipotent_examples():
    c = weyl_ctx(2)
    params = [F(1), F(2)]
    # J empty: U^-_{w,<0}
    s = j_unipotent_sample(set(), identity(c), w(2, "12"), params)
    assert s.point == gen_y(2, 1, -1) * gen_y(2, 2, -2)
    # J everything: the h1 factor alone
    s = j_unipotent_sample({"1", "2"}, w(2, "12"), identity(c), params)
    assert s.point == gen_y(2, 1, 1) * gen_y(2, 2, 2)
    s = j_unipotent_sample({"1"}, w(2, "1"), w(2, "21"), [1, 1, 1])
    assert s.spec.cells_of(s.point) == (w(2, "1"), w(2, "21"))
    assert positivity_test(s.spec, s.point) and twisted_oracle({"1"}, s.point)


@pytest.mark.parametrize("n", [2, 3])
def test_jg_sampler_against_oracle(n):
    rng = random.Random(n * 13)
    els = all_perms_weyl(n)
    for J in subsets(range(1, n + 1)):
        J = frozenset(str(j) for j in J)
        for x in els:
            if not is_min_left(x, J):
                continue
            for u in els:
                _, ju = coset_decompose(u, J)
                if not bruhat_leq(ju, x):
                    continue
                if n == 3 and rng.random() > 0.15:
                    continue
                spec = CellSpec(u, x, J)
                s = jg_sample(J, u, x, random_params(rng, spec.dim()))
                assert twisted_oracle(J, s.point)
                assert positivity_test(spec, s.point)


def test_jg_examples():
    c = weyl_ctx(2)
    s = jg_sample({"1"}, w(2, "12"), w(2, "21"), [1, 1])
    assert s.spec.contains(s.point)
    # u = e gives the pi_J-corrected negative sample
    s = jg_sample({"1"}, identity(c), w(2, "21"), [1, 1])
    assert s.spec.cells_of(s.point) == (identity(c), w(2, "21"))
    s0 = jg_sample(set(), w(2, "1"), w(2, "121"), [1, 2])
    assert s0.point == mr_sample(w(2, "1"), w(2, "121"), [1, 2], "neg").point


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_parameter_count_law(data):
    n = data.draw(st.sampled_from([2, 3]))
    v, x = data.draw(st.sampled_from(pairs(n)))
    J = data.draw(st.sampled_from([frozenset(str(j) for j in s) for s in subsets(range(1, n + 1))]))
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))
    if CellSpec(v, v, J).leq(v, x):
        spec = CellSpec(v, x, J)
        assert spec.dim() == spec.length_of(x) - spec.length_of(v)
    else:
        spec = CellSpec(v, x, family="pos")
        assert spec.dim() == x.length - v.length
    params, g = draw_point(spec, rng)
    assert len(params) == spec.dim() and spec.contains(g)


def test_projection_check():
    rng = random.Random(21)
    for n in (2, 3):
        for K in subsets(range(1, n + 1)):
            for v, x in rng.sample(pairs(n), 8):
                rep = projection_check(K, v, x, random_params(rng, x.length - v.length))
                assert rep["ok"], (K, v, x, rep)


def test_chart_suite_examples():
    top = w(2, "121")
    rep = suite_chart_containment(CellSpec(identity(top.ctx), top, family="pos"), 100)
    assert rep["ok"] and rep["checks"] == 600
    for v, x in pairs(2):
        J = frozenset({"1"})
        spec = CellSpec(v, v, J)
        if spec.leq(v, x) and spec.length_of(x) - spec.length_of(v) <= 2:
            assert suite_chart_containment(CellSpec(v, x, J), 10)["ok"]


def test_chart_suite_negative_control():
    c = weyl_ctx(3)
    spec = CellSpec(from_word(c, ["1"]), from_word(c, "121321"), family="pos")
    rep = suite_chart_containment(spec, 50, seed=7, negate=0)
    assert not rep["ok"]
    witness = rep["failures"][0]
    assert witness["reason"] == "outside chart" and witness["u"] and witness["point"]


def test_product_suite_examples():
    c = weyl_ctx(2)
    x = w(2, "12")
    rep = suite_product_structure(CellSpec(identity(c), x, family="pos"), w(2, "1"), 100)
    assert rep["ok"]
    spec = CellSpec(w(2, "1"), w(2, "21"), {"1"})
    mid = [u for u in spec.between() if spec.length_of(u) == spec.length_of(spec.v) + 1]
    assert mid and all(suite_product_structure(spec, u, 20)["ok"] for u in mid)
    # trivial split
    assert suite_product_structure(spec, spec.v, 10)["ok"]
    bad = suite_product_structure(CellSpec(identity(c), x, family="pos"), w(2, "1"), 10, negate=0)
    assert not bad["ok"]
    with pytest.raises(ValueError):
        suite_product_structure(CellSpec(identity(c), x, family="pos"), w(2, "21"), 1)


def test_closure_suite_examples():
    c = weyl_ctx(2)
    top = w(2, "121")
    rep = suite_closure_poset(CellSpec(top, top, family="pos"))
    assert rep["ok"] and rep["setup"]["cells"] == 1 and rep["setup"]["euler_sum"] == 1
    rep = suite_closure_poset(CellSpec(identity(c), top, set()))
    assert rep["ok"] and rep["setup"]["cells"] == 19
    assert rep["setup"]["rank_counts"] == {"0": 6, "1": 8, "2": 4, "3": 1}
    assert suite_closure_poset(CellSpec(w(2, "1"), w(2, "21"), {"1"}))["ok"]


def test_identities_suite_and_mutations():
    assert suite_identities(2, 30, gkl_samples=10)["ok"]
    broken_iota = suite_identities(2, 20, gkl_samples=1, iota_fn=lambda g: g)
    assert not broken_iota["ok"]
    assert any(f["part"] == "iota" and f["lhs"] for f in broken_iota["failures"])
    from tnnflag.slgroup import gen_x
    broken_x = suite_identities(2, 20, gkl_samples=1, ident_x=lambda i, a: gen_x(2, i, -a))
    assert not broken_x["ok"]
