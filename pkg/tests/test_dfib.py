from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmk import catalog, gen
from rmk import dfib as dm
from rmk.fincat import (
    Functor,
    NatTrans,
    constant_functor,
    discrete,
    identity_functor,
    identity_nat,
    is_discrete_fibration,
    is_faithful,
    reflects_isomorphisms,
    terminal_category,
    terminal_object,
    walking_arrow,
)

from .oracles import count_natural_maps, fiber_pullback_pairs


def sets_over_point(*fibers):
    """Fibrations over the terminal category: plain finite sets."""
    C = terminal_category()
    return [dm.DFib(C, {"*": xs}, name=f"S{i}").validate() for i, xs in enumerate(fibers)]


def fn_over_point(X, Y, mapping):
    return dm.DFibMap(X, Y, {"*": dict(mapping)}).validate()


# -- yoneda ---------------------------------------------------------------------

def test_yoneda_of_terminal_category_is_a_singleton():
    Y = dm.yoneda(terminal_category(), "*").validate()
    assert Y.size() == 1


def test_yoneda_of_walking_arrow_at_one():
    Y = dm.yoneda(walking_arrow(), 1).validate()
    assert Y.fiber(0) == ("f",)
    assert Y.fiber(1) == (("id", 1),)


@pytest.mark.parametrize("C", catalog.small_categories(), ids=lambda C: C.name)
def test_yoneda_is_represented_by_its_object(C):
    for b in C.objects:
        rep = dm.is_representable_fibration(dm.yoneda(C, b))
        assert rep is not None and C.isomorphic(rep[0], b)


@pytest.mark.parametrize("C", catalog.small_categories(), ids=lambda C: C.name)
def test_yoneda_self_maps_count_endomorphisms(C):
    for b in C.objects:
        w = dm.yoneda_bijection(C, b, dm.yoneda(C, b))
        assert w.bijective and w.map_count == len(C.hom(b, b))


def test_yoneda_into_empty_fiber_has_no_maps():
    C = walking_arrow()
    D = dm.DFib(C, {0: ["x"], 1: []}).validate()
    w = dm.yoneda_bijection(C, 1, D)
    assert w.map_count == 0 and w.bijective


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_yoneda_count_matches_brute_force(seed):
    rng = random.Random(seed)
    B = gen.random_category(rng, 3)
    D = gen.random_dfib(rng, B, 2)
    b = rng.choice(list(B.objects))
    w = dm.yoneda_bijection(B, b, D)
    assert w.bijective
    assert w.map_count == len(D.fiber(b)) == count_natural_maps(dm.yoneda(B, b), D)


# -- fibration laws ----------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_projection_has_unique_lifts_and_is_faithful(seed):
    rng = random.Random(seed)
    B = gen.random_category(rng, 3)
    D = gen.random_dfib(rng, B, 2)
    T, P = D.total()
    T.validate()
    P.validate()
    assert is_discrete_fibration(P)
    assert is_faithful(P)
    assert reflects_isomorphisms(P)
    for (b, x) in T.objects:
        for f in B.inbound(b):
            lifts = [e for e in T.inbound((b, x)) if P.ar(e) == f]
            assert len(lifts) == 1


# -- base change and transport ---------------------------------------------------

def test_base_change_along_identity_is_the_fibration_itself():
    rng = random.Random(3)
    B = gen.random_category(rng, 3)
    D = gen.random_dfib(rng, B, 3)
    P, _ = dm.base_change(D, identity_functor(B))
    assert P.fibers == D.fibers and P.restrictions == D.restrictions


def test_base_change_along_constant_functor_is_constant():
    C = walking_arrow()
    D = dm.yoneda(C, 1)
    K = constant_functor(walking_arrow(), C, 0)
    P, proj = dm.base_change(D, K)
    P.validate()
    proj.validate()
    assert P.fiber(0) == P.fiber(1) == D.fiber(0)
    assert dm.verify_base_change_pullback(D, K)


@pytest.mark.parametrize("seed", range(8))
def test_base_change_of_yoneda_is_comma_fibration(seed):
    rng = random.Random(seed)
    B = gen.random_category(rng, 3)
    S = gen.random_category(rng, 2)
    from rmk.fincat import enumerate_functors

    F = rng.choice(list(enumerate_functors(S, B)))
    b = rng.choice(list(B.objects))
    P, _ = dm.base_change(dm.yoneda(B, b), F)
    Cm = dm.comma_fibration(F, b).validate()
    assert P.fibers == Cm.fibers
    assert dm.verify_base_change_pullback(dm.yoneda(B, b), F)


def test_transport_along_identity_is_identity():
    C = walking_arrow()
    D = dm.yoneda(C, 1)
    w = dm.transport_along_nat(identity_nat(identity_functor(C)), D)
    assert w.candidates == 1
    assert dm.maps_equal(w.map, dm.identity_map(w.map.source))


def test_transport_over_a_point_is_restriction():
    C = walking_arrow()
    P = terminal_category()
    F = Functor(P, C, {"*": 0}, {("id", "*"): ("id", 0)})
    G = Functor(P, C, {"*": 1}, {("id", "*"): ("id", 1)})
    sigma = NatTrans(F, G, {"*": "f"}).validate()
    D = dm.DFib(C, {0: ["a", "b"], 1: ["x", "y"]}, {"f": {"x": "a", "y": "a"}}).validate()
    w = dm.transport_along_nat(sigma, D)
    assert w.candidates == 1
    assert w.map.components["*"] == {"x": "a", "y": "a"}


# -- right adjoints -----------------------------------------------------------------

def test_identity_map_has_identity_adjoint():
    rng = random.Random(5)
    B = gen.random_category(rng, 3)
    D = gen.random_dfib(rng, B, 2)
    w = dm.right_adjoint(dm.identity_map(D))
    assert w is not None
    for (b, y), (c, q, p) in w.table.items():
        assert c == b and q == y and p == B.id(b)


@pytest.mark.parametrize(
    "src,tgt,mapping,representable",
    [
        (["a", "b"], ["x", "y"], {"a": "y", "b": "x"}, True),
        (["a", "b"], ["x"], {"a": "x", "b": "x"}, False),
        (["a"], ["x", "y"], {"a": "x"}, False),
        ([], [], {}, True),
    ],
)
def test_over_a_point_representable_iff_bijective(src, tgt, mapping, representable):
    X, Y = sets_over_point(src, tgt)
    u = fn_over_point(X, Y, mapping)
    assert (dm.right_adjoint(u) is not None) == representable


def test_subsingleton_projection_is_representable(subsingleton):
    u = subsingleton.maps["p"]
    w = dm.right_adjoint(u)
    assert w is not None
    assert dm.check_adjunction(u, w)


# -- pushforward and polynomial functors -------------------------------------------

def test_pushforward_along_identity_is_the_source():
    rng = random.Random(11)
    B = gen.random_category(rng, 3)
    X = gen.random_dfib(rng, B, 2)
    g = gen.random_over(rng, X, 2)
    P, proj = dm.pushforward(dm.identity_map(X), g)
    P.validate()
    assert [len(P.fiber(b)) for b in B.objects] == [len(g.source.fiber(b)) for b in B.objects]


def test_pushforward_along_bijection_of_sets_reindexes():
    X, Y, Z = sets_over_point(["a", "b"], ["x", "y"], ["z1", "z2", "z3"])
    u = fn_over_point(X, Y, {"a": "x", "b": "y"})
    g = fn_over_point(Z, X, {"z1": "a", "z2": "a", "z3": "b"})
    P, proj = dm.pushforward(u, g)
    over = {y: sum(1 for e in P.fiber("*") if proj("*", e) == y) for y in Y.fiber("*")}
    assert over == {"x": 2, "y": 1}


def test_pushforward_requires_a_right_adjoint():
    X, Y = sets_over_point(["a", "b"], ["x"])
    u = fn_over_point(X, Y, {"a": "x", "b": "x"})
    with pytest.raises(dm.MissingAdjoint):
        dm.pushforward(u, dm.identity_map(X))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_pushforward_ump_and_totals_route_agree(seed):
    rng = random.Random(seed)
    B = gen.random_rich_category(rng, 3)
    u = gen.random_representable(rng, B, 2)
    g = gen.random_over(rng, u.source, 2)
    wmap = gen.random_over(rng, u.target, 2)
    r = dm.pushforward_ump(u, g, wmap)
    assert r.bijective and r.lhs == r.rhs
    P1, _ = dm.pushforward(u, g)
    P2, _ = dm.pushforward_via_totals(u, g)
    for b in B.objects:
        assert sorted(P1.fiber(b), key=repr) == sorted(P2.fiber(b), key=repr)


def test_polynomial_of_singletons_is_the_codomain():
    rng = random.Random(2)
    B = gen.random_rich_category(rng, 3)
    u = gen.random_representable(rng, B, 2)
    one = dm.terminal_dfib(B)
    P = dm.polynomial(u, one).validate()
    assert [len(P.fiber(b)) for b in B.objects] == [len(u.target.fiber(b)) for b in B.objects]


def test_polynomial_along_identity_is_product_with_codomain():
    rng = random.Random(4)
    B = gen.random_category(rng, 3)
    Y = gen.random_dfib(rng, B, 2)
    A = gen.random_dfib(rng, B, 2)
    P = dm.polynomial(dm.identity_map(Y), A).validate()
    for b in B.objects:
        assert len(P.fiber(b)) == len(Y.fiber(b)) * len(A.fiber(b))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_polynomial_matches_pair_description(seed):
    rng = random.Random(seed)
    B = gen.random_rich_category(rng, 3)
    u = gen.random_representable(rng, B, 2)
    A = gen.random_dfib(rng, B, 2)
    P = dm.polynomial(u, A).validate()
    pairs = dm.polynomial_pairs(u, A)
    for b in B.objects:
        assert sorted(P.fiber(b), key=repr) == sorted(pairs[b], key=repr)


def test_polynomial_of_universe_over_terminal(subsingleton):
    M = subsingleton
    u = M.maps["p"]
    U = M.fibrations["Type"]
    t = M.terminal()
    pairs = dm.polynomial_pairs(u, U)[t]
    # A0 extends to the empty object whose Type fiber is {u}; A1 to the point with {A0, A1}
    assert sorted(pairs) == [("A0", "u"), ("A1", "A0"), ("A1", "A1")]
    assert len(dm.polynomial(u, U).fiber(t)) == 3


# -- context extension -----------------------------------------------------------------

def test_context_extension_along_identity():
    rng = random.Random(8)
    B = gen.random_category(rng, 3)
    D = gen.random_dfib(rng, B, 2)
    for (b, y) in D.elements():
        ext = dm.context_extension(dm.identity_map(D), b, y)
        assert ext.obj == b and ext.projection == B.id(b)


def test_subsingleton_context_extensions(subsingleton):
    u = subsingleton.maps["p"]
    t = subsingleton.terminal()
    assert dm.context_extension(u, t, "A1").obj == "point"
    assert dm.context_extension(u, t, "A0").obj == "empty"
    for b in subsingleton.base.objects:
        for y in u.target.fiber(b):
            assert dm.verify_extension_pullback(u, b, y)


# -- Beck-Chevalley ------------------------------------------------------------------

def test_identity_square_satisfies_bc(subsingleton):
    sq = dm.identity_square(subsingleton.maps["p"])
    assert dm.pullback_iff_bc(sq) == (True, True, True)


def test_pullback_square_satisfies_bc():
    rng = random.Random(1)
    B = gen.random_rich_category(rng, 3)
    u = gen.random_representable(rng, B, 2)
    w = gen.random_map(rng, gen.random_dfib(rng, B, 2), u.target)
    while w is None:
        w = gen.random_map(rng, gen.random_dfib(rng, B, 2), u.target)
    sq = dm.pullback_square(u, w)
    assert sq.commutes()
    assert dm.pullback_iff_bc(sq) == (True, True, True)


def first_non_pullback_square():
    for seed in range(200):
        rng = random.Random(seed)
        B = gen.random_rich_category(rng, 3)
        sq = gen.random_square(rng, B, 2)
        if not dm.is_pullback_square(sq):
            return sq
    raise AssertionError("generator produced no non-pullback square")


def test_broken_square_fails_both_checks():
    sq = first_non_pullback_square()
    assert sq.commutes()
    assert dm.is_representable(sq.left) and dm.is_representable(sq.right)
    assert dm.pullback_iff_bc(sq) == (False, False, True)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_pullback_and_bc_agree_on_random_squares(seed):
    rng = random.Random(seed)
    B = gen.random_rich_category(rng, 3)
    sq = gen.random_square(rng, B, 2)
    assert sq.commutes()
    pb, bc, agree = dm.pullback_iff_bc(sq)
    assert agree
    Xp, Yp, X = sq.top.source, sq.left.target, sq.right.source
    by_oracle = all(
        sorted(((sq.left(b, x), sq.top(b, x)) for x in Xp.fiber(b)), key=repr)
        == sorted(fiber_pullback_pairs(sq.bottom, sq.right, b, Yp, X, sq.top.ob(b)), key=repr)
        for b in B.objects
    )
    assert pb == by_oracle


# -- closure of representables ------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_representables_compose_and_pull_back(seed):
    rng = random.Random(seed)
    B = gen.random_rich_category(rng, 3)
    u = gen.random_representable(rng, B, 2)
    v = gen.random_representable(rng, B, 2)
    if all(len(v.target.fiber(b)) == len(u.source.fiber(b)) for b in B.objects):
        iso = dm.find_iso(v.target, u.source)
        if iso is not None:
            assert dm.is_representable(v.then(iso).then(u))
    w = gen.random_map(rng, gen.random_dfib(rng, B, 2), u.target)
    if w is not None:
        _, pW, _ = dm.pullback_dfib(u, w)
        assert dm.is_representable(pW)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_cancellation_in_commuting_triangles(seed):
    # in u = q . m with q a fibration projection, m is a fibration iff u is
    rng = random.Random(seed)
    B = gen.random_category(rng, 3)
    D = gen.random_dfib(rng, B, 2)
    E = gen.random_dfib(rng, B, 2)
    m = gen.random_map(rng, D, E)
    if m is None:
        return
    TD, pD = D.total()
    TE, pE = E.total()
    top = Functor(TD, TE, {(a, x): (a, m(a, x)) for (a, x) in TD.objects}, {(f, x): (f, m(TD.tgt((f, x))[0], x)) for (f, x) in TD.arrows})
    top.validate()
    assert is_discrete_fibration(pD) == is_discrete_fibration(top.then(pE))
    assert is_discrete_fibration(top)


# -- representable fibration vs representable map to the terminal --------------------

def test_representability_predicates_differ_without_terminal_object():
    B = discrete(["a", "b"])
    D = dm.yoneda(B, "a")
    assert dm.is_representable_fibration(D) == ("a", ("id", "a"))
    assert not dm.is_representable_terminal_map(D)


def test_representable_terminal_map_is_not_implied_without_products():
    # the cospan l -> c <- r has a terminal object but no product of l and r
    from rmk.fincat import walking_cospan

    D = dm.yoneda(walking_cospan(), "l")
    assert dm.is_representable_fibration(D) is not None
    assert not dm.is_representable_terminal_map(D)


@pytest.mark.parametrize(
    "C", [C for C in catalog.small_categories() if C.objects and terminal_object(C) is not None], ids=lambda C: C.name
)
def test_terminal_map_representable_implies_representable_fibration(C):
    rng = random.Random(len(C.arrows))
    for D in [dm.yoneda(C, b) for b in C.objects] + [gen.random_dfib(rng, C, 2) for _ in range(6)]:
        if dm.is_representable_terminal_map(D):
            assert dm.is_representable_fibration(D) is not None


@pytest.mark.parametrize("C", catalog.cartesian_categories(), ids=lambda C: C.name)
def test_predicates_agree_with_finite_products(C):
    rng = random.Random(len(C.arrows))
    for D in [dm.yoneda(C, b) for b in C.objects] + [gen.random_dfib(rng, C, 2) for _ in range(6)]:
        assert (dm.is_representable_fibration(D) is not None) == dm.is_representable_terminal_map(D)


# -- file format -------------------------------------------------------------------------

def test_dfib_text_round_trip():
    C = walking_arrow()
    D = dm.DFib(C, {0: ["a", "b"], 1: ["x"]}, {"f": {"x": "b"}}, name="D").validate()
    text = dm.format_dfib(D, "arrow.fincat")
    E = dm.parse_dfib(text, lambda _ref: C).validate()
    assert [len(E.fiber(a)) for a in C.objects] == [2, 1]
