from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmk import catalog, gen
from rmk.dfib import yoneda
from rmk.fincat import (
    FinCat,
    Functor,
    IdentityLaw,
    NonAssociative,
    NotFunctorial,
    all_pullbacks,
    discrete,
    enumerate_functors,
    factorizations,
    finite_limit,
    format_fincat,
    identity_functor,
    is_discrete_fibration,
    pair_diagram,
    parse_fincat,
    product,
    pullback,
    slice_category,
    terminal_category,
    terminal_object,
    walking_arrow,
    walking_cospan,
    walking_iso,
)

from .oracles import pullback_by_cones, terminal_by_homs


def test_terminal_category_validates():
    C = terminal_category()
    assert len(C.objects) == 1 and len(C.arrows) == 1


def test_walking_arrow_validates():
    C = walking_arrow()
    assert C.hom(0, 1) == ["f"]


def test_misassigned_composite_is_non_associative():
    # e is an involution on y swapping a and a2; e.a2 is mis-assigned to a2
    arrows = {"a": ("x", "y"), "a2": ("x", "y"), "e": ("y", "y")}
    comp = {("e", "e"): ("id", "y"), ("e", "a"): "a2", ("e", "a2"): "a2"}
    with pytest.raises(NonAssociative) as info:
        FinCat.build(["x", "y"], arrows, comp)
    assert info.value.witness is not None


def test_identity_law_violation_is_reported():
    # i is declared the identity but absorbs e on the left
    arrows = {"e": ("x", "x"), "i": ("x", "x")}
    comp = {("e", "e"): "e", ("i", "e"): "i", ("e", "i"): "e", ("i", "i"): "i"}
    C = FinCat(["x"], arrows, {"x": "i"}, comp)
    with pytest.raises(IdentityLaw):
        C.validate()


def test_non_functorial_map_is_reported():
    A = walking_arrow()
    F = Functor(A, walking_iso(), {0: "a", 1: "b"}, {"f": "u", ("id", 0): ("id", "b"), ("id", 1): ("id", "b")})
    with pytest.raises(NotFunctorial):
        F.validate()


def test_terminal_object_examples():
    assert terminal_object(walking_arrow()) == 1
    assert terminal_object(terminal_category()) == "*"
    assert terminal_object(discrete(["a", "b"])) is None


def test_terminal_tie_break_is_first_declared():
    assert terminal_object(walking_iso()) == "a"


@pytest.mark.parametrize("C", catalog.small_categories(), ids=lambda C: C.name)
def test_terminal_object_agrees_with_hom_counting(C):
    expected = terminal_by_homs(C)
    assert terminal_object(C) == (expected[0] if expected else None)


def test_product_in_boolean_lattice_is_meet():
    C = catalog.boolean_lattice(2)
    objs = list(C.objects)
    for a in objs:
        for b in objs:
            cone = product(C, a, b)
            assert cone is not None
            meets = [m for m in objs if C.hom(m, a) and C.hom(m, b)]
            # the apex is the largest common lower bound
            assert all(C.hom(m, cone.apex) for m in meets)


def test_pullback_of_identity_along_identity_is_domain():
    C = walking_arrow()
    cone = pullback(C, ("id", 1), ("id", 1))
    assert cone.apex == 1


def test_walking_cospan_has_no_pullback():
    C = walking_cospan()
    assert pullback(C, "lc", "rc") is None
    assert pullback_by_cones(C, "lc", "rc") == []


@pytest.mark.parametrize("C", catalog.cartesian_categories(), ids=lambda C: C.name)
def test_pullbacks_agree_with_cone_oracle(C):
    for f in C.arrows:
        for g in C.inbound(C.tgt(f)):
            found = {(c.apex, c.leg("l"), c.leg("r")) for c in all_pullbacks(C, f, g)}
            assert found == set(pullback_by_cones(C, f, g))


@pytest.mark.parametrize("C", catalog.cartesian_categories(), ids=lambda C: C.name)
def test_limit_uniqueness(C):
    objs = list(C.objects)
    for a in objs:
        for b in objs:
            D = pair_diagram(C, a, b)
            limits = all_limits_of(C, D)
            for L1 in limits:
                for L2 in limits:
                    f12 = factorizations(C, L1, L2)
                    f21 = factorizations(C, L2, L1)
                    assert len(f12) == 1 and len(f21) == 1
                    assert C.compose(f12[0], f21[0]) == C.id(L1.apex)


def all_limits_of(C, D):
    from rmk.fincat import all_limits

    return all_limits(C, D)


def test_slice_of_terminal_is_terminal():
    S, _ = slice_category(terminal_category(), "*")
    assert len(S.objects) == 1 and len(S.arrows) == 1


def test_walking_arrow_sliced_at_one():
    S, P = slice_category(walking_arrow(), 1)
    assert set(S.objects) == {"f", ("id", 1)}
    assert len(S.non_identity_arrows()) == 1
    assert is_discrete_fibration(P)


def test_slice_at_object_without_inbound_arrows_is_terminal():
    S, _ = slice_category(walking_arrow(), 0)
    assert len(S.objects) == 1 and len(S.arrows) == 1


@pytest.mark.parametrize("C", catalog.small_categories(), ids=lambda C: C.name)
def test_slice_projection_matches_yoneda(C):
    for X in C.objects:
        S, P = slice_category(C, X)
        P.validate()
        assert is_discrete_fibration(P)
        Y = yoneda(C, X).validate()
        assert sorted(map(repr, S.objects)) == sorted(repr(g) for a in C.objects for g in Y.fiber(a))


def test_identity_functor_is_the_only_endofunctor_of_walking_arrow_fixing_objects():
    C = walking_arrow()
    fs = list(enumerate_functors(C, C))
    # 0,1 -> (0,0), (1,1), (0,1)
    assert len(fs) == 3
    assert any(F.obj_map == identity_functor(C).obj_map for F in fs)


def test_fincat_text_round_trip():
    C = catalog.boolean_lattice(2)
    D = parse_fincat(format_fincat(C))
    assert len(D.objects) == len(C.objects) and len(D.arrows) == len(C.arrows)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=4))
def test_random_categories_are_lawful(seed, n):
    C = gen.random_category(random.Random(seed), n)
    C.validate()
    for f in C.arrows:
        assert C.compose(f, C.id(C.src(f))) == f
        assert C.compose(C.id(C.tgt(f)), f) == f


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_finite_limit_returns_a_cone_that_every_cone_factors_through(seed):
    C = gen.random_cartesian_category(random.Random(seed), 3)
    for f in C.arrows:
        for g in C.inbound(C.tgt(f)):
            cone = pullback(C, f, g)
            oracle = pullback_by_cones(C, f, g)
            assert (cone is None) == (not oracle)
            if cone is not None:
                assert (cone.apex, cone.leg("l"), cone.leg("r")) in oracle
