from __future__ import annotations

import itertools

import pytest

from rmk import model as mdl
from rmk.files import DATA, load_model, parse_fincat
from rmk.interpret import check_embedding
from rmk.lf_checker import check_signature
from rmk.lf_syntax import PreContext, parse_context, parse_signature, pretty_context
from rmk.syncat import (
    Bounds,
    build_syncat,
    check_generator_pullback,
    check_representable_pullbacks,
    check_terminal,
    fincat_dump,
    generating_representables,
    is_generator,
)

from .conftest import load_sig


@pytest.fixture(scope="module")
def sc(dtt):
    return build_syncat(dtt, Bounds(2, 4))


def ctx(sc, text):
    return parse_context(text, symbols=list(sc.sig.entries))


def idx(sc, text):
    return sc.index(ctx(sc, text))


def test_contexts_of_dependent_type_theory(sc):
    assert [pretty_context(c) for c in sc.contexts] == [
        "()",
        "(v1 : Type)",
        "(v1 : Type, v2 : Type)",
        "(v1 : Type, v2 : el(v1))",
        "(v1 : Type, v2 : el(v1) -> Type)",
        "(v1 : Type, v2 : v1 = v1 in Type)",
    ]


def test_contexts_are_found_up_to_renaming(sc):
    assert idx(sc, "(A : Type, x : el(A))") == 3
    assert idx(sc, "(A : Type, B : el(A) -> Type)") == 4
    assert idx(sc, "(A : Type, B : Type, C : Type)") is None


@pytest.mark.parametrize(
    "src,tgt,count",
    [(1, 1, 1), (2, 2, 4), (2, 1, 2), (4, 4, 2), (1, 3, 0), (3, 3, 1), (2, 4, 4), (2, 5, 2)],
)
def test_hom_counts(sc, src, tgt, count):
    assert sc.hom_count(src, tgt) == count


def test_description_lists_hom_counts(sc):
    lines = sc.describe()
    assert "hom 2 -> 2: 4 [(v1, v1); (v1, v2); (v2, v1); (v2, v2)]" in lines
    assert not any(line.startswith("hom 1 -> 3") for line in lines)


def test_empty_signature_has_only_the_empty_context():
    sc0 = build_syncat(check_signature(parse_signature("")), Bounds(2, 4))
    assert sc0.contexts == [PreContext(())]
    assert sc0.hom_count(0, 0) == 1


def test_empty_context_is_terminal(sc):
    assert check_terminal(sc)


def test_display_map_is_a_generator(sc):
    assert is_generator(sc, ctx(sc, "(A : Type, x : el(A))"), ctx(sc, "(A : Type)"))
    assert not is_generator(sc, ctx(sc, "(A : Type, B : Type)"), ctx(sc, "(A : Type)"))
    assert [(g.source, g.target) for g in generating_representables(sc)] == [(3, 1)]


def test_pullbacks_of_generators(sc):
    rep = check_representable_pullbacks(sc)
    assert rep.ok
    assert rep.verified >= 1
    assert rep.checked == rep.verified + len(rep.bound_limited)


def test_larger_bounds_embed_the_smaller_category(dtt, sc):
    big = build_syncat(dtt, Bounds(2, 5))
    where = [big.index(c) for c in sc.contexts]
    assert None not in where
    for (i, j), reps in sc.homs.items():
        classes = [big.class_of(where[i], where[j], f) for f in reps]
        assert None not in classes
        assert len(set(classes)) == len(classes)
    for i, j, k in itertools.product(range(len(sc.contexts)), repeat=3):
        for a, b in itertools.product(range(sc.hom_count(i, j)), range(sc.hom_count(j, k))):
            c = sc.compose(i, j, k, a, b)
            fa = big.class_of(where[i], where[j], sc.homs[(i, j)][a])
            fb = big.class_of(where[j], where[k], sc.homs[(j, k)][b])
            assert big.compose(where[i], where[j], where[k], fa, fb) == big.class_of(where[i], where[k], sc.homs[(i, k)][c])


def test_composition_is_associative_and_unital(sc):
    C = sc.to_fincat()
    for f in C.arrows:
        assert C.compose(f, C.id(C.src(f))) == f
        assert C.compose(C.id(C.tgt(f)), f) == f


def test_dump_round_trip(sc):
    text = fincat_dump(sc)
    C = parse_fincat(text).validate()
    assert len(C.objects) == 6
    assert len(C.arrows) == 36
    assert len(C.arrows) == sum(map(len, sc.homs.values()))


def test_interpretation_in_the_subsingleton_model_is_functorial(sc):
    M = mdl.validate_model(load_model(DATA / "subsingleton.model"))
    rep = check_embedding(sc, M)
    assert rep.ok
    assert rep.contexts == 6 and rep.arrows == 36
    assert rep.generator_images and all(ok for _, ok in rep.generator_images)


def test_corpus_signature_with_pi_builds(pi_sig):
    sc = build_syncat(pi_sig, Bounds(1, 3))
    assert check_terminal(sc)
    sc.to_fincat()


def test_pullback_along_a_variable_substitution_verifies(dtt):
    big = build_syncat(dtt, Bounds(3, 3))
    C = big.to_fincat()
    [g] = [g for g in generating_representables(big) if len(big.contexts[g.source]) == 2]
    d = big.index(parse_context("(A : Type, B : Type)", symbols=list(dtt.entries)))
    for sigma, f in enumerate(big.homs[(d, g.target)]):
        assert check_generator_pullback(big, C, g, d, sigma) == "verified", f
