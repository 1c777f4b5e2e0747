from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmk.lf_syntax import (
    Abs,
    App,
    Eq,
    LFSyntaxError,
    Pi,
    Refl,
    SymbolApp,
    Var,
    alpha_eq,
    free_vars,
    parse_signature,
    parse_term,
    pretty,
    pretty_signature,
    size,
    substitute,
    substitute_many,
)

SYMBOLS = ["c", "f", "Type"]
VARS = ["x", "y", "z"]


# -- an independent locally nameless oracle -------------------------------------------

def nameless(t, bound=()):
    if isinstance(t, Var):
        if t.name in bound:
            return ("b", list(reversed(bound)).index(t.name))
        return ("f", t.name)
    if isinstance(t, SymbolApp):
        return ("s", t.name, tuple(nameless(a, bound) for a in t.args))
    if isinstance(t, Pi):
        return ("pi", nameless(t.dom, bound), nameless(t.cod, bound + (t.var,)))
    if isinstance(t, Abs):
        return ("lam", None if t.dom is None else nameless(t.dom, bound), nameless(t.body, bound + (t.var,)))
    if isinstance(t, App):
        dom = None if t.dom is None else nameless(t.dom, bound)
        cod = None if t.cod is None else nameless(t.cod, bound + (t.var,))
        return ("app", dom, cod, nameless(t.fun, bound), nameless(t.arg, bound))
    if isinstance(t, Eq):
        return ("eq", None if t.type is None else nameless(t.type, bound), nameless(t.left, bound), nameless(t.right, bound))
    if isinstance(t, Refl):
        return ("refl", nameless(t.subject, bound))
    return ("sort", str(t))


def replace_free(n, x, r):
    """Substitution on nameless terms: free names are replaced, bound indices untouched."""
    if n is None:
        return None
    if n[0] == "f":
        return r if n[1] == x else n
    if n[0] in ("b", "sort"):
        return n
    if n[0] == "s":
        return ("s", n[1], tuple(replace_free(a, x, r) for a in n[2]))
    return (n[0],) + tuple(replace_free(a, x, r) if isinstance(a, tuple) or a is None else a for a in n[1:])


# -- strategies ------------------------------------------------------------------------

atoms = st.one_of(st.sampled_from(VARS).map(Var), st.just(SymbolApp("c")))


def extend(children):
    names = st.sampled_from(VARS)
    return st.one_of(
        st.builds(lambda a: SymbolApp("f", (a,)), children),
        st.builds(Pi, children, names, children),
        st.builds(Abs, children, names, children),
        st.builds(lambda f, a: App(None, None, None, f, a), children, children),
        st.builds(lambda d, v, c, f, a: App(d, v, c, f, a), children, names, children, children, children),
        st.builds(lambda a, b: Eq(None, a, b), children, children),
        st.builds(Eq, children, children, children),
        st.builds(Refl, children),
    )


terms = st.recursive(atoms, extend, max_leaves=6)
small_terms = terms.filter(lambda t: size(t) <= 7)


# -- spec examples ----------------------------------------------------------------------

def test_parse_dependent_arrow():
    assert parse_term("(A : Type) -> Type", symbols=["Type"]) == Pi(SymbolApp("Type", ()), "A", SymbolApp("Type", ()))


def test_parse_abstraction():
    t = parse_term("\\(x : el(A)). x", symbols=["el"], scope=["A"])
    assert t == Abs(SymbolApp("el", (Var("A"),)), "x", Var("x"))


def test_parse_refl():
    assert parse_term("refl a", scope=["a"]) == Refl(Var("a"))


def test_unicode_spellings_parse_like_ascii():
    assert parse_term("λ(x : A). x", scope=["A"]) == parse_term("\\(x : A). x", scope=["A"])
    assert parse_term("(x : A) → A", scope=["A"]) == parse_term("(x : A) -> A", scope=["A"])


def test_syntax_error_carries_position():
    with pytest.raises(LFSyntaxError) as info:
        parse_signature("Type : () => Box\nel : (A : Type => Rep\n")
    assert info.value.line == 2


def test_alpha_renaming():
    A = SymbolApp("A")
    assert alpha_eq(Abs(A, "x", Var("x")), Abs(A, "y", Var("y")))
    assert not alpha_eq(Abs(A, "x", Var("x")), Abs(A, "x", Var("a")))
    assert not alpha_eq(Eq(A, Var("a"), Var("b")), Eq(A, Var("b"), Var("a")))


def test_substitution_examples():
    A, B = SymbolApp("A"), SymbolApp("B")
    assert substitute(Var("x"), Var("b"), "x") == Var("b")
    lam = Abs(A, "x", Var("x"))
    assert substitute(lam, Var("b"), "x") == lam
    t = Pi(B, "y", App(None, None, None, Var("y"), Var("x")))
    s = substitute(t, Var("y"), "x")
    assert isinstance(s, Pi) and s.var != "y"
    assert s.cod == App(None, None, None, Var(s.var), Var("y"))


# -- properties --------------------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(terms)
def test_print_then_parse_is_alpha_equivalent(t):
    assert alpha_eq(parse_term(pretty(t), symbols=SYMBOLS, scope=VARS), t)


@settings(max_examples=300, deadline=None)
@given(terms, terms, st.sampled_from(VARS))
def test_substitution_matches_nameless_oracle(t, r, x):
    assert nameless(substitute(t, r, x)) == replace_free(nameless(t), x, nameless(r))


@settings(max_examples=300, deadline=None)
@given(small_terms, small_terms, small_terms, small_terms)
def test_substitutions_compose(t, a, b, c):
    sigma = {"x": a, "y": b}
    tau = {"x": c, "z": a}
    composed = {v: substitute_many(s, tau) for v, s in sigma.items()}
    composed.update({v: s for v, s in tau.items() if v not in sigma})
    assert alpha_eq(substitute_many(substitute_many(t, sigma), tau), substitute_many(t, composed))


@settings(max_examples=200, deadline=None)
@given(terms, terms, st.sampled_from(VARS))
def test_substitution_free_variables(t, r, x):
    fv = free_vars(substitute(t, r, x))
    expected = (free_vars(t) - {x}) | (free_vars(r) if x in free_vars(t) else frozenset())
    assert fv == expected


@settings(max_examples=200, deadline=None)
@given(terms)
def test_alpha_eq_is_reflexive_and_stable_under_renaming(t):
    assert alpha_eq(t, t)
    if "w" not in free_vars(t):
        renamed = substitute(substitute(t, Var("w"), "x"), Var("x"), "w")
        assert alpha_eq(renamed, t)


def test_signature_round_trip():
    from rmk.files import DATA

    for p in sorted((DATA / "corpus").glob("*.lfsig")):
        sig = parse_signature(p.read_text(encoding="utf-8"))
        again = parse_signature(pretty_signature(sig))
        assert [e.name for e in again.entries] == [e.name for e in sig.entries]
        for e1, e2 in zip(sig.entries, again.entries):
            assert alpha_eq(e1.sort, e2.sort)
            assert [x for x, _ in e1.context.entries] == [x for x, _ in e2.context.entries]
