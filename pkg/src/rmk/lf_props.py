"""Seeded instances of the framework's metatheoretic properties over the corpus.

Two properties are exercised:

* substitution stability: from ``G |- a : A`` and a context morphism
  ``f : D -> G`` the checker must accept ``D |- a[f] : A[f]``;
* signature weakening: a judgment legal over ``S, S''`` stays legal over
  ``S, S', S''`` when ``S'`` declares fresh symbols.

Judgments come from the corpus: either a symbol applied to the variables of
its declared context, or a small enumerated term of an enumerated type.
Morphisms substitute an enumerated term for a variable, add a fresh
variable, or both.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .files import DATA
from .lf_checker import (
    BOX,
    CheckedSignature,
    CtxOk,
    FuelExhausted,
    HasType,
    LFError,
    check_context,
    check_context_morphism,
    check_signature,
    check_type,
    weaken_signature,
)
from .lf_enum import RawEnumerator, checked_terms, checked_types
from .lf_syntax import (
    Box,
    PreContext,
    PreSignature,
    PreTerm,
    Rep,
    SignatureEntry,
    SymbolApp,
    Var,
    parse_signature,
    pretty,
    pretty_context,
    substitute_many,
)

TERM_SIZE = 3


@lru_cache(maxsize=None)
def corpus() -> dict:
    """Name -> (pre-signature, checked signature) for every bundled corpus signature."""
    out = {}
    for p in sorted((DATA / "corpus").glob("*.lfsig")):
        pre = parse_signature(p.read_text(encoding="utf-8"))
        out[p.stem] = (pre, check_signature(pre))
    return out


@lru_cache(maxsize=None)
def _enumerator(name: str) -> RawEnumerator:
    return RawEnumerator(corpus()[name][1])


@dataclass(frozen=True)
class Judgment:
    """``context |- term : type`` where ``type`` may be a sort."""

    context: PreContext
    term: PreTerm
    type: PreTerm

    def __str__(self) -> str:
        return f"{pretty_context(self.context)} |- {pretty(self.term)} : {pretty(self.type)}"


@dataclass(frozen=True)
class SubstitutionInstance:
    signature: str
    judgment: Judgment
    target: PreContext  # D
    morphism: tuple  # f : D -> G

    def substituted(self) -> Judgment:
        m = dict(zip(self.judgment.context.names(), self.morphism))
        return Judgment(self.target, substitute_many(self.judgment.term, m), substitute_many(self.judgment.type, m))


@dataclass(frozen=True)
class Outcome:
    ok: bool
    detail: str


def _fresh(base: str, taken) -> str:
    n = 1
    while f"{base}{n}" in taken:
        n += 1
    return f"{base}{n}"


def random_judgment(rng: random.Random, name: str) -> Judgment:
    """A legal judgment over the named corpus signature."""
    sig = corpus()[name][1]
    entries = list(sig.entries.values())
    if rng.random() < 0.5:
        e = rng.choice(entries)
        t = SymbolApp(e.name, tuple(Var(x) for x in e.context.names()))
        return Judgment(e.context, t, e.sort)
    contexts = [e.context for e in entries]
    for _ in range(20):
        ctx = rng.choice(contexts)
        types = checked_types(_enumerator(name), ctx, TERM_SIZE)
        rng.shuffle(types)
        for T in types:
            terms = checked_terms(_enumerator(name), ctx, T, TERM_SIZE)
            if terms:
                return Judgment(ctx, rng.choice(terms), T)
    e = rng.choice(entries)
    return Judgment(e.context, SymbolApp(e.name, tuple(Var(x) for x in e.context.names())), e.sort)


def random_morphism(rng: random.Random, name: str, G: PreContext) -> tuple[PreContext, tuple]:
    """A context ``D`` and a morphism ``f : D -> G``."""
    D = G
    f = tuple(Var(x) for x in G.names())
    moves = ["subst", "weaken", "both"]
    move = rng.choice(moves)
    if move in ("subst", "both") and len(G):
        choices = []
        for k, (x, A) in enumerate(G.entries):
            prefix = PreContext(G.entries[:k])
            ts = [t for t in checked_terms(_enumerator(name), prefix, A, TERM_SIZE) if t != Var(x)]
            if ts:
                choices.append((k, ts))
        if choices:
            k, ts = rng.choice(choices)
            t = rng.choice(ts)
            x = G.entries[k][0]
            m = {x: t}
            rest = tuple((y, substitute_many(B, m)) for y, B in G.entries[k + 1 :])
            D = PreContext(G.entries[:k] + rest)
            f = tuple(Var(y) for y in G.names()[:k]) + (t,) + tuple(Var(y) for y in G.names()[k + 1 :])
    if move in ("weaken", "both"):
        types = checked_types(_enumerator(name), D, TERM_SIZE)
        if types:
            y = _fresh("y", set(D.names()) | set(corpus()[name][1].entries))
            D = D.extend(y, rng.choice(types))
    return D, f


def substitution_instance(rng: random.Random) -> SubstitutionInstance:
    name = rng.choice(sorted(corpus()))
    J = random_judgment(rng, name)
    D, f = random_morphism(rng, name, J.context)
    return SubstitutionInstance(name, J, D, f)


def check_substitution(inst: SubstitutionInstance) -> Outcome:
    sig = corpus()[inst.signature][1]
    J = inst.judgment
    try:
        if not check_type(sig, J.context, J.term, J.type):
            return Outcome(False, f"premise rejected: {J}")
        check_context(sig, inst.target)
        check_context_morphism(sig, list(inst.morphism), inst.target, J.context)
        S = inst.substituted()
        r = check_type(sig, S.context, S.term, S.type)
    except FuelExhausted as exc:
        return Outcome(False, f"fuel exhausted: {exc}")
    except LFError as exc:
        return Outcome(False, f"{exc}")
    if not r.ok:
        return Outcome(False, f"{S}: {r.error}")
    return Outcome(True, str(S))


# -- signature weakening ---------------------------------------------------------------

@dataclass(frozen=True)
class WeakeningInstance:
    base: PreSignature
    extra: PreSignature
    other: PreSignature
    judgment: object  # CtxOk or HasType
    label: str


def _rename(sig: PreSignature, prefix: str) -> PreSignature:
    """Copy of ``sig`` with every symbol renamed by ``prefix``; it is self-contained."""
    names = set(sig.names())

    def go(t):
        from .lf_syntax import Abs, App, Eq, Pi, Refl

        if isinstance(t, SymbolApp):
            n = prefix + t.name if t.name in names else t.name
            return SymbolApp(n, tuple(go(a) for a in t.args))
        if isinstance(t, Var):
            return SymbolApp(prefix + t.name, ()) if t.name in names else t
        if isinstance(t, (Box, Rep)) or t is None:
            return t
        if isinstance(t, Pi):
            return Pi(go(t.dom), t.var, go(t.cod))
        if isinstance(t, Abs):
            return Abs(go(t.dom), t.var, go(t.body))
        if isinstance(t, App):
            return App(go(t.dom), t.var, go(t.cod), go(t.fun), go(t.arg))
        if isinstance(t, Eq):
            return Eq(go(t.type), go(t.left), go(t.right))
        if isinstance(t, Refl):
            return Refl(go(t.subject))
        raise TypeError(t)

    out = []
    for e in sig.entries:
        ctx = PreContext(tuple((x, go(A)) for x, A in e.context.entries))
        out.append(SignatureEntry(prefix + e.name, ctx, go(e.sort), e.line))
    return PreSignature(tuple(out))


def weakening_instance(rng: random.Random) -> WeakeningInstance:
    name = rng.choice(sorted(corpus()))
    pre, sig = corpus()[name]
    k = rng.randint(1, len(pre.entries))
    base = PreSignature(pre.entries[:k])
    other = PreSignature(pre.entries[k:])
    donor = rng.choice(sorted(corpus()))
    extra = _rename(corpus()[donor][0], f"w{rng.randint(0, 9)}_")
    if rng.random() < 0.3:
        extra = PreSignature(())
    J = random_judgment(rng, name)
    judgment = CtxOk(J.context) if rng.random() < 0.25 else HasType(J.context, J.term, J.type)
    return WeakeningInstance(base, extra, other, judgment, f"{name}[:{k}] + {donor}")


def check_weakening(inst: WeakeningInstance) -> Outcome:
    try:
        weaken_signature(inst.base, inst.extra, inst.other, inst.judgment)
    except FuelExhausted as exc:
        return Outcome(False, f"fuel exhausted: {exc}")
    except LFError as exc:
        return Outcome(False, f"{inst.label}: {exc}")
    return Outcome(True, inst.label)


def run_lf_properties(seed: int, cases: int) -> dict:
    """Run ``cases`` instances of each property; returns per-property outcome lists."""
    rng = random.Random(seed)
    subst = [check_substitution(substitution_instance(rng)) for _ in range(cases)]
    weak = [check_weakening(weakening_instance(rng)) for _ in range(cases)]
    return {"substitution": subst, "weakening": weak}
