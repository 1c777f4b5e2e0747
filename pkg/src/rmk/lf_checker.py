"""Signature, context, typing and equality checking for the logical framework.

Typing is bidirectional: symbol applications, variables, annotated
abstractions and ``refl`` synthesise their types; unannotated abstractions
are checked against a product; surface applications ``b a`` are elaborated
to annotated applications by synthesising the product type of ``b``.

Definitional equality is decided by a sound but incomplete, type-directed
algorithm.  At an equation type every two terms are equal (proof
irrelevance).  At a product type both sides are applied to a fresh
variable.  Otherwise both sides are beta-normalised and compared
structurally, each argument at its own type, with ground congruence
closure over the equational hypotheses of the context as a fallback.  A
comparison that fails when hypotheses or equation symbols are present is
reported as ``UNKNOWN`` rather than ``DISTINCT``; both reject.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from typing import Iterable, Union

from .lf_syntax import (
    BOX,
    REP,
    Abs,
    App,
    Box,
    Eq,
    Pi,
    PreContext,
    PreSignature,
    PreTerm,
    Refl,
    Rep,
    SignatureEntry,
    SymbolApp,
    Var,
    debruijn,
    fresh,
    free_vars,
    pretty,
    substitute,
    substitute_many,
)

DEFAULT_FUEL = 10_000


def max_steps() -> int:
    try:
        return int(os.environ.get("RMK_MAX_STEPS", DEFAULT_FUEL))
    except ValueError:
        return DEFAULT_FUEL


# -- errors -------------------------------------------------------------------------

class LFError(Exception):
    """A rejected judgment; ``rule`` names the rule whose premise failed."""

    def __init__(self, message: str, rule: str = "", entry: str | None = None, location: str | None = None):
        super().__init__(message)
        self.message = message
        self.rule = rule
        self.entry = entry
        self.location = location

    def __str__(self) -> str:
        where = f" in entry {self.entry!r}" if self.entry else ""
        loc = f" at {self.location}" if self.location else ""
        return f"{type(self).__name__}{where} [rule {self.rule}]{loc}: {self.message}"


class UnboundSymbol(LFError):
    pass


class DuplicateSymbol(LFError):
    pass


class IllFormedContext(LFError):
    pass


class SortError(LFError):
    pass


class TypeMismatch(LFError):
    def __init__(self, message: str, expected=None, inferred=None, **kw):
        super().__init__(message, **kw)
        self.expected = expected
        self.inferred = inferred


class NotRepresentable(LFError):
    pass


class ArityMismatch(LFError):
    pass


class FuelExhausted(LFError):
    """The equality search ran out of steps; this is not a verdict."""


class Verdict(enum.Enum):
    EQUAL = "equal"
    DISTINCT = "distinct"
    UNKNOWN = "unknown"


# -- judgments ----------------------------------------------------------------------

@dataclass(frozen=True)
class SigOk:
    pass


@dataclass(frozen=True)
class CtxOk:
    context: PreContext


@dataclass(frozen=True)
class HasType:
    context: PreContext
    term: PreTerm
    type: PreTerm


@dataclass(frozen=True)
class DefEq:
    context: PreContext
    left: PreTerm
    right: PreTerm
    type: PreTerm


Judgment = Union[SigOk, CtxOk, HasType, DefEq]


# -- checked signatures -------------------------------------------------------------

@dataclass
class CheckedEntry:
    name: str
    context: PreContext  # elaborated
    sort: PreTerm  # BOX, REP or an elaborated type
    certificate: str


@dataclass
class CheckedSignature:
    presignature: PreSignature
    entries: dict = field(default_factory=dict)  # name -> CheckedEntry, in order

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __getitem__(self, name: str) -> CheckedEntry:
        return self.entries[name]

    @property
    def has_equations(self) -> bool:
        return any(isinstance(e.sort, Eq) for e in self.entries.values())

    def type_symbols(self) -> list:
        return [e for e in self.entries.values() if isinstance(e.sort, (Box, Rep))]

    def term_symbols(self) -> list:
        return [e for e in self.entries.values() if not isinstance(e.sort, (Box, Rep))]


def _resolve(t: PreTerm, sig: CheckedSignature, scope: set) -> PreTerm:
    """Re-read bare names: bound names are variables, declared names are symbols."""
    if isinstance(t, Var):
        if t.name not in scope and t.name in sig:
            return SymbolApp(t.name, ())
        return t
    if isinstance(t, (Box, Rep)):
        return t
    if isinstance(t, SymbolApp):
        args = tuple(_resolve(a, sig, scope) for a in t.args)
        if t.name in scope:
            out: PreTerm = Var(t.name)
            for a in args:
                out = App(None, None, None, out, a)
            return out
        return SymbolApp(t.name, args)
    if isinstance(t, Pi):
        return Pi(_resolve(t.dom, sig, scope), t.var, _resolve(t.cod, sig, scope | {t.var}))
    if isinstance(t, Abs):
        d = _resolve(t.dom, sig, scope) if t.dom is not None else None
        return Abs(d, t.var, _resolve(t.body, sig, scope | {t.var}))
    if isinstance(t, App):
        d = _resolve(t.dom, sig, scope) if t.dom is not None else None
        c = _resolve(t.cod, sig, scope | {t.var}) if t.cod is not None else None
        return App(d, t.var, c, _resolve(t.fun, sig, scope), _resolve(t.arg, sig, scope))
    if isinstance(t, Eq):
        ty = _resolve(t.type, sig, scope) if t.type is not None else None
        return Eq(ty, _resolve(t.left, sig, scope), _resolve(t.right, sig, scope))
    if isinstance(t, Refl):
        return Refl(_resolve(t.subject, sig, scope))
    raise TypeError(t)


# -- the checker --------------------------------------------------------------------

class Checker:
    """Typing and equality relative to a fixed checked signature."""

    def __init__(self, sig: CheckedSignature, fuel: int | None = None, entry: str | None = None):
        self.sig = sig
        self.fuel = max_steps() if fuel is None else fuel
        self.steps = 0
        self.entry = entry
        self.unknowns = 0

    # errors carry the current entry
    def _err(self, cls, message: str, rule: str, term: PreTerm | None = None, **kw):
        loc = pretty(term) if term is not None else None
        return cls(message, rule=rule, entry=self.entry, location=loc, **kw)

    def _tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.fuel:
            raise FuelExhausted(f"equality search exceeded {self.fuel} steps", rule="fuel", entry=self.entry)

    # contexts
    def check_context(self, ctx: PreContext) -> PreContext:
        seen = set()
        out = PreContext(())
        for x, A in ctx.entries:
            if x in seen:
                raise self._err(IllFormedContext, f"variable {x!r} declared twice", "ctx-ext")
            seen.add(x)
            A = _resolve(A, self.sig, set(out.names()))
            A2 = self.check_type_formation(out, A, BOX)
            out = out.extend(x, A2)
        return out

    # types
    def check_type_formation(self, ctx: PreContext, A: PreTerm, sort: PreTerm) -> PreTerm:
        """Elaborate ``A`` and check ``ctx |- A : sort`` for ``sort`` in {Box, Rep}."""
        want_rep = isinstance(sort, Rep)
        if isinstance(A, (Box, Rep)):
            raise self._err(SortError, f"{A} is a sort, not a type", "ctx-ext" if not want_rep else "rep", A)
        if isinstance(A, SymbolApp):
            e = self._symbol(A)
            if not isinstance(e.sort, (Box, Rep)):
                raise self._err(SortError, f"{A.name} is a term symbol, not a type former", "sym", A)
            args = self._check_args(ctx, A, e)
            if want_rep and not isinstance(e.sort, Rep):
                raise self._err(NotRepresentable, f"{pretty(A)} has sort Box, not Rep", "rep-sub", A)
            return SymbolApp(A.name, args)
        if isinstance(A, Pi):
            if want_rep:
                raise self._err(NotRepresentable, "a dependent product is not representable", "pi", A)
            dom = self.check_type_formation(ctx, A.dom, REP)
            x = fresh(A.var, set(ctx.names()) | set(self.sig.entries)) if A.var in ctx.names() or A.var in self.sig else A.var
            cod = substitute(A.cod, Var(x), A.var) if x != A.var else A.cod
            cod = self.check_type_formation(ctx.extend(x, dom), cod, BOX)
            return Pi(dom, x, cod)
        if isinstance(A, Eq):
            if want_rep:
                raise self._err(NotRepresentable, "an equation type is not representable", "eq", A)
            return self._equation_type(ctx, A)
        if isinstance(A, Var) and ctx.lookup(A.name) is None:
            raise self._err(UnboundSymbol, f"{A.name!r} is neither bound nor declared", "sym", A)
        raise self._err(SortError, f"{pretty(A)} is not a type", "sort", A)

    def _equation_type(self, ctx: PreContext, A: Eq) -> Eq:
        if A.type is not None:
            T = self.check_type_formation(ctx, A.type, BOX)
            left = self.check(ctx, A.left, T)
        else:
            try:
                left, T = self.infer(ctx, A.left)
            except TypeMismatch:
                right, T = self.infer(ctx, A.right)
                left = self.check(ctx, A.left, T)
                return Eq(T, left, right)
        right = self.check(ctx, A.right, T)
        return Eq(T, left, right)

    def _symbol(self, t: SymbolApp) -> CheckedEntry:
        if t.name not in self.sig:
            raise self._err(UnboundSymbol, f"unknown symbol {t.name!r}", "sym", t)
        return self.sig[t.name]

    def _check_args(self, ctx: PreContext, t: SymbolApp, e: CheckedEntry) -> tuple:
        if len(t.args) != len(e.context):
            raise self._err(
                ArityMismatch, f"{t.name} expects {len(e.context)} arguments, got {len(t.args)}", "sym", t
            )
        return tuple(self.check_morphism(ctx, list(t.args), e.context, rule="sym"))

    def check_morphism(self, ctx: PreContext, f: list, target: PreContext, rule: str = "morphism") -> list:
        """Componentwise typing of ``f : ctx -> target`` against the telescope."""
        if len(f) != len(target):
            raise self._err(ArityMismatch, f"expected {len(target)} components, got {len(f)}", rule)
        out = []
        mapping: dict = {}
        for fi, (y, B) in zip(f, target.entries):
            Bi = substitute_many(B, mapping)
            ei = self.check(ctx, fi, Bi)
            out.append(ei)
            mapping[y] = ei
        return out

    # terms
    def infer(self, ctx: PreContext, t: PreTerm) -> tuple[PreTerm, PreTerm]:
        """Elaborate ``t`` and synthesise its type."""
        if isinstance(t, Var):
            T = ctx.lookup(t.name)
            if T is None:
                raise self._err(UnboundSymbol, f"{t.name!r} is neither bound nor declared", "var", t)
            return t, T
        if isinstance(t, SymbolApp):
            e = self._symbol(t)
            if isinstance(e.sort, (Box, Rep)):
                raise self._err(SortError, f"{t.name} forms types, not terms", "sym", t)
            args = self._check_args(ctx, t, e)
            T = substitute_many(e.sort, dict(zip(e.context.names(), args)))
            return SymbolApp(t.name, args), T
        if isinstance(t, Abs):
            if t.dom is None:
                raise self._err(TypeMismatch, "cannot synthesise the type of an unannotated abstraction", "abs", t)
            dom = self.check_type_formation(ctx, t.dom, REP)
            x, body = self._open(ctx, t.var, t.body)
            body, B = self.infer(ctx.extend(x, dom), body)
            return Abs(dom, x, body), Pi(dom, x, B)
        if isinstance(t, App):
            return self._infer_app(ctx, t)
        if isinstance(t, Refl):
            a, A = self.infer(ctx, t.subject)
            return Refl(a), Eq(A, a, a)
        if isinstance(t, (Box, Rep, Pi, Eq)):
            raise self._err(SortError, f"{pretty(t)} is a type or sort, not a term", "sort", t)
        raise TypeError(t)

    def _open(self, ctx: PreContext, var: str, body: PreTerm) -> tuple[str, PreTerm]:
        avoid = set(ctx.names()) | set(self.sig.entries)
        if var in avoid:
            x = fresh(var, avoid | free_vars(body))
            return x, substitute(body, Var(x), var)
        return var, body

    def _infer_app(self, ctx: PreContext, t: App) -> tuple[PreTerm, PreTerm]:
        if t.dom is not None and t.cod is not None:
            dom = self.check_type_formation(ctx, t.dom, REP)
            x, cod = self._open(ctx, t.var, t.cod)
            cod = self.check_type_formation(ctx.extend(x, dom), cod, BOX)
            P = Pi(dom, x, cod)
            fun = self.check(ctx, t.fun, P)
        else:
            fun, T = self.infer(ctx, t.fun)
            P = self.whnf(T)
            if not isinstance(P, Pi):
                raise self._err(
                    TypeMismatch, f"applying a term of non-product type {pretty(T)}", "app", t, expected="product", inferred=T
                )
        arg = self.check(ctx, t.arg, P.dom)
        return App(P.dom, P.var, P.cod, fun, arg), substitute(P.cod, arg, P.var)

    def check(self, ctx: PreContext, t: PreTerm, T: PreTerm) -> PreTerm:
        """Elaborate ``t`` and check ``ctx |- t : T`` (``T`` already elaborated)."""
        if isinstance(T, Box) or isinstance(T, Rep):
            return self.check_type_formation(ctx, t, T)
        if isinstance(t, Abs) and t.dom is None:
            P = self.whnf(T)
            if not isinstance(P, Pi):
                raise self._err(TypeMismatch, f"abstraction checked against {pretty(T)}", "abs", t, expected=T)
            x, body = self._open(ctx, t.var, t.body)
            B = substitute(P.cod, Var(x), P.var)
            body = self.check(ctx.extend(x, P.dom), body, B)
            return Abs(P.dom, x, body)
        if isinstance(t, Refl):
            E = self.whnf(T)
            if isinstance(E, Eq):
                a = self.check(ctx, t.subject, E.type)
                for side in (E.left, E.right):
                    v = self.equal(ctx, a, side, E.type)
                    if v is not Verdict.EQUAL:
                        raise self._err(
                            TypeMismatch,
                            f"refl {pretty(a)} does not prove {pretty(E.left)} = {pretty(E.right)} ({v.value})",
                            "refl",
                            t,
                            expected=T,
                        )
                return Refl(a)
        e, S = self.infer(ctx, t)
        v = self.types_equal(ctx, S, T)
        if v is not Verdict.EQUAL:
            raise self._err(
                TypeMismatch,
                f"expected {pretty(T)}, inferred {pretty(S)} ({v.value})",
                "conv",
                t,
                expected=T,
                inferred=S,
            )
        return e

    # reduction
    def whnf(self, t: PreTerm) -> PreTerm:
        while isinstance(t, App):
            f = self.whnf(t.fun)
            if isinstance(f, Abs):
                self._tick()
                t = substitute(f.body, t.arg, f.var)
            else:
                return App(t.dom, t.var, t.cod, f, t.arg) if f is not t.fun else t
        return t

    def nf(self, t: PreTerm) -> PreTerm:
        """Beta-normal form (annotations normalised too)."""
        if isinstance(t, (Var, Box, Rep)):
            return t
        if isinstance(t, SymbolApp):
            return SymbolApp(t.name, tuple(self.nf(a) for a in t.args))
        if isinstance(t, Pi):
            return Pi(self.nf(t.dom), t.var, self.nf(t.cod))
        if isinstance(t, Abs):
            return Abs(self.nf(t.dom) if t.dom is not None else None, t.var, self.nf(t.body))
        if isinstance(t, App):
            f = self.nf(t.fun)
            if isinstance(f, Abs):
                self._tick()
                return self.nf(substitute(f.body, t.arg, f.var))
            dom = self.nf(t.dom) if t.dom is not None else None
            cod = self.nf(t.cod) if t.cod is not None else None
            return App(dom, t.var, cod, f, self.nf(t.arg))
        if isinstance(t, Eq):
            return Eq(self.nf(t.type) if t.type is not None else None, self.nf(t.left), self.nf(t.right))
        if isinstance(t, Refl):
            return Refl(self.nf(t.subject))
        raise TypeError(t)

    # equality
    def hypotheses(self, ctx: PreContext) -> list[tuple[PreTerm, PreTerm]]:
        out = []
        for _, T in ctx.entries:
            E = self.whnf(T)
            if isinstance(E, Eq):
                out.append((self.nf(E.left), self.nf(E.right)))
        return out

    def _fail_verdict(self, ctx: PreContext) -> Verdict:
        if self.hypotheses(ctx) or self.sig.has_equations:
            self.unknowns += 1
            return Verdict.UNKNOWN
        return Verdict.DISTINCT

    def equal(self, ctx: PreContext, a: PreTerm, b: PreTerm, A: PreTerm) -> Verdict:
        """``ctx |- a == b : A`` for elaborated ``a``, ``b`` and ``A``."""
        self._tick()
        if isinstance(A, (Box, Rep)):
            return self.types_equal(ctx, a, b)
        T = self.whnf(A)
        if isinstance(T, Eq):
            return Verdict.EQUAL
        if isinstance(T, Pi):
            z = fresh(T.var, set(ctx.names()) | free_vars(a) | free_vars(b) | set(self.sig.entries))
            za = App(T.dom, T.var, T.cod, a, Var(z))
            zb = App(T.dom, T.var, T.cod, b, Var(z))
            return self.equal(ctx.extend(z, T.dom), za, zb, substitute(T.cod, Var(z), T.var))
        na, nb = self.nf(a), self.nf(b)
        if debruijn(na) == debruijn(nb):
            return Verdict.EQUAL
        if self._neutral_equal(ctx, na, nb):
            return Verdict.EQUAL
        if self._congruent(ctx, na, nb):
            return Verdict.EQUAL
        return self._fail_verdict(ctx)

    def _neutral_equal(self, ctx: PreContext, a: PreTerm, b: PreTerm) -> bool:
        """Same head, arguments equal at their own types."""
        if isinstance(a, Var) and isinstance(b, Var):
            return a.name == b.name
        if isinstance(a, SymbolApp) and isinstance(b, SymbolApp):
            if a.name != b.name or len(a.args) != len(b.args) or a.name not in self.sig:
                return False
            return self._args_equal(ctx, a.args, b.args, self.sig[a.name].context)
        if isinstance(a, App) and isinstance(b, App) and a.dom is not None and b.dom is not None:
            # The heads are neutral, so they are compared structurally; comparing
            # them at the product type would eta-expand back to this same case.
            if not self._neutral_equal(ctx, a.fun, b.fun):
                return False
            return self.equal(ctx, a.arg, b.arg, a.dom) is Verdict.EQUAL
        return False

    def _args_equal(self, ctx, xs, ys, tele: PreContext) -> bool:
        mapping: dict = {}
        for x, y, (v, B) in zip(xs, ys, tele.entries):
            if self.equal(ctx, x, y, substitute_many(B, mapping)) is not Verdict.EQUAL:
                return False
            mapping[v] = x
        return True

    def types_equal(self, ctx: PreContext, A: PreTerm, B: PreTerm) -> Verdict:
        self._tick()
        A, B = self.nf(A), self.nf(B)
        if debruijn(A) == debruijn(B):
            return Verdict.EQUAL
        if isinstance(A, SymbolApp) and isinstance(B, SymbolApp) and A.name == B.name and A.name in self.sig:
            if len(A.args) == len(B.args) and self._args_equal(ctx, A.args, B.args, self.sig[A.name].context):
                return Verdict.EQUAL
            return self._fail_verdict(ctx)
        if isinstance(A, Pi) and isinstance(B, Pi):
            v = self.types_equal(ctx, A.dom, B.dom)
            if v is not Verdict.EQUAL:
                return v
            z = fresh(A.var, set(ctx.names()) | free_vars(A) | free_vars(B) | set(self.sig.entries))
            return self.types_equal(
                ctx.extend(z, A.dom), substitute(A.cod, Var(z), A.var), substitute(B.cod, Var(z), B.var)
            )
        if isinstance(A, Eq) and isinstance(B, Eq):
            v = self.types_equal(ctx, A.type, B.type)
            if v is not Verdict.EQUAL:
                return v
            for l, r in ((A.left, B.left), (A.right, B.right)):
                v = self.equal(ctx, l, r, A.type)
                if v is not Verdict.EQUAL:
                    return v
            return Verdict.EQUAL
        if type(A) is type(B):
            return self._fail_verdict(ctx)
        return Verdict.DISTINCT

    def _congruent(self, ctx: PreContext, a: PreTerm, b: PreTerm) -> bool:
        hyps = self.hypotheses(ctx)
        if not hyps:
            return False
        cc = CongruenceClosure(self._tick)
        for l, r in hyps:
            cc.merge(cc.add(_cc_key(debruijn(l))), cc.add(_cc_key(debruijn(r))))
        ka, kb = cc.add(_cc_key(debruijn(a))), cc.add(_cc_key(debruijn(b)))
        cc.close()
        return cc.find(ka) == cc.find(kb)


def _cc_key(k):
    """Drop annotations from application nodes so congruence sees only function and argument."""
    if not isinstance(k, tuple):
        return k
    if k[0] == "app":
        return ("app", _cc_key(k[3]), _cc_key(k[4]))
    return tuple(_cc_key(x) if isinstance(x, tuple) else x for x in k)


class CongruenceClosure:
    """Naive ground congruence closure over nameless term keys."""

    def __init__(self, tick=lambda n=1: None):
        self.parent: dict = {}
        self.nodes: set = set()
        self.tick = tick

    def add(self, k):
        if k in self.parent:
            return k
        self.parent[k] = k
        self.nodes.add(k)
        for child in _children(k):
            self.add(child)
        return k

    def find(self, k):
        while self.parent[k] != k:
            self.parent[k] = self.parent[self.parent[k]]
            k = self.parent[k]
        return k

    def merge(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True

    def close(self) -> None:
        changed = True
        while changed:
            changed = False
            table: dict = {}
            for k in self.nodes:
                kids = _children(k)
                if not kids:
                    continue
                self.tick()
                sig = (_label(k), tuple(self.find(c) for c in kids))
                other = table.get(sig)
                if other is None:
                    table[sig] = k
                elif self.merge(k, other):
                    changed = True


def _children(k) -> tuple:
    if not isinstance(k, tuple):
        return ()
    tag = k[0]
    if tag == "sym":
        return tuple(k[2])
    if tag in ("pi", "abs"):
        return tuple(c for c in k[1:] if c is not None)
    if tag == "app":
        return (k[1], k[2])
    if tag == "eq":
        return tuple(c for c in k[1:] if c is not None)
    if tag == "refl":
        return (k[1],)
    return ()


def _label(k):
    if k[0] == "sym":
        return ("sym", k[1], len(k[2]))
    if k[0] in ("abs", "eq"):
        return (k[0], tuple(c is None for c in k[1:]))
    return (k[0],)


# -- signature checking ---------------------------------------------------------------

def check_signature(sig: PreSignature, fuel: int | None = None) -> CheckedSignature:
    """Check every prefix in order; the first failure is raised with its entry and rule."""
    checked = CheckedSignature(sig, {})
    for e in sig.entries:
        _check_entry(checked, e, fuel)
    return checked


def _check_entry(checked: CheckedSignature, e: SignatureEntry, fuel: int | None) -> None:
    if e.name in checked.entries:
        raise DuplicateSymbol(f"symbol {e.name!r} declared twice", rule="sig", entry=e.name)
    ck = Checker(checked, fuel, entry=e.name)
    ctx = ck.check_context(e.context)
    if isinstance(e.sort, (Box, Rep)):
        sort: PreTerm = e.sort
        rule = "sig-sort"
    else:
        A = _resolve(e.sort, checked, set(ctx.names()))
        sort = ck.check_type_formation(ctx, A, BOX)
        rule = "sig-type"
    checked.entries[e.name] = CheckedEntry(e.name, ctx, sort, rule)


def extend_signature(checked: CheckedSignature, more: PreSignature, fuel: int | None = None) -> CheckedSignature:
    out = CheckedSignature(checked.presignature + more, dict(checked.entries))
    for e in more.entries:
        _check_entry(out, e, fuel)
    return out


# -- public judgment API -------------------------------------------------------------

def _prep_ctx(sig: CheckedSignature, ctx: PreContext, fuel=None) -> tuple[Checker, PreContext]:
    ck = Checker(sig, fuel)
    return ck, ck.check_context(ctx)


@dataclass
class TypeCheckResult:
    ok: bool
    elaborated: PreTerm | None
    trace: list
    error: LFError | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_type(sig: CheckedSignature, ctx: PreContext, term: PreTerm, expected: PreTerm, fuel=None) -> TypeCheckResult:
    """``ctx |- term : expected`` where ``expected`` is Box, Rep or a type."""
    trace: list = []
    try:
        ck, c = _prep_ctx(sig, ctx, fuel)
        trace.append(f"context {len(c)} entries ok")
        scope = set(c.names())
        t = _resolve(term, sig, scope)
        if isinstance(expected, (Box, Rep)):
            e = ck.check_type_formation(c, t, expected)
            trace.append(f"type formation at {expected}")
        else:
            T = ck.check_type_formation(c, _resolve(expected, sig, scope), BOX)
            e = ck.check(c, t, T)
            trace.append("checked against type")
        return TypeCheckResult(True, e, trace)
    except FuelExhausted:
        raise
    except LFError as exc:
        trace.append(str(exc))
        return TypeCheckResult(False, None, trace, exc)


def infer_type(sig: CheckedSignature, ctx: PreContext, term: PreTerm, fuel=None) -> tuple[PreTerm, PreTerm]:
    ck, c = _prep_ctx(sig, ctx, fuel)
    return ck.infer(c, _resolve(term, sig, set(c.names())))


def check_equal_verdict(sig: CheckedSignature, ctx: PreContext, a: PreTerm, b: PreTerm, A: PreTerm, fuel=None) -> Verdict:
    ck, c = _prep_ctx(sig, ctx, fuel)
    scope = set(c.names())
    if isinstance(A, (Box, Rep)):
        ea = ck.check_type_formation(c, _resolve(a, sig, scope), A)
        eb = ck.check_type_formation(c, _resolve(b, sig, scope), A)
        return ck.types_equal(c, ea, eb)
    T = ck.check_type_formation(c, _resolve(A, sig, scope), BOX)
    ea = ck.check(c, _resolve(a, sig, scope), T)
    eb = ck.check(c, _resolve(b, sig, scope), T)
    return ck.equal(c, ea, eb, T)


def check_equal(sig: CheckedSignature, ctx: PreContext, a: PreTerm, b: PreTerm, A: PreTerm, fuel=None) -> bool:
    return check_equal_verdict(sig, ctx, a, b, A, fuel) is Verdict.EQUAL


def check_context(sig: CheckedSignature, ctx: PreContext, fuel=None) -> PreContext:
    return Checker(sig, fuel).check_context(ctx)


def check_context_morphism(sig: CheckedSignature, f: list, gamma: PreContext, delta: PreContext, fuel=None) -> bool:
    ck = Checker(sig, fuel)
    g = ck.check_context(gamma)
    d = ck.check_context(delta)
    ck.check_morphism(g, [_resolve(t, sig, set(g.names())) for t in f], d)
    return True


def elaborate_morphism(sig: CheckedSignature, f: list, gamma: PreContext, delta: PreContext, fuel=None) -> list:
    ck = Checker(sig, fuel)
    g = ck.check_context(gamma)
    d = ck.check_context(delta)
    return ck.check_morphism(g, [_resolve(t, sig, set(g.names())) for t in f], d)


def morphisms_equal_verdict(sig, f: list, g: list, gamma: PreContext, delta: PreContext, fuel=None) -> Verdict:
    ck = Checker(sig, fuel)
    G = ck.check_context(gamma)
    D = ck.check_context(delta)
    scope = set(G.names())
    ef = ck.check_morphism(G, [_resolve(t, sig, scope) for t in f], D)
    eg = ck.check_morphism(G, [_resolve(t, sig, scope) for t in g], D)
    mapping: dict = {}
    worst = Verdict.EQUAL
    for a, b, (y, B) in zip(ef, eg, D.entries):
        v = ck.equal(G, a, b, substitute_many(B, mapping))
        if v is Verdict.DISTINCT:
            return v
        if v is Verdict.UNKNOWN:
            worst = v
        mapping[y] = a
    return worst


def morphisms_equal(sig, f: list, g: list, gamma: PreContext, delta: PreContext, fuel=None) -> bool:
    return morphisms_equal_verdict(sig, f, g, gamma, delta, fuel) is Verdict.EQUAL


def check_judgment(sig: CheckedSignature, J: Judgment, fuel=None) -> bool:
    """Accept or raise; ``SigOk`` holds for any checked signature."""
    if isinstance(J, SigOk):
        return True
    if isinstance(J, CtxOk):
        check_context(sig, J.context, fuel)
        return True
    if isinstance(J, HasType):
        r = check_type(sig, J.context, J.term, J.type, fuel)
        if not r.ok:
            raise r.error
        return True
    if isinstance(J, DefEq):
        v = check_equal_verdict(sig, J.context, J.left, J.right, J.type, fuel)
        if v is not Verdict.EQUAL:
            raise TypeMismatch(f"terms are not judged equal ({v.value})", rule="eq")
        return True
    raise TypeError(J)


def weaken_signature(base: PreSignature, extra: PreSignature, other: PreSignature, J: Judgment, fuel=None) -> Judgment:
    """Re-check ``J`` (legal over ``base, other``) over ``base, extra, other``."""
    names = [set(base.names()), set(extra.names()), set(other.names())]
    for i in range(3):
        for j in range(i + 1, 3):
            clash = names[i] & names[j]
            if clash:
                raise DuplicateSymbol(f"symbols declared twice: {sorted(clash)}", rule="sig")
    check_signature(base + extra, fuel)
    check_judgment(check_signature(base + other, fuel), J, fuel)
    check_judgment(check_signature(base + extra + other, fuel), J, fuel)
    return J
