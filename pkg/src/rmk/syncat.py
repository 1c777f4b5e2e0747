"""Bounded approximation of the syntactic representable map category of a signature.

Objects are contexts with at most ``depth`` variables whose types have size
at most ``size``; variables are named ``v1, v2, ...`` so contexts are
compared up to renaming by construction.  Arrows are tuples of normal-form
terms of size at most ``size``, quotiented by the checker's equality.
Composition is substitution.  Because the checker's equality is incomplete,
classes may be over-counted; every such comparison is recorded in
``caveats``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .fincat import FinCat, Overflow, format_fincat, is_pullback_square
from .lf_checker import Checker, CheckedSignature, LFError, Verdict
from .lf_enum import RawEnumerator, checked_terms, checked_types
from .lf_syntax import (
    REP,
    PreContext,
    PreTerm,
    Var,
    debruijn,
    pretty,
    pretty_context,
    substitute_many,
)


@dataclass(frozen=True)
class Bounds:
    depth: int = 2
    size: int = 4
    max_count: int = 20_000

    def __post_init__(self):
        if self.depth < 0 or self.size < 1 or self.max_count < 1:
            raise ValueError("bounds must be positive")

    def __str__(self) -> str:
        return f"depth={self.depth} size={self.size} max_count={self.max_count}"


def _ctx_key(ctx: PreContext) -> tuple:
    return tuple(debruijn(A, tuple(ctx.names()[:i])) for i, (_, A) in enumerate(ctx.entries))


@dataclass
class SynCatApprox:
    sig: CheckedSignature
    bounds: Bounds
    contexts: list  # PreContext, variables v1..vn
    homs: dict  # (i, j) -> list of representative tuples
    composition: dict = field(default_factory=dict)  # ((j,k,b),(i,j,a)) -> class index in (i,k) or None
    caveats: list = field(default_factory=list)
    partial: bool = False
    added_by_closure: int = 0
    _keys: dict = field(default_factory=dict, repr=False)

    def note(self, caveat: str) -> None:
        if caveat not in self.caveats:
            self.caveats.append(caveat)

    def index(self, ctx: PreContext) -> int | None:
        k = _ctx_key(ctx)
        for i, c in enumerate(self.contexts):
            if _ctx_key(c) == k:
                return i
        return None

    def identity(self, i: int) -> int:
        ids = tuple(Var(x) for x in self.contexts[i].names())
        return self.class_of(i, i, ids)

    def class_of(self, i: int, j: int, f: tuple) -> int | None:
        """Index of the class of ``f : contexts[i] -> contexts[j]``, if present."""
        key = tuple(debruijn(t) for t in f)
        keys = self._keys.setdefault((i, j), {})
        reps = self.homs[(i, j)]
        for n in range(len(keys), len(reps)):
            keys.setdefault(tuple(debruijn(t) for t in reps[n]), n)
        if key in keys:
            return keys[key]
        ck = Checker(self.sig)
        G, D = self.contexts[i], self.contexts[j]
        for n, g in enumerate(reps):
            v = _tuple_equal(ck, G, D, f, g)
            if v is Verdict.EQUAL:
                keys[key] = n
                return n
            if v is Verdict.UNKNOWN:
                self.note(f"equality-incomplete: {i}->{j}")
        return None

    def composite(self, i: int, j: int, k: int, a: int, b: int) -> tuple:
        """The substitution ``g[f]`` for ``f = homs[i, j][a]`` and ``g = homs[j, k][b]``, normalised."""
        f = self.homs[(i, j)][a]
        g = self.homs[(j, k)][b]
        names = self.contexts[j].names()
        ck = Checker(self.sig)
        return tuple(ck.nf(substitute_many(t, dict(zip(names, f)))) for t in g)

    def compose(self, i: int, j: int, k: int, a: int, b: int) -> int | None:
        """Class of ``b . a`` for ``a : i -> j`` and ``b : j -> k``."""
        key = ((j, k, b), (i, j, a))
        if self.composition.get(key) is None:
            self.composition[key] = self.class_of(i, k, self.composite(i, j, k, a, b))
        return self.composition[key]

    def close_under_composition(self) -> None:
        """Add composites that fell outside the size bound as further classes.

        Substitution can enlarge terms, so the size-bounded hom-sets need not
        be closed under composition.  Saturation stops with :class:`Overflow`
        once the total number of classes exceeds ``bounds.max_count``.
        """
        n = len(self.contexts)
        changed = True
        while changed:
            changed = False
            for i, j, k in itertools.product(range(n), repeat=3):
                for a in range(len(self.homs[(i, j)])):
                    for b in range(len(self.homs[(j, k)])):
                        if self.compose(i, j, k, a, b) is None:
                            self.homs[(i, k)].append(self.composite(i, j, k, a, b))
                            self.added_by_closure += 1
                            changed = True
                            if sum(map(len, self.homs.values())) > self.bounds.max_count:
                                self.partial = True
                                raise Overflow("composition closure exceeded the bound", partial=self)

    def hom_count(self, i: int, j: int) -> int:
        return len(self.homs[(i, j)])

    def to_fincat(self) -> FinCat:
        """The bounded category as a :class:`FinCat`; raises if a composite left the bounds."""
        n = len(self.contexts)
        objects = list(range(n))
        arrows = {}
        identities = {}
        for (i, j), reps in self.homs.items():
            for a in range(len(reps)):
                arrows[(i, j, a)] = (i, j)
        for i in objects:
            identities[i] = (i, i, self.identity(i))
        comp = {}
        for i, j, k in itertools.product(objects, repeat=3):
            for a in range(len(self.homs[(i, j)])):
                for b in range(len(self.homs[(j, k)])):
                    c = self.compose(i, j, k, a, b)
                    if c is None:
                        raise Overflow(f"composite of {(i, j, a)} and {(j, k, b)} is not in the approximation")
                    comp[((j, k, b), (i, j, a))] = (i, k, c)
        return FinCat(objects, arrows, identities, comp, name=f"sRM~({self.bounds})").validate()

    def describe(self) -> list[str]:
        lines = [f"bounds {self.bounds}"]
        for i, c in enumerate(self.contexts):
            lines.append(f"context {i}: {pretty_context(c)}")
        for (i, j), reps in sorted(self.homs.items()):
            if reps:
                shown = "; ".join("(" + ", ".join(pretty(t) for t in f) + ")" for f in reps)
                lines.append(f"hom {i} -> {j}: {len(reps)} [{shown}]")
        return lines


def _tuple_equal(ck: Checker, G: PreContext, D: PreContext, f: tuple, g: tuple) -> Verdict:
    mapping: dict = {}
    worst = Verdict.EQUAL
    for a, b, (y, B) in zip(f, g, D.entries):
        ck.steps = 0
        v = ck.equal(G, a, b, substitute_many(B, mapping))
        if v is Verdict.DISTINCT:
            return v
        if v is Verdict.UNKNOWN:
            worst = v
        mapping[y] = a
    return worst


def enumerate_contexts(sig: CheckedSignature, bounds: Bounds, enum: RawEnumerator | None = None) -> list[PreContext]:
    enum = enum or RawEnumerator(sig)
    out = [PreContext(())]
    frontier = [PreContext(())]
    for d in range(bounds.depth):
        nxt = []
        for ctx in frontier:
            for A in checked_types(enum, ctx, bounds.size):
                c = ctx.extend(f"v{d + 1}", A)
                nxt.append(c)
                if len(out) + len(nxt) > bounds.max_count:
                    raise Overflow("too many contexts", partial=out + nxt)
        out.extend(nxt)
        frontier = nxt
    return out


def enumerate_morphisms(sig, G: PreContext, D: PreContext, bounds: Bounds, enum: RawEnumerator) -> list[tuple]:
    """All tuples ``f : G -> D`` with components of size at most ``bounds.size``."""
    out: list = []

    def go(i: int, acc: list, mapping: dict):
        if i == len(D):
            out.append(tuple(acc))
            if len(out) > bounds.max_count:
                raise Overflow("too many morphisms", partial=out)
            return
        y, B = D.entries[i]
        for t in checked_terms(enum, G, substitute_many(B, mapping), bounds.size):
            go(i + 1, acc + [t], {**mapping, y: t})

    go(0, [], {})
    return out


def build_syncat(sig: CheckedSignature, bounds: Bounds = Bounds()) -> SynCatApprox:
    enum = RawEnumerator(sig)
    try:
        contexts = enumerate_contexts(sig, bounds, enum)
        partial = False
    except Overflow as exc:
        contexts, partial = exc.partial, True
    sc = SynCatApprox(sig, bounds, contexts, {}, partial=partial)
    ck = Checker(sig)
    for i, G in enumerate(contexts):
        for j, D in enumerate(contexts):
            try:
                raw = enumerate_morphisms(sig, G, D, bounds, enum)
            except Overflow as exc:
                raw, sc.partial = exc.partial, True
            reps: list = []
            for f in raw:
                matched = False
                for g in reps:
                    v = _tuple_equal(ck, G, D, f, g)
                    if v is Verdict.EQUAL:
                        matched = True
                        break
                    if v is Verdict.UNKNOWN:
                        sc.note(f"equality-incomplete: {i}->{j}")
                if not matched:
                    reps.append(f)
            sc.homs[(i, j)] = reps
    sc.close_under_composition()
    return sc


# -- structure checks ---------------------------------------------------------------

def check_terminal(sc: SynCatApprox) -> bool:
    t = sc.index(PreContext(()))
    return t is not None and all(sc.hom_count(i, t) == 1 for i in range(len(sc.contexts)))


@dataclass(frozen=True)
class Generator:
    source: int  # (G, x : A)
    target: int  # G
    arrow: int  # class index of the projection


def generating_representables(sc: SynCatApprox) -> list[Generator]:
    """Projections ``(G, x : A) -> G`` with ``G |- A : Rep``."""
    out = []
    for s, ctx in enumerate(sc.contexts):
        if not len(ctx):
            continue
        base = PreContext(ctx.entries[:-1])
        t = sc.index(base)
        if t is None:
            continue
        ck = Checker(sc.sig)
        try:
            ck.check_type_formation(base, ctx.entries[-1][1], REP)
        except LFError:
            continue
        proj = tuple(Var(x) for x in base.names())
        a = sc.class_of(s, t, proj)
        if a is not None:
            out.append(Generator(s, t, a))
    return out


def is_generator(sc: SynCatApprox, source: PreContext, target: PreContext) -> bool:
    s, t = sc.index(source), sc.index(target)
    return any(g.source == s and g.target == t for g in generating_representables(sc))


@dataclass
class PullbackReport:
    checked: int = 0
    verified: int = 0
    bound_limited: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def pullback_context(sc: SynCatApprox, g: Generator, s_idx: int, sigma: int) -> tuple[PreContext, tuple, tuple]:
    """``(D, x : A[sigma])`` with its maps to ``(G, x : A)`` and to ``D``."""
    D = sc.contexts[s_idx]
    G = sc.contexts[g.target]
    f = sc.homs[(s_idx, g.target)][sigma]
    A = sc.contexts[g.source].entries[-1][1]
    As = substitute_many(A, dict(zip(G.names(), f)))
    x = f"v{len(D) + 1}"
    P = D.extend(x, As)
    to_source = tuple(f) + (Var(x),)
    to_base = tuple(Var(y) for y in D.names())
    return P, to_source, to_base


def check_generator_pullback(sc: SynCatApprox, C: FinCat, g: Generator, d: int, sigma: int) -> str:
    """``"verified"``, ``"failed"`` or ``"bound-limited"`` for the extension of ``g`` along ``homs[d, g.target][sigma]``."""
    P, to_src, to_base = pullback_context(sc, g, d, sigma)
    p = sc.index(P)
    if p is None:
        return "bound-limited"
    top = sc.class_of(p, g.source, to_src)
    left = sc.class_of(p, d, to_base)
    if top is None or left is None:
        return "bound-limited"
    ok = is_pullback_square(C, (p, g.source, top), (p, d, left), (g.source, g.target, g.arrow), (d, g.target, sigma))
    return "verified" if ok else "failed"


def check_representable_pullbacks(sc: SynCatApprox, fincat: FinCat | None = None) -> PullbackReport:
    """For each generator and each arrow into its codomain, verify the substituted extension."""
    C = fincat or sc.to_fincat()
    rep = PullbackReport()
    for g in generating_representables(sc):
        for d in range(len(sc.contexts)):
            for sigma in range(sc.hom_count(d, g.target)):
                rep.checked += 1
                outcome = check_generator_pullback(sc, C, g, d, sigma)
                if outcome == "verified":
                    rep.verified += 1
                elif outcome == "failed":
                    rep.failures.append((g, d, sigma))
                else:
                    rep.bound_limited.append((g, d, sigma))
    return rep


def fincat_dump(sc: SynCatApprox) -> str:
    return format_fincat(sc.to_fincat())
