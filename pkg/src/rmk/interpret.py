"""Interpretation of the basic dependent type theory signature in a natural model.

A natural model ``p : E -> U`` over a base ``B`` interprets ``Type`` as ``U``
and ``el`` as ``E``.  A context is sent to the discrete fibration whose fiber
over ``c`` is the set of environments at ``c``; a product over ``el(A)`` is
read polynomially, as a value at the context extension ``{A}``; an equation
is inhabited exactly when both sides have the same value.  A context
morphism is sent to the map of fibrations computed by evaluating its
components.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import dfib as dm
from .dfib import DFib, DFibMap
from .lf_syntax import App, Abs, Eq, Pi, PreContext, PreTerm, Refl, SymbolApp, Var, pretty, substitute, substitute_many

REFL = "refl"


class Unsupported(Exception):
    """A construct outside the fragment handled by the interpretation."""


@dataclass(frozen=True)
class Fun:
    """A value of a product type: its body, evaluated at the context extension."""

    body: object


class Interpretation:
    def __init__(self, model, type_sort: str = "Type", el_sort: str = "el", p: str = "p"):
        self.model = model
        self.B = model.base
        self.U = model.fibrations[type_sort]
        self.E = model.fibrations[el_sort]
        self.p = model.maps[p]
        self.w = model.witness(p)
        self.type_sym = type_sort
        self.el_sym = el_sort

    # types --------------------------------------------------------------------

    def _el_arg(self, T: PreTerm) -> PreTerm | None:
        if isinstance(T, SymbolApp) and T.name == self.el_sym and len(T.args) == 1:
            return T.args[0]
        return None

    def _is_type(self, T: PreTerm) -> bool:
        return isinstance(T, SymbolApp) and T.name == self.type_sym and not T.args

    def _extend(self, c, env: dict, A: PreTerm, y: str):
        """The extension ``{A}`` of ``c`` and the environment there with ``y`` generic."""
        a = self.value(c, env, A, SymbolApp(self.type_sym, ()))
        c2 = self.w.extension(c, a)
        pi = self.w.projection(c, a)
        env2 = self.restrict_env(env, pi)
        env2[y] = self.w.generic(c, a)
        env2["__ctx__"] = env["__ctx__"].extend(y, SymbolApp(self.el_sym, (A,)))
        return c2, env2

    def values(self, c, env: dict, T: PreTerm) -> list:
        """The values of type ``T`` at ``c`` under ``env``."""
        if self._is_type(T):
            return list(self.U.fiber(c))
        A = self._el_arg(T)
        if A is not None:
            a = self.value(c, env, A, SymbolApp(self.type_sym, ()))
            return [e for e in self.E.fiber(c) if self.p(c, e) == a]
        if isinstance(T, Pi):
            A = self._el_arg(T.dom)
            if A is None:
                raise Unsupported(f"product over a non-el domain: {pretty(T)}")
            c2, env2 = self._extend(c, env, A, T.var)
            return [Fun(v) for v in self.values(c2, env2, T.cod)]
        if isinstance(T, Eq):
            l = self.value(c, env, T.left, T.type)
            r = self.value(c, env, T.right, T.type)
            return [REFL] if l == r else []
        raise Unsupported(f"type {pretty(T)}")

    # terms --------------------------------------------------------------------

    def value(self, c, env: dict, t: PreTerm, T: PreTerm):
        """The value of the term ``t : T`` at ``c`` under ``env``."""
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Refl):
            return REFL
        if isinstance(T, Eq):
            return REFL
        if isinstance(t, Abs):
            if not isinstance(T, Pi):
                raise Unsupported(f"abstraction at non-product type {pretty(T)}")
            A = self._el_arg(T.dom)
            if A is None:
                raise Unsupported(f"product over a non-el domain: {pretty(T)}")
            c2, env2 = self._extend(c, env, A, t.var)
            return Fun(self.value(c2, env2, t.body, substitute(T.cod, Var(t.var), T.var)))
        if isinstance(t, App):
            if t.dom is None:
                raise Unsupported("unannotated application")
            A = self._el_arg(t.dom)
            if A is None:
                raise Unsupported(f"application over a non-el domain: {pretty(t.dom)}")
            P = Pi(t.dom, t.var, t.cod)
            f = self.value(c, env, t.fun, P)
            a = self.value(c, env, A, SymbolApp(self.type_sym, ()))
            e = self.value(c, env, t.arg, t.dom)
            c2, env2 = self._extend(c, env, A, t.var)
            s = self.w.lift(c, a, c, e, self.B.id(c))
            return self.restrict(f.body, c2, env2, t.cod, s)
        raise Unsupported(f"term {pretty(t)}")

    # restriction --------------------------------------------------------------

    def restrict(self, v, c, env: dict, T: PreTerm, h):
        """Restrict the value ``v : T`` at ``c`` along ``h : c0 -> c``."""
        if self._is_type(T):
            return self.U.act(v, h)
        if self._el_arg(T) is not None:
            return self.E.act(v, h)
        if isinstance(T, Eq):
            return REFL
        if isinstance(T, Pi):
            A = self._el_arg(T.dom)
            a = self.value(c, env, A, SymbolApp(self.type_sym, ()))
            c2, env2 = self._extend(c, env, A, T.var)
            h2 = self.w.arrow(h, a)
            return Fun(self.restrict(v.body, c2, env2, T.cod, h2))
        raise Unsupported(f"type {pretty(T)}")

    def restrict_env(self, env: dict, h) -> dict:
        """Restrict an environment at ``c`` along ``h``; its context is stored under ``__ctx__``."""
        ctx = env["__ctx__"]
        c = self.B.tgt(h)
        out: dict = {"__ctx__": ctx}
        prefix: dict = {"__ctx__": PreContext(())}
        for i, (x, T) in enumerate(ctx.entries):
            out[x] = self.restrict(env[x], c, prefix, T, h)
            prefix[x] = env[x]
            prefix["__ctx__"] = PreContext(ctx.entries[: i + 1])
        return out

    # contexts and morphisms ---------------------------------------------------

    def environments(self, ctx: PreContext, c) -> list[tuple]:
        """All environments for ``ctx`` at ``c``, as value tuples."""
        out: list = []

        def go(i, env, acc):
            if i == len(ctx):
                out.append(tuple(acc))
                return
            x, T = ctx.entries[i]
            for v in self.values(c, env, T):
                go(i + 1, {**env, x: v, "__ctx__": PreContext(ctx.entries[: i + 1])}, acc + [v])

        go(0, {"__ctx__": PreContext(())}, [])
        return out

    def env_dict(self, ctx: PreContext, vals: tuple) -> dict:
        env: dict = {"__ctx__": ctx}
        for (x, _), v in zip(ctx.entries, vals):
            env[x] = v
        return env

    def context(self, ctx: PreContext) -> DFib:
        fibers = {c: self.environments(ctx, c) for c in self.B.objects}
        restr = {}
        for h, (c0, c) in self.B.arrows.items():
            restr[h] = {}
            for vals in fibers[c]:
                env = self.restrict_env(self.env_dict(ctx, vals), h)
                restr[h][vals] = tuple(env[x] for x in ctx.names())
        return DFib(self.B, fibers, restr, name=f"[{ctx.names()}]").validate()

    def morphism(self, G: PreContext, D: PreContext, f: tuple, source: DFib, target: DFib) -> DFibMap:
        comps = {}
        for c in self.B.objects:
            comps[c] = {}
            for vals in source.fiber(c):
                env = self.env_dict(G, vals)
                mapping: dict = {}
                out = []
                for t, (y, B) in zip(f, D.entries):
                    out.append(self.value(c, env, t, substitute_many(B, mapping)))
                    mapping[y] = t
                comps[c][vals] = tuple(out)
        return DFibMap(source, target, comps).validate()


@dataclass
class EmbeddingReport:
    contexts: int = 0
    arrows: int = 0
    compositions: int = 0
    failures: list = field(default_factory=list)
    unsupported: list = field(default_factory=list)
    generator_images: list = field(default_factory=list)  # (generator, image is iso to p)

    @property
    def ok(self) -> bool:
        return not self.failures and not self.unsupported and all(ok for _, ok in self.generator_images)


def check_embedding(sc, model) -> EmbeddingReport:
    """Interpret every context and arrow class of ``sc`` and verify functoriality.

    Also checks that every generating representable projection over a single
    ``Type`` variable is sent to a map isomorphic to ``p``.
    """
    from .syncat import generating_representables

    I = Interpretation(model)
    rep = EmbeddingReport()
    ctxs: dict = {}
    for i, G in enumerate(sc.contexts):
        try:
            ctxs[i] = I.context(G)
            rep.contexts += 1
        except Unsupported as exc:
            rep.unsupported.append((i, str(exc)))
    arrows: dict = {}
    for (i, j), reps in sc.homs.items():
        if i not in ctxs or j not in ctxs:
            continue
        for a, f in enumerate(reps):
            arrows[(i, j, a)] = I.morphism(sc.contexts[i], sc.contexts[j], f, ctxs[i], ctxs[j])
            rep.arrows += 1
    for i in ctxs:
        ident = arrows[(i, i, sc.identity(i))]
        if not dm.maps_equal(ident, dm.identity_map(ctxs[i])):
            rep.failures.append(("identity", i))
    for (i, j, a), m in arrows.items():
        for (j2, k, b), n in arrows.items():
            if j2 != j:
                continue
            c = sc.compose(i, j, k, a, b)
            rep.compositions += 1
            if c is None or not dm.maps_equal(m.then(n), arrows[(i, k, c)]):
                rep.failures.append(("composition", (i, j, a), (j, k, b)))
    for g in generating_representables(sc):
        G = sc.contexts[g.source]
        if len(G) != 2 or g.source not in ctxs or g.target not in ctxs:
            continue
        m = arrows[(g.source, g.target, g.arrow)]
        rep.generator_images.append((g, _iso_to_p(I, m)))
    return rep


def _iso_to_p(I: Interpretation, m: DFibMap) -> bool:
    """Is ``m : [A : Type, x : el A] -> [A : Type]`` isomorphic to ``p`` via the evident maps?"""
    for c in I.B.objects:
        for (a, e), (a2,) in m.components[c].items():
            if a2 != a or I.p(c, e) != a:
                return False
        pairs = {(a, e) for (a, e) in m.components[c]}
        if pairs != {(I.p(c, e), e) for e in I.E.fiber(c)}:
            return False
        if {v for (v,) in m.target.fiber(c)} != set(I.U.fiber(c)):
            return False
    return True
