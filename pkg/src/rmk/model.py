"""Models of finite type theories and their 2-category at desk scale.

A model of a representable map category ``T`` over a base ``M`` assigns a
discrete fibration ``A^M`` over ``M`` to each object ``A`` of ``T`` and a map
of fibrations to each arrow, preserving finite limits, representable arrows
and pushforwards.  A *natural model* is the special case given by a single
representable map ``p : E -> U``; it is handled without a finite ``T``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

from . import dfib as dm
from .dfib import DFib, DFibMap, Square
from .fincat import (
    FinCat,
    Functor,
    NatTrans,
    Overflow,
    enumerate_functors,
    enumerate_nat_trans,
    full_subcategory,
    terminal_object,
    terminal_objects,
)
from .rmcat import RMCat, Theory, theory_verdicts


class ModelError(Exception):
    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class NoTerminal(ModelError):
    pass


class NotRMFunctor(ModelError):
    pass


class NotRepresentable(NotRMFunctor):
    """A representable arrow is sent to a map without a right adjoint."""


class NotNaturalSquare(ModelError):
    pass


class BCFails(ModelError):
    pass


class NoOverlay(ModelError):
    pass


DEFAULT_BOUNDS = {"base_objects": 8, "fiber": 3, "morphisms": 10_000}


@dataclass(eq=False)
class Model:
    """``theory`` is ``None`` for a natural model (objects ``Type``/``el``, arrow ``p``)."""

    theory: RMCat | None
    base: FinCat
    fibrations: dict
    maps: dict
    name: str = ""
    certificates: dict = field(default_factory=dict)

    @property
    def natural(self) -> bool:
        return self.theory is None

    def objects(self) -> list:
        return list(self.theory.cat.objects) if self.theory is not None else list(self.fibrations)

    def representable_arrows(self) -> list:
        if self.theory is None:
            return list(self.maps)
        C = self.theory.cat
        return [f for f in C.arrows if f in self.theory.representables and not C.is_identity(f)]

    def arrow_ends(self, f) -> tuple:
        if self.theory is None:
            if f == "p":
                return "el", "Type"
            m = self.maps[f]
            src = next(A for A, D in self.fibrations.items() if D is m.source)
            tgt = next(A for A, D in self.fibrations.items() if D is m.target)
            return src, tgt
        return self.theory.cat.arrows[f]

    def terminal(self):
        t = terminal_object(self.base)
        if t is None:
            raise NoTerminal("base has no terminal object")
        return t

    def witness(self, f) -> dm.RightAdjointWitness:
        w = dm.right_adjoint(self.maps[f])
        if w is None:
            raise NotRepresentable(f"{f!r} is not sent to a representable map", f)
        return w

    def __repr__(self) -> str:
        return f"<Model {self.name or '?'}: base {len(self.base.objects)} objects, {len(self.fibrations)} sorts>"


def _arrow_map(M: Model, f) -> DFibMap:
    if f in M.maps:
        return M.maps[f]
    C = M.theory.cat
    if C.is_identity(f):
        return dm.identity_map(M.fibrations[C.src(f)])
    raise KeyError(f)


def complete_maps(M: Model) -> Model:
    """Fill in identities and composites that are determined by the given arrows."""
    if M.theory is None:
        return M
    C = M.theory.cat
    for a in C.objects:
        M.maps.setdefault(C.id(a), dm.identity_map(M.fibrations[a]))
    changed = True
    while changed:
        changed = False
        for (g, f), h in C.composition.items():
            if h not in M.maps and g in M.maps and f in M.maps:
                M.maps[h] = M.maps[f].then(M.maps[g])
                M.maps[h].source = M.fibrations[C.src(h)]
                M.maps[h].target = M.fibrations[C.tgt(h)]
                changed = True
    return M


def validate_model(M: Model) -> Model:
    """Check all certificates; raise with the offending arrow or cone."""
    M.terminal()
    for A, D in M.fibrations.items():
        if D.base is not M.base:
            raise NotRMFunctor(f"fibration for {A!r} lies over another base", A)
        D.validate()
    if M.theory is None:
        return _validate_natural(M)
    T = M.theory
    C = T.cat
    complete_maps(M)
    for f in C.arrows:
        if f not in M.maps:
            raise NotRMFunctor(f"no map for {f!r}", f)
        m = M.maps[f]
        a, b = C.arrows[f]
        if m.source is not M.fibrations[a] or m.target is not M.fibrations[b]:
            raise NotRMFunctor(f"map for {f!r} has the wrong ends", f)
        try:
            m.validate()
        except dm.NotAMap as exc:
            raise NotRMFunctor(f"map for {f!r}: {exc}", f) from None
        if C.is_identity(f) and not dm.maps_equal(m, dm.identity_map(M.fibrations[a])):
            raise NotRMFunctor(f"identity {f!r} not preserved", f)
    for (g, f), h in C.composition.items():
        if not dm.maps_equal(M.maps[f].then(M.maps[g]), M.maps[h]):
            raise NotRMFunctor(f"composite {g!r}.{f!r} not preserved", (f, g))
    one = M.fibrations[T.terminal]
    if any(len(one.fiber(b)) != 1 for b in M.base.objects):
        raise NotRMFunctor("terminal object not sent to the terminal fibration", T.terminal)
    n_pb = 0
    for f in C.arrows:
        for g in C.arrows:
            if C.tgt(f) != C.tgt(g):
                continue
            cone = T.pullback(f, g)
            sq = Square(top=M.maps[cone.leg("l")], bottom=M.maps[g], left=M.maps[cone.leg("r")], right=M.maps[f])
            n_pb += 1
            if not dm.is_pullback_square(sq):
                raise NotRMFunctor(f"pullback of {f!r}, {g!r} not preserved", ("pullback", f, g))
    for f in T.representables:
        if dm.right_adjoint(M.maps[f]) is None:
            raise NotRMFunctor(f"representable {f!r} not sent to a representable map", ("representable", f))
    n_pf = 0
    for f in sorted(T.representables, key=repr):
        for g in C.inbound(C.src(f)):
            n_pf += 1
            if not _pushforward_preserved(M, f, g):
                raise NotRMFunctor(f"pushforward of {g!r} along {f!r} not preserved", ("pushforward", f, g))
    M.certificates = {"pullbacks": n_pb, "representables": len(T.representables), "pushforwards": n_pf}
    return M


def _pushforward_preserved(M: Model, f, g) -> bool:
    """Compare ``W^M`` with ``(f^M)_* Z^M`` through the transpose of ``e^M``."""
    T = M.theory
    C = T.cat
    pf = T.pushforward(f, g)
    P = T.pullback(f, pf.h)
    u = M.maps[f]
    w = dm.right_adjoint(u)
    if w is None:
        return False
    push, proj = dm.pushforward(u, M.maps[g], w)
    W = M.fibrations[C.src(pf.h)]
    Pm = M.fibrations[P.apex]
    lm, rm = M.maps[P.leg("l")], M.maps[P.leg("r")]
    em = M.maps[pf.e]
    hm = M.maps[pf.h]
    Y = u.target
    comps = {}
    for b in M.base.objects:
        c = {}
        for s in W.fiber(b):
            y = hm(b, s)
            ext, q, pi = w.table[(b, y)]
            s_ext = W.act(s, pi)
            hits = [p for p in Pm.fiber(ext) if lm(ext, p) == q and rm(ext, p) == s_ext]
            if len(hits) != 1:
                return False
            c[s] = (y, em(ext, hits[0]))
        comps[b] = c
    cmp = DFibMap(W, push, comps)
    try:
        cmp.validate()
    except dm.NotAMap:
        return False
    return cmp.is_iso() and all(proj(b, cmp(b, s)) == hm(b, s) for b in M.base.objects for s in W.fiber(b))


def _validate_natural(M: Model) -> Model:
    if set(M.fibrations) != {"Type", "el"} or set(M.maps) != {"p"}:
        raise NotRMFunctor("natural mode expects sorts Type, el and the arrow p : el -> Type")
    p = M.maps["p"]
    if p.source is not M.fibrations["el"] or p.target is not M.fibrations["Type"]:
        raise NotRMFunctor("p must go from el to Type", "p")
    p.validate()
    report = natural_model_check(M.base, M.fibrations["Type"], M.fibrations["el"], p)
    M.certificates = {"extensions": len(report.extensions)}
    return M


# -- natural models ------------------------------------------------------------------

@dataclass
class CwFReport:
    terminal: Any
    extensions: dict  # (b, A) -> (ext object, projection, generic element)


def natural_model_check(base: FinCat, U: DFib, E: DFib, p: DFibMap) -> CwFReport:
    """Check a natural model and read off its context extensions."""
    t = terminal_object(base)
    if t is None:
        raise NoTerminal("base has no terminal object")
    exts = {}
    for b in base.objects:
        for y in U.fiber(b):
            tm = dm.comma_terminal(p, b, y)
            if tm is None:
                raise NotRepresentable(f"no context extension for {y!r} over {b!r}", (b, y))
            c, q, pi = tm
            exts[(b, y)] = (c, pi, q)
    return CwFReport(t, exts)


def natural_model(base: FinCat, U: DFib, E: DFib, p: DFibMap, name: str = "") -> Model:
    return Model(None, base, {"Type": U, "el": E}, {"p": p}, name=name)


# -- contextual objects and hearts --------------------------------------------------

def contextual_closure(M: Model) -> list:
    """Objects reachable from the terminal objects by context extensions, closed under iso."""
    B = M.base
    closure = set(terminal_objects(B))
    if not closure:
        raise NoTerminal("base has no terminal object")
    witnesses = {f: M.witness(f) for f in M.representable_arrows()}
    changed = True
    while changed:
        changed = False
        for f, w in witnesses.items():
            Y = M.maps[f].target
            for b in list(closure):
                for y in Y.fiber(b):
                    c = w.extension(b, y)
                    if c not in closure:
                        closure.add(c)
                        changed = True
        for a in B.objects:
            if a not in closure and any(B.isomorphic(a, c) for c in closure):
                closure.add(a)
                changed = True
    return [a for a in B.objects if a in closure]


def is_democratic(M: Model) -> bool:
    return len(contextual_closure(M)) == len(M.base.objects)


def restrict_model(M: Model, objects: Iterable, name: str = "") -> tuple[Model, "ModelMorphism"]:
    """Full submodel on ``objects`` (fibrations pulled back), with its inclusion."""
    S, inc = full_subcategory(M.base, objects, name=f"{M.base.name}|{name or 'sub'}")
    fibs = {}
    incl_maps = {}
    for A, D in M.fibrations.items():
        P, proj = dm.base_change(D, inc)
        P.name = f"{D.name}|"
        fibs[A] = P
        incl_maps[A] = proj
    maps = {}
    for f, m in M.maps.items():
        a, b = M.arrow_ends(f)
        maps[f] = DFibMap(fibs[a], fibs[b], {o: dict(m.components[o]) for o in S.objects})
    H = Model(M.theory, S, fibs, maps, name=name or f"{M.name}|")
    return H, ModelMorphism(H, M, inc, incl_maps)


def heart(M: Model) -> tuple[Model, "ModelMorphism"]:
    H, inc = restrict_model(M, contextual_closure(M), name=f"heart({M.name})")
    validate_model(H)
    return H, inc


# -- bi-initial model and the Yoneda self-model -------------------------------------

def yoneda_model(T: RMCat) -> Model:
    """``(T, T/-)``: base ``T``, each object sent to its representable fibration."""
    C = T.cat
    fibs = {A: dm.yoneda(C, A) for A in C.objects}
    maps = {}
    for f, (A, B) in C.arrows.items():
        maps[f] = DFibMap(fibs[A], fibs[B], {c: {g: C.compose(f, g) for g in C.hom(c, A)} for c in C.objects})
    return Model(T, C, fibs, maps, name=f"y({T.name})")


def bi_initial_model(T: RMCat) -> Model:
    """Base: objects ``X`` with ``X -> 1`` representable; fibrations: commas ``iM/A``."""
    C = T.cat
    keep = [X for X in C.objects if T.to_terminal(X) in T.representables]
    S, inc = full_subcategory(C, keep, name=f"iM({T.name})")
    fibs = {A: dm.comma_fibration(inc, A) for A in C.objects}
    for A in C.objects:
        fibs[A].name = f"iM/{A}"
    maps = {}
    for f, (A, B) in C.arrows.items():
        maps[f] = DFibMap(fibs[A], fibs[B], {c: {g: C.compose(f, g) for g in fibs[A].fiber(c)} for c in S.objects})
    M = Model(T, S, fibs, maps, name=f"iM({T.name})")
    return validate_model(M)


# -- internal language ------------------------------------------------------------------

@dataclass
class TheoryOfModel:
    sets: dict
    theory: Theory | None = None


def internal_language(M: Model) -> TheoryOfModel:
    """``A |-> A^M(1)``; for a finite theory also validated as a cartesian functor."""
    t = M.terminal()
    sets = {A: tuple(D.fiber(t)) for A, D in M.fibrations.items()}
    if M.theory is None:
        return TheoryOfModel(sets)
    C = M.theory.cat
    maps = {f: {x: M.maps[f](t, x) for x in sets[C.src(f)]} for f in C.arrows}
    Th = Theory(M.theory, sets, maps, name=f"L({M.name})")
    v = theory_verdicts(Th)
    if not (v.by_cones and v.by_elements):
        raise ModelError("internal language is not cartesian", v)
    return TheoryOfModel(sets, Th)


# -- morphisms and 2-morphisms ------------------------------------------------------

@dataclass(eq=False)
class ModelMorphism:
    source: Model
    target: Model
    functor: Functor
    components: dict  # A -> DFibMap over functor


@dataclass(eq=False)
class TwoMorphism:
    source: ModelMorphism
    target: ModelMorphism
    nat: NatTrans


def _bc_square(F: ModelMorphism, f) -> Square:
    M, N = F.source, F.target
    a, b = M.arrow_ends(f)
    return Square(top=F.components[a], bottom=F.components[b], left=M.maps[f], right=N.maps[f])


def validate_morphism(F: ModelMorphism) -> ModelMorphism:
    M, N = F.source, F.target
    F.functor.validate()
    tN = terminal_objects(N.base)
    for t in terminal_objects(M.base):
        if F.functor.ob(t) not in tN:
            raise NotNaturalSquare("terminal object not preserved", t)
    for A, m in F.components.items():
        m.validate()
    arrows = M.maps.keys() if M.theory is None else [f for f in M.theory.cat.arrows if not M.theory.cat.is_identity(f)]
    for f in arrows:
        if not _bc_square(F, f).commutes():
            raise NotNaturalSquare(f"naturality square for {f!r} does not commute", f)
    for f in M.representable_arrows():
        sq = _bc_square(F, f)
        if not dm.beck_chevalley(sq, M.witness(f), N.witness(f)):
            raise BCFails(f"Beck-Chevalley fails for {f!r}", f)
    return F


def overlay_exists(sigma: NatTrans, F: ModelMorphism, G: ModelMorphism, A) -> bool:
    """Is there a lift of ``sigma`` from ``F_A`` to ``G_A``: ``F_A(x) == G_A(x) . sigma_b`` for all ``x``?"""
    D = F.source.fibrations[A]
    E = F.target.fibrations[A]
    FA, GA = F.components[A], G.components[A]
    return all(FA(b, x) == E.act(GA(b, x), sigma[b]) for b in D.base.objects for x in D.fiber(b))


def validate_2morphism(s: TwoMorphism) -> TwoMorphism:
    s.nat.validate()
    for A in s.source.source.fibrations:
        if not overlay_exists(s.nat, s.source, s.target, A):
            raise NoOverlay(f"no overlay over {A!r}", A)
    return s


def identity_morphism(M: Model) -> ModelMorphism:
    B = M.base
    F = Functor(B, B, {a: a for a in B.objects}, {f: f for f in B.arrows})
    comps = {A: DFibMap(D, D, {a: {x: x for x in D.fiber(a)} for a in B.objects}, F) for A, D in M.fibrations.items()}
    return ModelMorphism(M, M, F, comps)


def enumerate_model_morphisms(M: Model, N: Model, bounds: dict | None = None) -> list[ModelMorphism]:
    """All morphisms ``M -> N`` (base functors, then fiber maps, then naturality and BC)."""
    bounds = {**DEFAULT_BOUNDS, **(bounds or {})}
    _check_bounds(M, bounds)
    _check_bounds(N, bounds)
    tM = terminal_objects(M.base)
    tN = terminal_objects(N.base)
    choices = {t: tN for t in tM}
    sorts = M.objects()
    out = []
    for F in enumerate_functors(M.base, N.base, obj_choices=choices, cap=bounds["morphisms"]):
        per_sort = {}
        for A in sorts:
            per_sort[A] = list(dm.enumerate_maps(M.fibrations[A], N.fibrations[A], functor=F, cap=bounds["morphisms"]))
            if not per_sort[A]:
                break
        else:
            for combo in itertools.product(*(per_sort[A] for A in sorts)):
                cand = ModelMorphism(M, N, F, dict(zip(sorts, combo)))
                try:
                    validate_morphism(cand)
                except ModelError:
                    continue
                out.append(cand)
                if len(out) > bounds["morphisms"]:
                    raise Overflow("too many model morphisms", partial=out)
    return out


def enumerate_2morphisms(F: ModelMorphism, G: ModelMorphism) -> list[TwoMorphism]:
    out = []
    for sigma in enumerate_nat_trans(F.functor, G.functor):
        s = TwoMorphism(F, G, sigma)
        try:
            validate_2morphism(s)
        except ModelError:
            continue
        out.append(s)
    return out


@dataclass
class HomCategoryReport:
    morphisms: int
    two_morphism_counts: dict
    contractible: bool


def hom_category(M: Model, N: Model, bounds: dict | None = None) -> HomCategoryReport:
    mors = enumerate_model_morphisms(M, N, bounds)
    counts = {}
    for i, F in enumerate(mors):
        for j, G in enumerate(mors):
            counts[(i, j)] = len(enumerate_2morphisms(F, G))
    contractible = bool(mors) and all(c == 1 for c in counts.values())
    return HomCategoryReport(len(mors), counts, contractible)


def hom_category_contractible(M: Model, N: Model, bounds: dict | None = None) -> bool:
    return hom_category(M, N, bounds).contractible


def two_morphisms_invertible(M: Model, N: Model, bounds: dict | None = None) -> bool:
    """At most one 2-morphism between each parallel pair, and each one invertible."""
    mors = enumerate_model_morphisms(M, N, bounds)
    for F in mors:
        for G in mors:
            twos = enumerate_2morphisms(F, G)
            if len(twos) > 1 or any(not s.nat.is_iso() for s in twos):
                return False
    return True


def _check_bounds(M: Model, bounds: dict) -> None:
    if len(M.base.objects) > bounds["base_objects"]:
        raise Overflow(f"model {M.name} base exceeds the bound")
    for D in M.fibrations.values():
        if D.max_fiber() > bounds["fiber"]:
            raise Overflow(f"model {M.name} fiber exceeds the bound")


def models_isomorphic(M: Model, N: Model) -> ModelMorphism | None:
    """A morphism whose base functor and fiber maps are all bijective, if one exists."""
    if len(M.base.objects) != len(N.base.objects) or len(M.base.arrows) != len(N.base.arrows):
        return None
    for F in enumerate_model_morphisms(M, N, {"base_objects": 100, "fiber": 100}):
        if len(set(F.functor.obj_map.values())) != len(M.base.objects):
            continue
        if len(set(F.functor.arr_map.values())) != len(M.base.arrows):
            continue
        if all(
            len(set(F.components[A].components[a].values())) == len(M.fibrations[A].fiber(a)) == len(N.fibrations[A].fiber(F.functor.ob(a)))
            for A in M.fibrations
            for a in M.base.objects
        ):
            return F
    return None


# -- properties of morphisms -------------------------------------------------------

def preserves_contextual_objects(F: ModelMorphism) -> bool:
    target = set(contextual_closure(F.target))
    return all(F.functor.ob(a) in target for a in contextual_closure(F.source))


def preserves_context_extensions(F: ModelMorphism) -> bool:
    """The canonical arrow ``F{y} -> {F y}`` is an isomorphism for every representable arrow and element."""
    M, N = F.source, F.target
    for f in M.representable_arrows():
        sq = _bc_square(F, f)
        for g in dm.canonical_mate(sq, M.witness(f), N.witness(f)).values():
            if not N.base.is_iso(g):
                return False
    return True


# -- polynomial iteration for natural models ---------------------------------------

def telescopes(M: Model, length: int) -> list:
    """Sequences ``(A1, ..., An)`` with ``A1 in U(1)`` and ``A(k+1) in U({Ak})``."""
    U = M.fibrations["Type"]
    w = M.witness("p")
    t = M.terminal()
    out = []

    def go(obj, prefix):
        if len(prefix) == length:
            out.append(tuple(prefix))
            return
        for y in U.fiber(obj):
            go(w.extension(obj, y), prefix + [y])

    go(t, [])
    return out


def iterated_polynomial(M: Model, n: int) -> DFib:
    """``P_p^n(U)``."""
    p = M.maps["p"]
    w = dm.right_adjoint(p)
    D = M.fibrations["Type"]
    for _ in range(n):
        D = dm.polynomial(p, D, w)
    return D


def flatten_polynomial_element(e, n: int) -> tuple:
    """``(y1, (y2, (..., yn+1)))`` becomes ``(y1, ..., yn+1)``."""
    out = []
    for _ in range(n):
        y, e = e
        out.append(y)
    out.append(e)
    return tuple(out)


# -- file format ----------------------------------------------------------------------

def parse_model(text: str, resolve_fincat, resolve_rmcat, resolve_dfib=None) -> Model:
    """Parse a ``.model`` file.

    Header lines ``model NAME``, ``theory: REF`` (or ``mode natural``) and
    ``base: REF``; then ``object A:`` blocks of ``fiber``/``restrict`` lines
    (or ``object A = REF.dfib``) and ``arrow f:`` blocks of
    ``obj : x -> y, ...`` lines.
    """
    name = ""
    theory = None
    natural = False
    base = None
    blocks: list = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indented = line[0].isspace()
        s = line.strip()
        if indented:
            if current is None:
                raise ModelError(f"line {lineno}: indented line outside a block")
            current[2].append(s)
            continue
        current = None
        if s.startswith("model "):
            name = s[len("model "):].strip()
        elif s.startswith("theory:"):
            theory = resolve_rmcat(s.split(":", 1)[1].strip())
        elif s == "mode natural":
            natural = True
        elif s.startswith("base:"):
            base = resolve_fincat(s.split(":", 1)[1].strip())
        elif s.startswith("object "):
            body = s[len("object "):]
            if "=" in body:
                A, ref = (t.strip() for t in body.split("=", 1))
                blocks.append(("object-ref", A, [ref]))
            else:
                current = ("object", body.rstrip(":").strip(), [])
                blocks.append(current)
        elif s.startswith("arrow "):
            current = ("arrow", s[len("arrow "):].rstrip(":").strip(), [])
            blocks.append(current)
        else:
            raise ModelError(f"line {lineno}: unrecognised line {raw!r}")
    if base is None:
        raise ModelError("missing 'base:' line")
    if theory is None and not natural:
        raise ModelError("missing 'theory:' line (or 'mode natural')")
    fibs = {}
    for kind, A, lines in blocks:
        if kind == "arrow":
            continue
        key = A if theory is None else _find_name(theory.cat.objects, A)
        if kind == "object":
            text_block = f"dfib {A} over __base__\n" + "\n".join(lines)
            fibs[key] = dm.parse_dfib(text_block, lambda ref: base)
        elif kind == "object-ref":
            if resolve_dfib is None:
                raise ModelError("dfib references are not supported here")
            D = resolve_dfib(lines[0], base)
            fibs[key] = D
    maps = {}
    for kind, f, lines in blocks:
        if kind != "arrow":
            continue
        if theory is None:
            src, tgt = "el", "Type"
            key = f
        else:
            key = _find_name(theory.cat.arrows, f)
            src, tgt = theory.cat.arrows[key]
        comps = {o: {} for o in base.objects}
        for ln in lines:
            obj, rest = (t.strip() for t in ln.split(":", 1))
            o = _find_name(base.objects, obj)
            for item in rest.split(","):
                if item.strip():
                    x, y = (t.strip() for t in item.split("->"))
                    comps[o][x] = y
        maps[key] = DFibMap(fibs[src], fibs[tgt], comps)
    M = Model(theory, base, fibs, maps, name=name)
    if theory is not None:
        for A in theory.cat.objects:
            if A not in fibs:
                raise ModelError(f"no fibration given for {A!r}")
        complete_maps(M)
    return M


def _find_name(items, name: str):
    for x in items:
        if str(x) == name:
            return x
    raise ModelError(f"unknown name {name!r}")


def format_model(M: Model, theory_ref: str, base_ref: str) -> str:
    lines = [f"model {M.name or 'M'}"]
    lines.append("mode natural" if M.theory is None else f"theory: {theory_ref}")
    lines.append(f"base: {base_ref}")
    for A, D in M.fibrations.items():
        lines.append(f"object {A}:")
        body = dm.format_dfib(D, "_").splitlines()[1:]
        lines.extend("  " + b for b in body)
    for f, m in M.maps.items():
        if M.theory is not None and M.theory.cat.is_identity(f):
            continue
        lines.append(f"arrow {f}:")
        for o in M.base.objects:
            if m.components[o]:
                lines.append(f"  {o} : " + ", ".join(f"{x} -> {y}" for x, y in m.components[o].items()))
    return "\n".join(lines) + "\n"
