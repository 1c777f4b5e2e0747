"""Representable map categories: finite cartesian categories with a stable
class of exponentiable arrows, their functors, slices and theories.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

from .fincat import (
    CategoryError,
    Cone,
    FinCat,
    Functor,
    NotFunctorial,
    Overflow,
    all_pullbacks,
    enumerate_functors,
    factorizations,
    is_cofiltered,
    is_pullback_square,
    pullback as find_pullback,
    slice_category,
    terminal_object,
)


class RMCatError(CategoryError):
    pass


class NotCartesian(RMCatError):
    pass


class ClassNotClosed(RMCatError):
    pass


class NotStable(RMCatError):
    pass


class PushforwardUMPFails(RMCatError):
    pass


class NotExponentiable(RMCatError):
    pass


class NotRMFunctor(RMCatError):
    pass


@dataclass(frozen=True)
class Pushforward:
    """``h = f_* g`` with evaluation ``e : f*W -> Z`` (``f*W`` the designated pullback)."""

    h: Any
    e: Any


class RMCat:
    def __init__(
        self,
        cat: FinCat,
        representables: Iterable,
        pushforwards: Mapping | None = None,
        terminal: Any = None,
        pullbacks: Mapping | None = None,
        name: str = "",
    ):
        self.cat = cat
        self.representables = frozenset(representables)
        self.name = name or cat.name
        self._terminal = terminal
        self._pullbacks: dict = dict(pullbacks or {})
        self.pushforward_table: dict = {}
        for key, val in (pushforwards or {}).items():
            self.pushforward_table[key] = val if isinstance(val, Pushforward) else Pushforward(*val)
        self.bound_note = ""

    def __repr__(self) -> str:
        return f"<RMCat {self.name}: {len(self.cat.objects)} objects, {len(self.representables)} representable arrows>"

    # -- designated structure --------------------------------------------------
    @property
    def terminal(self):
        if self._terminal is None:
            t = terminal_object(self.cat)
            if t is None:
                raise NotCartesian("no terminal object")
            self._terminal = t
        return self._terminal

    def to_terminal(self, a):
        return self.cat.hom(a, self.terminal)[0]

    def pullback(self, f, g) -> Cone:
        """Designated pullback of the cospan ``f, g`` (legs ``l`` to ``src f``, ``r`` to ``src g``)."""
        key = (f, g)
        if key not in self._pullbacks:
            cone = find_pullback(self.cat, f, g)
            if cone is None:
                raise NotCartesian(f"no pullback of {f!r} and {g!r}", (f, g))
            self._pullbacks[key] = cone
        return self._pullbacks[key]

    def is_representable(self, f) -> bool:
        return f in self.representables

    def pushforward(self, f, g) -> Pushforward:
        key = (f, g)
        if key not in self.pushforward_table:
            pf = compute_pushforward(self, f, g)
            if pf is None:
                raise NotExponentiable(f"no pushforward of {g!r} along {f!r}", (f, g))
            self.pushforward_table[key] = pf
        return self.pushforward_table[key]

    def arrows_into(self, y) -> list:
        return self.cat.inbound(y)

    def pullback_arrow(self, f, k, k2, m):
        """For ``m : dom k -> dom k2`` over ``Y``, the induced ``f*k -> f*k2``."""
        C = self.cat
        P = self.pullback(f, k)
        P2 = self.pullback(f, k2)
        cand = [
            t
            for t in C.hom(P.apex, P2.apex)
            if C.compose(P2.leg("l"), t) == P.leg("l") and C.compose(P2.leg("r"), t) == C.compose(m, P.leg("r"))
        ]
        if len(cand) != 1:
            raise NotCartesian("pullback factorization is not unique", (f, k, k2, m))
        return cand[0]


# -- pushforward search and UMP ------------------------------------------------

def slice_homs(C: FinCat, k, h) -> list:
    """Arrows ``m`` with ``h . m == k``."""
    return [m for m in C.hom(C.src(k), C.src(h)) if C.compose(h, m) == k]


def ump_holds(R: RMCat, f, g, pf: Pushforward) -> bool:
    """Check ``Hom_/Y(k, h) -> Hom_/X(f*k, g)``, ``m |-> e . f*m`` is bijective for all ``k``."""
    C = R.cat
    X, Y = C.arrows[f]
    h, e = pf.h, pf.e
    if C.tgt(h) != Y:
        return False
    P = R.pullback(f, h)
    if C.arrows.get(e) != (P.apex, C.src(g)) or C.compose(g, e) != P.leg("l"):
        return False
    for k in R.arrows_into(Y):
        Q = R.pullback(f, k)
        lhs = slice_homs(C, k, h)
        images = [C.compose(e, R.pullback_arrow(f, k, h, m)) for m in lhs]
        rhs = [n for n in C.hom(Q.apex, C.src(g)) if C.compose(g, n) == Q.leg("l")]
        if len(images) != len(set(images)) or set(images) != set(rhs):
            return False
    return True


def compute_pushforward(R: RMCat, f, g) -> Pushforward | None:
    """Search all ``(h, e)`` for a pushforward of ``g`` along ``f``."""
    C = R.cat
    X, Y = C.arrows[f]
    for h in R.arrows_into(Y):
        P = R.pullback(f, h)
        for e in C.hom(P.apex, C.src(g)):
            if C.compose(g, e) != P.leg("l"):
                continue
            pf = Pushforward(h, e)
            if ump_holds(R, f, g, pf):
                return pf
    return None


def is_exponentiable(R: RMCat, f) -> bool:
    C = R.cat
    return all(compute_pushforward(R, f, g) is not None for g in C.inbound(C.src(f)))


# -- validation ------------------------------------------------------------------

@dataclass
class RMCatReport:
    cartesian: bool = True
    closure_checked: int = 0
    stability_checked: int = 0
    pushforwards_checked: int = 0
    computed_pushforwards: int = 0


def validate_rmcat(R: RMCat, report: RMCatReport | None = None) -> RMCat:
    C = R.cat
    rep = report if report is not None else RMCatReport()
    C.validate()
    _ = R.terminal
    for f in C.arrows:
        for g in C.arrows:
            if C.tgt(f) == C.tgt(g):
                R.pullback(f, g)
    for f in R.representables:
        if f not in C.arrows:
            raise ClassNotClosed(f"representable {f!r} is not an arrow", (f,))
    for a in C.objects:
        if C.id(a) not in R.representables:
            raise ClassNotClosed(f"identity of {a!r} is not representable", (C.id(a),))
    for f in R.representables:
        for g in R.representables:
            if C.tgt(f) == C.src(g):
                rep.closure_checked += 1
                if C.compose(g, f) not in R.representables:
                    raise ClassNotClosed(f"{g!r} . {f!r} is not representable", (f, g))
    for f in R.representables:
        for k in C.inbound(C.tgt(f)):
            rep.stability_checked += 1
            P = R.pullback(f, k)
            if P.leg("r") not in R.representables:
                raise NotStable(f"pullback of {f!r} along {k!r} is not representable", (f, k, P))
    for f in sorted(R.representables, key=repr):
        for g in C.inbound(C.src(f)):
            rep.pushforwards_checked += 1
            given = R.pushforward_table.get((f, g))
            if given is not None:
                if not ump_holds(R, f, g, given):
                    raise PushforwardUMPFails(f"stored pushforward of {g!r} along {f!r} fails the UMP", (f, g, given))
            else:
                pf = compute_pushforward(R, f, g)
                if pf is None:
                    raise NotExponentiable(f"{f!r} has no pushforward of {g!r}", (f, g))
                R.pushforward_table[(f, g)] = pf
                rep.computed_pushforwards += 1
    return R


def generate_stable_class(C: FinCat, generators: Iterable, check_exponentiable: bool = True) -> frozenset:
    """Least class containing isomorphisms and ``generators``, closed under composition and pullback."""
    R0 = RMCat(C, [])
    gens = list(generators)
    if check_exponentiable:
        for f in gens:
            if not is_exponentiable(R0, f):
                raise NotExponentiable(f"generator {f!r} is not exponentiable", (f,))
    cls = set(f for f in C.arrows if C.is_iso(f)) | set(gens)
    while True:
        new = set()
        for f in cls:
            for g in cls:
                if C.tgt(f) == C.src(g):
                    new.add(C.compose(g, f))
            for k in C.inbound(C.tgt(f)):
                for cone in all_pullbacks(C, f, k):
                    new.add(cone.leg("r"))
        if new <= cls:
            return frozenset(cls)
        cls |= new


def isos_rmcat(C: FinCat, name: str = "") -> RMCat:
    return RMCat(C, [f for f in C.arrows if C.is_iso(f)], name=name or f"{C.name}[iso]")


def all_arrows_rmcat(C: FinCat, name: str = "") -> RMCat:
    return RMCat(C, list(C.arrows), name=name or f"{C.name}[all]")


# -- representable map functors ------------------------------------------------------

@dataclass
class RMFunctor:
    source: RMCat
    target: RMCat
    functor: Functor
    certificates: dict = field(default_factory=dict)

    def ob(self, a):
        return self.functor.ob(a)

    def ar(self, f):
        return self.functor.ar(f)


def preserves_pullback(S: RMCat, T: RMCat, F: Functor, f, g) -> bool:
    P = S.pullback(f, g)
    return is_pullback_square(T.cat, F.ar(P.leg("r")), F.ar(P.leg("l")), F.ar(g), F.ar(f))


def validate_rm_functor(F: RMFunctor) -> RMFunctor:
    S, T = F.source, F.target
    C, D = S.cat, T.cat
    F.functor.validate()
    t = F.ob(S.terminal)
    if not all(len(D.hom(a, t)) == 1 for a in D.objects):
        raise NotRMFunctor("terminal object not preserved", S.terminal)
    n = 0
    for f in C.arrows:
        for g in C.arrows:
            if C.tgt(f) == C.tgt(g):
                n += 1
                if not preserves_pullback(S, T, F.functor, f, g):
                    raise NotRMFunctor(f"pullback of {f!r}, {g!r} not preserved", (f, g))
    for f in S.representables:
        if F.ar(f) not in T.representables:
            raise NotRMFunctor(f"representable {f!r} not sent to a representable", f)
    m = 0
    for f in sorted(S.representables, key=repr):
        for g in C.inbound(C.src(f)):
            m += 1
            if not preserves_pushforward(S, T, F.functor, f, g):
                raise NotRMFunctor(f"pushforward of {g!r} along {f!r} not preserved", (f, g))
    F.certificates = {"pullbacks": n, "representables": len(S.representables), "pushforwards": m}
    return F


def preserves_pushforward(S: RMCat, T: RMCat, F: Functor, f, g) -> bool:
    """Is ``(F h, F e)`` a pushforward of ``F g`` along ``F f`` (via the comparison to the designated pullback)?"""
    C, D = S.cat, T.cat
    pf = S.pushforward(f, g)
    P = S.pullback(f, pf.h)
    Ff, Fh = F.ar(f), F.ar(pf.h)
    Q = T.pullback(Ff, Fh)
    # comparison Q -> F(P): the unique arrow commuting with both legs
    comp = [
        c
        for c in D.hom(Q.apex, F.ob(P.apex))
        if D.compose(F.ar(P.leg("l")), c) == Q.leg("l") and D.compose(F.ar(P.leg("r")), c) == Q.leg("r")
    ]
    if len(comp) != 1:
        return False
    e2 = D.compose(F.ar(pf.e), comp[0])
    return ump_holds(T, Ff, F.ar(g), Pushforward(Fh, e2))


def identity_rm_functor(R: RMCat) -> RMFunctor:
    C = R.cat
    return RMFunctor(R, R, Functor(C, C, {a: a for a in C.objects}, {f: f for f in C.arrows}))


# -- slices ------------------------------------------------------------------------

def slice_rmcat(R: RMCat, X) -> tuple[RMCat, Functor]:
    """``R/X`` with the inherited class: a triangle is representable if its underlying arrow is."""
    S, P = slice_category(R.cat, X)
    reps = [a for a in S.arrows if P.ar(a) in R.representables]
    return RMCat(S, reps, terminal=R.cat.id(X), name=f"{R.name}/{X}"), P


def pullback_functor(R: RMCat, X) -> tuple[RMCat, Functor]:
    """``X* : R -> R/X``, ``A |-> (A x X -> X)``."""
    Sx, _ = slice_rmcat(R, X)
    C = R.cat
    t = R.terminal
    obj = {}
    for A in C.objects:
        cone = R.pullback(R.to_terminal(A), R.to_terminal(X))
        obj[A] = cone
    omap = {A: obj[A].leg("r") for A in C.objects}
    amap = {}
    for f, (A, B) in C.arrows.items():
        PA, PB = obj[A], obj[B]
        cand = [
            m
            for m in C.hom(PA.apex, PB.apex)
            if C.compose(PB.leg("l"), m) == C.compose(f, PA.leg("l")) and C.compose(PB.leg("r"), m) == PA.leg("r")
        ]
        if len(cand) != 1:
            raise NotCartesian("product comparison not unique", f)
        amap[f] = (cand[0], PA.leg("r"), PB.leg("r"))
    return Sx, Functor(C, Sx.cat, omap, amap, name=f"{X}*")


def diagonal_section(R: RMCat, X):
    """The diagonal ``X -> X x X`` as a global section of ``X*X`` in ``R/X``."""
    C = R.cat
    cone = R.pullback(R.to_terminal(X), R.to_terminal(X))
    d = [m for m in C.hom(X, cone.apex) if C.compose(cone.leg("l"), m) == C.id(X) and C.compose(cone.leg("r"), m) == C.id(X)]
    return (d[0], C.id(X), cone.leg("r"))


@dataclass
class SectionExtension:
    functor: RMFunctor
    candidates: int
    unique_up_to_iso: bool


def adjoin_section_check(R: RMCat, X, T: RMCat, F: RMFunctor, s, search: bool = True) -> SectionExtension:
    """Extend ``F : R -> T`` along ``X* : R -> R/X`` by sending the diagonal to ``s : 1 -> F X``.

    The extension sends ``p : A -> X`` to the pullback of ``F p`` along ``s``.
    With ``search`` set, all functors ``R/X -> T`` agreeing with ``F`` after
    ``X*`` (up to isomorphism) and sending the diagonal to ``s`` are
    enumerated and shown pairwise isomorphic.
    """
    C, D = R.cat, T.cat
    Sx, P = slice_rmcat(R, X)
    S = Sx.cat
    if D.arrows.get(s) != (T.terminal, F.ob(X)):
        raise ValueError("s must be a global section of F X")
    cones = {}
    for p in S.objects:
        cones[p] = T.pullback(s, F.ar(p))
    omap = {p: cones[p].apex for p in S.objects}
    amap = {}
    for tri in S.arrows:
        k, p, q = tri
        Pp, Pq = cones[p], cones[q]
        cand = [
            m
            for m in D.hom(Pp.apex, Pq.apex)
            if D.compose(Pq.leg("l"), m) == Pp.leg("l") and D.compose(Pq.leg("r"), m) == D.compose(F.ar(k), Pp.leg("r"))
        ]
        if len(cand) != 1:
            raise NotCartesian("pullback factorization not unique", tri)
        amap[tri] = cand[0]
    E = RMFunctor(Sx, T, Functor(S, D, omap, amap, name="ext"))
    validate_rm_functor(E)
    n = 1
    unique = True
    if search:
        _, Xstar = pullback_functor(R, X)
        diag = diagonal_section(R, X)
        found = []
        for G in enumerate_functors(S, D):
            if not _agrees_with_section(D, T, G, Xstar, F, diag, s, C.id(X)):
                continue
            try:
                validate_rm_functor(RMFunctor(Sx, T, G))
            except RMCatError:
                continue
            found.append(G)
        n = len(found)
        unique = n >= 1 and all(_nat_iso_exists(G, found[0]) for G in found)
    return SectionExtension(E, n, unique)


def _agrees_with_section(D: FinCat, T: RMCat, G: Functor, Xstar: Functor, F: RMFunctor, diag, s, idX) -> bool:
    """Is there ``theta : G . X* ~ F`` with ``theta_X . G(diag) . (1 ~ G(id_X)) == s``?"""
    from .fincat import enumerate_nat_trans

    top = G.ob(idX)
    to_top = D.hom(T.terminal, top)
    if len(to_top) != 1 or not D.is_iso(to_top[0]):
        return False
    X = Xstar.source.src(idX)
    sec = D.compose(G.ar(diag), to_top[0])
    for theta in enumerate_nat_trans(Xstar.then(G), F.functor):
        if theta.is_iso() and D.compose(theta[X], sec) == s:
            return True
    return False


def _nat_iso_exists(G: Functor, H: Functor) -> bool:
    from .fincat import enumerate_nat_trans

    return any(t.is_iso() for t in enumerate_nat_trans(G, H))


# -- theories ------------------------------------------------------------------------

class TheoryError(RMCatError):
    pass


@dataclass
class Theory:
    """A cartesian functor ``T -> Set``: a finite set per object and a function per arrow."""

    rmcat: RMCat
    sets: dict
    maps: dict
    name: str = ""

    def __call__(self, A):
        return self.sets[A]

    def act(self, f, a):
        return self.maps[f][a]

    def elements_category(self) -> FinCat:
        C = self.rmcat.cat
        objs = [(A, a) for A in C.objects for a in self.sets[A]]
        arrows = {}
        for f, (A, B) in C.arrows.items():
            for a in self.sets[A]:
                arrows[(f, a)] = ((A, a), (B, self.act(f, a)))
        identities = {(A, a): (C.id(A), a) for (A, a) in objs}
        comp = {}
        for (g, f), h in C.composition.items():
            for a in self.sets[C.src(f)]:
                comp[((g, self.act(f, a)), (f, a))] = (h, a)
        return FinCat(objs, arrows, identities, comp, name=f"el({self.name})")


def check_functorial(Th: Theory) -> None:
    C = Th.rmcat.cat
    for A in C.objects:
        if A not in Th.sets:
            raise NotFunctorial(f"no set for {A!r}", A)
    for f, (A, B) in C.arrows.items():
        m = Th.maps.get(f)
        if m is None or set(m) != set(Th.sets[A]) or not set(m.values()) <= set(Th.sets[B]):
            raise NotFunctorial(f"map for {f!r} is ill-typed", f)
        if C.is_identity(f) and any(m[a] != a for a in m):
            raise NotFunctorial(f"identity {f!r} not sent to identity", f)
    for (g, f), h in C.composition.items():
        for a in Th.sets[C.src(f)]:
            if Th.act(g, Th.act(f, a)) != Th.act(h, a):
                raise NotFunctorial(f"composite {g!r}.{f!r} not preserved", (f, g))


def cone_preservation_counterexample(Th: Theory):
    """The first designated cone (terminal or pullback) not sent to a limit of sets, or ``None``."""
    R = Th.rmcat
    C = R.cat
    if len(Th.sets[R.terminal]) != 1:
        return ("terminal", R.terminal)
    for f in C.arrows:
        for g in C.arrows:
            if C.tgt(f) != C.tgt(g):
                continue
            P = R.pullback(f, g)
            expected = {(x, y) for x in Th.sets[C.src(f)] for y in Th.sets[C.src(g)] if Th.act(f, x) == Th.act(g, y)}
            got = [(Th.act(P.leg("l"), p), Th.act(P.leg("r"), p)) for p in Th.sets[P.apex]]
            if len(got) != len(set(got)) or set(got) != expected:
                return ("pullback", (f, g))
    return None


def elements_cofiltered(Th: Theory) -> bool:
    return is_cofiltered(Th.elements_category())


@dataclass
class TheoryVerdict:
    by_cones: bool
    by_elements: bool
    counterexample: Any = None

    @property
    def agree(self) -> bool:
        return self.by_cones == self.by_elements


def theory_verdicts(Th: Theory) -> TheoryVerdict:
    check_functorial(Th)
    cex = cone_preservation_counterexample(Th)
    return TheoryVerdict(cex is None, elements_cofiltered(Th), cex)


def validate_theory(Th: Theory) -> Theory:
    v = theory_verdicts(Th)
    if not v.agree:
        raise TheoryError("cone check and elements check disagree", v)
    if not v.by_cones:
        raise NotCartesian(f"designated cone not preserved: {v.counterexample}", v.counterexample)
    return Th


def constant_theory(R: RMCat) -> Theory:
    C = R.cat
    return Theory(R, {A: ("*",) for A in C.objects}, {f: {"*": "*"} for f in C.arrows}, name="1")


def hom_theory(R: RMCat, X) -> Theory:
    """Covariant ``T(X, -)``."""
    C = R.cat
    sets = {A: tuple(C.hom(X, A)) for A in C.objects}
    maps = {f: {g: C.compose(f, g) for g in sets[C.src(f)]} for f in C.arrows}
    return Theory(R, sets, maps, name=f"T({X},-)")


# -- bounded DFib_B --------------------------------------------------------------------

def dfib_rmcat(B: FinCat, bound: int = 1, cap: int = 5000) -> RMCat:
    """``DFib_B`` restricted to fibrations with fibers of size at most ``bound``.

    Objects are isomorphism-class representatives, arrows all maps between
    them.  With ``bound == 1`` the result is closed under limits and
    pushforwards along representable maps; for larger bounds limits that
    leave the bound are absent and the result is reported as truncated.
    """
    from . import dfib as dm

    reps = _presheaf_classes(B, bound, cap)
    objects = list(range(len(reps)))
    arrows = {}
    maps = {}
    identities = {}
    for i, D in enumerate(reps):
        for j, E in enumerate(reps):
            for k, m in enumerate(dm.enumerate_maps(D, E)):
                name = (i, j, k)
                arrows[name] = (i, j)
                maps[name] = m
                if i == j and all(m.components[a][x] == x for a in B.objects for x in D.fiber(a)):
                    identities[i] = name
                if len(arrows) > cap:
                    raise Overflow(f"DFib over {B.name} with bound {bound} exceeds {cap} arrows")
    index = {}
    for name, m in maps.items():
        index[(name[0], name[1], dm._map_key(m))] = name
    comp = {}
    for f, (i, j) in arrows.items():
        for g, (j2, k) in arrows.items():
            if j2 != j:
                continue
            gf = maps[f].then(maps[g])
            comp[(g, f)] = index[(i, k, dm._map_key(gf))]
    cat = FinCat(objects, arrows, identities, comp, name=f"DFib({B.name})<={bound}")
    for (g, f) in list(comp):
        if cat.is_identity(g) or cat.is_identity(f):
            del cat.composition[(g, f)]
    represent = [f for f, m in maps.items() if dm.right_adjoint(m) is not None]
    R = RMCat(cat, represent, name=cat.name)
    R.fibrations = reps
    R.maps = maps
    R.bound = bound
    R.bound_note = f"fibers<={bound}"
    return R


def _presheaf_classes(B: FinCat, bound: int, cap: int) -> list:
    """Representatives of isomorphism classes of presheaves with fibers of size at most ``bound``."""
    from . import dfib as dm

    arrows = B.non_identity_arrows()
    out: list = []
    for sizes in itertools.product(range(bound + 1), repeat=len(B.objects)):
        fibers = {a: [f"{_tag(a)}{i}" for i in range(n)] for a, n in zip(B.objects, sizes)}
        slots = [(f, x) for f in arrows for x in fibers[B.tgt(f)]]
        choices = [fibers[B.src(f)] for (f, x) in slots]
        for combo in itertools.product(*choices):
            restr = {f: {} for f in arrows}
            for (f, x), e in zip(slots, combo):
                restr[f][x] = e
            D = dm.DFib(B, fibers, restr, name=f"P{len(out)}")
            try:
                D.validate()
            except dm.NotAFibration:
                continue
            if any(dm.find_iso(D, E) is not None for E in out):
                continue
            out.append(D)
            if len(out) > cap:
                raise Overflow("too many presheaves")
    return out


def _tag(a) -> str:
    return "".join(ch for ch in str(a) if ch.isalnum()) or "x"


def dfib_object(R: RMCat, D) -> Any:
    """The object of a materialized ``DFib_B`` isomorphic to ``D``, or ``None``."""
    from . import dfib as dm

    for i, E in enumerate(R.fibrations):
        if dm.find_iso(D, E) is not None:
            return i
    return None


def validate_bounded_dfib_rmcat(R: RMCat) -> RMCatReport:
    """Validate the RMCat axioms on a materialized ``DFib_B``.

    Limits are computed fiberwise; instances whose limit exceeds the bound
    are skipped and counted, the rest are checked against the finite
    category exactly as in :func:`validate_rmcat`.
    """
    from . import dfib as dm

    C = R.cat
    rep = RMCatReport()
    skipped = 0
    _ = R.terminal
    for a in C.objects:
        if C.id(a) not in R.representables:
            raise ClassNotClosed(f"identity of {a!r} is not representable", (C.id(a),))
    for f in R.representables:
        for g in R.representables:
            if C.tgt(f) == C.src(g):
                rep.closure_checked += 1
                if C.compose(g, f) not in R.representables:
                    raise ClassNotClosed(f"{g!r} . {f!r} is not representable", (f, g))
    for f in R.representables:
        for k in C.inbound(C.tgt(f)):
            P, _, _ = dm.pullback_dfib(R.maps[f], R.maps[k])
            if P.max_fiber() > R.bound:
                skipped += 1
                continue
            rep.stability_checked += 1
            cone = R.pullback(f, k)
            if cone.leg("r") not in R.representables:
                raise NotStable(f"pullback of {f!r} along {k!r} is not representable", (f, k))
    for f in sorted(R.representables, key=repr):
        u = R.maps[f]
        for g in C.inbound(C.src(f)):
            push, _ = dm.pushforward(u, R.maps[g])
            if push.max_fiber() > R.bound:
                skipped += 1
                continue
            rep.pushforwards_checked += 1
            if compute_pushforward(R, f, g) is None:
                raise NotExponentiable(f"{f!r} has no pushforward of {g!r}", (f, g))
    rep.cartesian = skipped == 0
    rep.skipped = skipped
    return rep


def yoneda_rm_functor(R: RMCat, D: RMCat) -> RMFunctor:
    """The Yoneda embedding ``R -> DFib_R`` into a materialized ``D = dfib_rmcat(R.cat)``."""
    from . import dfib as dm

    C = R.cat
    obj = {}
    isos = {}
    for A in C.objects:
        Y = dm.yoneda(C, A)
        i = dfib_object(D, Y)
        if i is None:
            raise Overflow(f"y({A}) exceeds the bound")
        obj[A] = i
        isos[A] = dm.find_iso(Y, D.fibrations[i])
    amap = {}
    for f, (A, B) in C.arrows.items():
        yA, yB = dm.yoneda(C, A), dm.yoneda(C, B)
        yf = dm.DFibMap(yA, yB, {c: {g: C.compose(f, g) for g in C.hom(c, A)} for c in C.objects})
        m = isos[A].inverse().then(yf).then(isos[B])
        key = dm._map_key(m)
        amap[f] = next(name for name in D.cat.hom(obj[A], obj[B]) if dm._map_key(D.maps[name]) == key)
    return RMFunctor(R, D, Functor(C, D.cat, obj, amap, name="y"))


# -- file formats --------------------------------------------------------------------

def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_rmcat(text: str, resolve: Callable[[str], FinCat]) -> RMCat:
    cat = None
    reps: list = []
    pfs: dict = {}
    name = ""
    pending_reps: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        try:
            if line.startswith("fincat:") or line.startswith("category:"):
                cat = resolve(line.split(":", 1)[1].strip())
            elif line.startswith("name:"):
                name = line.split(":", 1)[1].strip()
            elif line.startswith("representable:"):
                body = line.split(":", 1)[1].strip()
                if body == "all":
                    pending_reps.append("all")
                elif body == "isos":
                    pending_reps.append("isos")
                else:
                    pending_reps.extend(t.strip() for t in body.split(",") if t.strip())
            elif line.startswith("pushforward "):
                lhs, rhs = line[len("pushforward "):].split("=")
                f, g = lhs.split()
                h, e = (s.strip() for s in rhs.split(" with eval "))
                pfs[(f, g)] = (h, e)
            else:
                raise ValueError(f"unrecognised line {raw!r}")
        except ValueError as exc:
            raise RMCatError(f"line {lineno}: {exc}") from None
    if cat is None:
        raise RMCatError("missing 'fincat:' reference")
    names = {str(f): f for f in cat.arrows}
    for r in pending_reps:
        if r == "all":
            reps.extend(cat.arrows)
        elif r == "isos":
            reps.extend(f for f in cat.arrows if cat.is_iso(f))
        else:
            if r not in names:
                raise RMCatError(f"unknown arrow {r!r}")
            reps.append(names[r])
    reps.extend(cat.id(a) for a in cat.objects)
    table = {(names[f], names[g]): Pushforward(names[h], names[e]) for (f, g), (h, e) in pfs.items()}
    return RMCat(cat, reps, table, name=name or cat.name)


def parse_theory(text: str, resolve_rmcat: Callable[[str], RMCat]) -> Theory:
    R = None
    sets: dict = {}
    maps: dict = {}
    name = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        try:
            if line.startswith("theory "):
                head = line[len("theory "):]
                name, ref = (s.strip() for s in head.split(" over "))
                R = resolve_rmcat(ref)
            elif line.startswith("set "):
                obj, rest = (s.strip() for s in line[len("set "):].split(":", 1))
                rest = rest.strip()
                if not (rest.startswith("{") and rest.endswith("}")):
                    raise ValueError("expected {...}")
                sets[_find(R.cat.objects, obj)] = tuple(t.strip() for t in rest[1:-1].split(",") if t.strip())
            elif line.startswith("map "):
                arr, rest = (s.strip() for s in line[len("map "):].split(":", 1))
                pairs = {}
                for item in rest.split(","):
                    if item.strip():
                        a, b = (s.strip() for s in item.split("->"))
                        pairs[a] = b
                maps[_find(R.cat.arrows, arr)] = pairs
            else:
                raise ValueError(f"unrecognised line {raw!r}")
        except (ValueError, KeyError, AttributeError) as exc:
            raise TheoryError(f"line {lineno}: {exc}") from None
    if R is None:
        raise TheoryError("missing 'theory NAME over RMCAT' header")
    C = R.cat
    for A in C.objects:
        sets.setdefault(A, ())
    for f in C.arrows:
        if C.is_identity(f):
            maps[f] = {a: a for a in sets[C.src(f)]}
        else:
            maps.setdefault(f, {})
    return Theory(R, sets, maps, name=name)


def _find(items, name: str):
    for x in items:
        if str(x) == name:
            return x
    raise KeyError(f"unknown name {name!r}")
