"""Finite categories, functors, natural transformations and finite-limit search.

Objects and arrows are arbitrary hashable names.  A category stores its
composition table explicitly; ``compose(g, f)`` is ``g . f`` (first ``f``,
then ``g``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

Obj = Hashable
Arr = Hashable

DEFAULT_CONE_CAP = 10**6


class CategoryError(Exception):
    """Base class for law violations; ``witness`` holds the counterexample."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class NonAssociative(CategoryError):
    pass


class IdentityLaw(CategoryError):
    pass


class NotFunctorial(CategoryError):
    pass


class NotNatural(CategoryError):
    pass


class MalformedCategory(CategoryError):
    pass


class Overflow(Exception):
    """An exhaustive search exceeded its hard cap."""

    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


class FinCat:
    def __init__(
        self,
        objects: Iterable[Obj],
        arrows: Mapping[Arr, tuple[Obj, Obj]],
        identities: Mapping[Obj, Arr],
        composition: Mapping[tuple[Arr, Arr], Arr],
        name: str = "",
    ):
        self.objects: tuple = tuple(objects)
        self.arrows: dict = dict(arrows)
        self.identities: dict = dict(identities)
        self.composition: dict = dict(composition)
        self.name = name
        self._obj_index = {o: i for i, o in enumerate(self.objects)}
        self._hom: dict = {}
        for f, (a, b) in self.arrows.items():
            self._hom.setdefault((a, b), []).append(f)
        self._identity_arrows = set(self.identities.values())

    # -- basic queries -------------------------------------------------
    def src(self, f: Arr) -> Obj:
        return self.arrows[f][0]

    def tgt(self, f: Arr) -> Obj:
        return self.arrows[f][1]

    def id(self, a: Obj) -> Arr:
        return self.identities[a]

    def is_identity(self, f: Arr) -> bool:
        return f in self._identity_arrows

    def hom(self, a: Obj, b: Obj) -> list:
        return self._hom.get((a, b), [])

    def compose(self, g: Arr, f: Arr) -> Arr:
        if self.arrows[f][1] != self.arrows[g][0]:
            raise ValueError(f"arrows {g!r} . {f!r} are not composable")
        if f in self._identity_arrows:
            return g
        if g in self._identity_arrows:
            return f
        return self.composition[(g, f)]

    def compose_path(self, *arrows: Arr) -> Arr:
        """``compose_path(h, g, f) == h . g . f``."""
        result = arrows[-1]
        for g in reversed(arrows[:-1]):
            result = self.compose(g, result)
        return result

    def inverse(self, f: Arr) -> Arr | None:
        a, b = self.arrows[f]
        for g in self.hom(b, a):
            if self.compose(g, f) == self.id(a) and self.compose(f, g) == self.id(b):
                return g
        return None

    def is_iso(self, f: Arr) -> bool:
        return self.inverse(f) is not None

    def isomorphic(self, a: Obj, b: Obj) -> bool:
        return any(self.is_iso(f) for f in self.hom(a, b))

    def inbound(self, b: Obj) -> list:
        return [f for f, (_, t) in self.arrows.items() if t == b]

    def outbound(self, a: Obj) -> list:
        return [f for f, (s, _) in self.arrows.items() if s == a]

    def non_identity_arrows(self) -> list:
        return [f for f in self.arrows if f not in self._identity_arrows]

    def __repr__(self) -> str:
        label = self.name or "FinCat"
        return f"<{label}: {len(self.objects)} objects, {len(self.arrows)} arrows>"

    # -- validation ------------------------------------------------------
    def validate(self) -> "FinCat":
        if len(set(self.objects)) != len(self.objects):
            raise MalformedCategory("duplicate object names")
        for o in self.objects:
            if o not in self.identities:
                raise MalformedCategory(f"object {o!r} has no identity", o)
            i = self.identities[o]
            if self.arrows.get(i) != (o, o):
                raise IdentityLaw(f"identity of {o!r} is not an endo-arrow", i)
        for f, (a, b) in self.arrows.items():
            if a not in self._obj_index or b not in self._obj_index:
                raise MalformedCategory(f"arrow {f!r} has unknown endpoint", f)
        for (g, f), h in self.composition.items():
            if g not in self.arrows or f not in self.arrows or h not in self.arrows:
                raise MalformedCategory(f"composition entry {g!r}.{f!r} names unknown arrows", (g, f))
            if self.tgt(f) != self.src(g) or self.arrows[h] != (self.src(f), self.tgt(g)):
                raise MalformedCategory(f"composition entry {g!r}.{f!r}={h!r} is ill-typed", (g, f, h))
        for f, (a, b) in self.arrows.items():
            if (self.identities[b], f) in self.composition and self.composition[(self.identities[b], f)] != f:
                raise IdentityLaw(f"id . {f!r} != {f!r}", f)
            if (f, self.identities[a]) in self.composition and self.composition[(f, self.identities[a])] != f:
                raise IdentityLaw(f"{f!r} . id != {f!r}", f)
        non_id = self.non_identity_arrows()
        for f in non_id:
            for g in non_id:
                if self.tgt(f) == self.src(g) and (g, f) not in self.composition:
                    raise MalformedCategory(f"composite {g!r}.{f!r} missing", (g, f))
        out = {o: [] for o in self.objects}
        for f in self.arrows:
            out[self.src(f)].append(f)
        for f in self.arrows:
            for g in out[self.tgt(f)]:
                gf = self.compose(g, f)
                for h in out[self.tgt(g)]:
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f):
                        raise NonAssociative(f"({h!r}.{g!r}).{f!r} != {h!r}.({g!r}.{f!r})", (f, g, h))
        return self

    # -- constructors ------------------------------------------------------
    @classmethod
    def build(
        cls,
        objects: Sequence[Obj],
        arrows: Mapping[Arr, tuple[Obj, Obj]] = (),
        composition: Mapping[tuple[Arr, Arr], Arr] = (),
        name: str = "",
        validate: bool = True,
    ) -> "FinCat":
        """Build from non-identity arrows; identities ``("id", o)`` are added."""
        arrows = dict(arrows)
        identities = {}
        all_arrows = {}
        for o in objects:
            i = ("id", o)
            identities[o] = i
            all_arrows[i] = (o, o)
        all_arrows.update(arrows)
        cat = cls(objects, all_arrows, identities, dict(composition), name=name)
        return cat.validate() if validate else cat

    @classmethod
    def from_poset(cls, elements: Sequence[Obj], leq: Callable[[Obj, Obj], bool], name: str = "") -> "FinCat":
        arrows = {}
        identities = {}
        for a in elements:
            for b in elements:
                if leq(a, b):
                    arrows[(a, b)] = (a, b)
            identities[a] = (a, a)
        comp = {}
        for (a, b) in arrows:
            for (b2, c) in arrows:
                if b == b2:
                    comp[((b, c), (a, b))] = (a, c)
        return cls(elements, arrows, identities, comp, name=name).validate()

    @classmethod
    def from_monoid(cls, elements: Sequence[Any], unit: Any, mul: Callable[[Any, Any], Any], obj: Obj = "*", name: str = "") -> "FinCat":
        """One-object category; ``mul(g, f)`` is ``g . f``."""
        arrows = {e: (obj, obj) for e in elements}
        comp = {(g, f): mul(g, f) for g in elements for f in elements}
        return cls([obj], arrows, {obj: unit}, comp, name=name).validate()


def terminal_category() -> FinCat:
    return FinCat.build(["*"], name="1")


def walking_arrow() -> FinCat:
    return FinCat.build([0, 1], {"f": (0, 1)}, name="walking-arrow")


def discrete(objects: Sequence[Obj]) -> FinCat:
    return FinCat.build(list(objects), name=f"discrete{len(objects)}")


def walking_cospan() -> FinCat:
    return FinCat.build(["l", "r", "c"], {"lc": ("l", "c"), "rc": ("r", "c")}, name="cospan")


def walking_span() -> FinCat:
    return FinCat.build(["s", "l", "r"], {"sl": ("s", "l"), "sr": ("s", "r")}, name="span")


def walking_iso() -> FinCat:
    return FinCat.build(
        ["a", "b"],
        {"u": ("a", "b"), "v": ("b", "a")},
        {("v", "u"): ("id", "a"), ("u", "v"): ("id", "b")},
        name="walking-iso",
    )


def parallel_pair() -> FinCat:
    return FinCat.build([0, 1], {"s": (0, 1), "t": (0, 1)}, name="parallel-pair")


def empty_category() -> FinCat:
    return FinCat([], {}, {}, {}, name="0")


# -- functors and natural transformations ------------------------------------

@dataclass(eq=False)
class Functor:
    source: FinCat
    target: FinCat
    obj_map: dict
    arr_map: dict
    name: str = ""

    def __call__(self, x):
        if x in self.obj_map and x in self.source._obj_index:
            return self.obj_map[x]
        return self.arr_map[x]

    def ob(self, a: Obj) -> Obj:
        return self.obj_map[a]

    def ar(self, f: Arr) -> Arr:
        return self.arr_map[f]

    def validate(self) -> "Functor":
        S, T = self.source, self.target
        for a in S.objects:
            if a not in self.obj_map or self.obj_map[a] not in T._obj_index:
                raise NotFunctorial(f"object {a!r} not mapped into target", a)
        for f, (a, b) in S.arrows.items():
            if f not in self.arr_map:
                raise NotFunctorial(f"arrow {f!r} not mapped", f)
            Ff = self.arr_map[f]
            if T.arrows.get(Ff) != (self.obj_map[a], self.obj_map[b]):
                raise NotFunctorial(f"arrow {f!r} mapped to ill-typed {Ff!r}", f)
        for a in S.objects:
            if self.arr_map[S.id(a)] != T.id(self.obj_map[a]):
                raise NotFunctorial(f"identity of {a!r} not preserved", a)
        for (g, f), h in S.composition.items():
            if T.compose(self.arr_map[g], self.arr_map[f]) != self.arr_map[h]:
                raise NotFunctorial(f"composite {g!r}.{f!r} not preserved", (f, g))
        return self

    def then(self, other: "Functor") -> "Functor":
        """``other . self``."""
        return Functor(
            self.source,
            other.target,
            {a: other.obj_map[b] for a, b in self.obj_map.items()},
            {f: other.arr_map[g] for f, g in self.arr_map.items()},
        )


def identity_functor(C: FinCat) -> Functor:
    return Functor(C, C, {a: a for a in C.objects}, {f: f for f in C.arrows}, name="id")


def constant_functor(C: FinCat, D: FinCat, d: Obj) -> Functor:
    return Functor(C, D, {a: d for a in C.objects}, {f: D.id(d) for f in C.arrows})


@dataclass(eq=False)
class NatTrans:
    source: Functor
    target: Functor
    components: dict

    def __getitem__(self, a: Obj) -> Arr:
        return self.components[a]

    def validate(self) -> "NatTrans":
        F, G = self.source, self.target
        C, D = F.source, F.target
        for a in C.objects:
            c = self.components.get(a)
            if D.arrows.get(c) != (F.ob(a), G.ob(a)):
                raise NotNatural(f"component at {a!r} has the wrong type", a)
        for f, (a, b) in C.arrows.items():
            if D.compose(self.components[b], F.ar(f)) != D.compose(G.ar(f), self.components[a]):
                raise NotNatural(f"naturality square for {f!r} does not commute", f)
        return self

    def is_iso(self) -> bool:
        D = self.source.target
        return all(D.is_iso(c) for c in self.components.values())


def identity_nat(F: Functor) -> NatTrans:
    return NatTrans(F, F, {a: F.target.id(F.ob(a)) for a in F.source.objects})


def validate(data):
    """Validate a category, functor or natural transformation, returning it."""
    return data.validate()


# -- enumeration ---------------------------------------------------------------

def enumerate_functors(
    C: FinCat,
    D: FinCat,
    obj_choices: Mapping[Obj, Iterable[Obj]] | None = None,
    cap: int = DEFAULT_CONE_CAP,
) -> Iterator[Functor]:
    """All functors ``C -> D`` (optionally restricting each object's image)."""
    objs = list(C.objects)
    choices = {a: list(obj_choices[a]) if obj_choices and a in obj_choices else list(D.objects) for a in objs}
    arrows = C.non_identity_arrows()
    # composites whose three arrows are all non-identity
    constraints: dict = {f: [] for f in arrows}
    pos = {f: i for i, f in enumerate(arrows)}
    for (g, f), h in C.composition.items():
        if f in pos and g in pos:
            trio = [x for x in (f, g, h)]
            last = max((pos[x] for x in trio if x in pos), default=-1)
            constraints[arrows[last]].append((g, f, h))
    count = 0

    def assign_arrows(obj_map, arr_map, i):
        nonlocal count
        if i == len(arrows):
            count += 1
            if count > cap:
                raise Overflow("functor enumeration cap exceeded")
            full = dict(arr_map)
            for a in objs:
                full[C.id(a)] = D.id(obj_map[a])
            yield Functor(C, D, dict(obj_map), full)
            return
        f = arrows[i]
        a, b = C.arrows[f]
        for cand in D.hom(obj_map[a], obj_map[b]):
            arr_map[f] = cand
            ok = True
            for (g, f2, h) in constraints[f]:
                Fg = arr_map[g] if g in arr_map else D.id(obj_map[C.src(g)])
                Ff = arr_map[f2] if f2 in arr_map else D.id(obj_map[C.src(f2)])
                Fh = arr_map[h] if h in arr_map else (D.id(obj_map[C.src(h)]) if C.is_identity(h) else None)
                if Fh is None:
                    continue
                if D.compose(Fg, Ff) != Fh:
                    ok = False
                    break
            if ok:
                yield from assign_arrows(obj_map, arr_map, i + 1)
            del arr_map[f]

    def assign_objects(obj_map, i):
        if i == len(objs):
            yield from assign_arrows(obj_map, {}, 0)
            return
        for d in choices[objs[i]]:
            obj_map[objs[i]] = d
            yield from assign_objects(obj_map, i + 1)
        del obj_map[objs[i]]

    yield from assign_objects({}, 0)


def enumerate_nat_trans(F: Functor, G: Functor) -> Iterator[NatTrans]:
    C, D = F.source, F.target
    objs = list(C.objects)
    options = [D.hom(F.ob(a), G.ob(a)) for a in objs]
    for combo in itertools.product(*options):
        comps = dict(zip(objs, combo))
        if all(
            D.compose(comps[b], F.ar(f)) == D.compose(G.ar(f), comps[a])
            for f, (a, b) in C.arrows.items()
        ):
            yield NatTrans(F, G, comps)


def find_isomorphism(C: FinCat, D: FinCat) -> Functor | None:
    """An isomorphism of categories ``C -> D``, if one exists."""
    if len(C.objects) != len(D.objects) or len(C.arrows) != len(D.arrows):
        return None
    for F in enumerate_functors(C, D):
        if len(set(F.obj_map.values())) == len(C.objects) and len(set(F.arr_map.values())) == len(C.arrows):
            return F
    return None


# -- terminal objects and limits --------------------------------------------

def terminal_object(C: FinCat) -> Obj | None:
    for t in C.objects:
        if all(len(C.hom(a, t)) == 1 for a in C.objects):
            return t
    return None


def terminal_objects(C: FinCat) -> list:
    return [t for t in C.objects if all(len(C.hom(a, t)) == 1 for a in C.objects)]


def initial_object(C: FinCat) -> Obj | None:
    for t in C.objects:
        if all(len(C.hom(t, a)) == 1 for a in C.objects):
            return t
    return None


@dataclass(frozen=True)
class Cone:
    apex: Obj
    legs: tuple  # tuple of (shape object, arrow) pairs in shape order

    def leg(self, j: Obj) -> Arr:
        for k, f in self.legs:
            if k == j:
                return f
        raise KeyError(j)


def cones(C: FinCat, diagram: Functor, apexes: Iterable[Obj] | None = None, cap: int = DEFAULT_CONE_CAP) -> list[Cone]:
    J = diagram.source
    shape_objs = list(J.objects)
    shape_arrows = J.non_identity_arrows()
    out: list[Cone] = []
    counter = [0]

    def extend(apex, legs, i):
        if i == len(shape_objs):
            out.append(Cone(apex, tuple((j, legs[j]) for j in shape_objs)))
            return
        j = shape_objs[i]
        for f in C.hom(apex, diagram.ob(j)):
            counter[0] += 1
            if counter[0] > cap:
                raise Overflow(f"more than {cap} candidate cones", partial=out)
            legs[j] = f
            ok = True
            for u in shape_arrows:
                s, t = J.arrows[u]
                if s in legs and t in legs and (s == j or t == j):
                    if C.compose(diagram.ar(u), legs[s]) != legs[t]:
                        ok = False
                        break
            if ok:
                extend(apex, legs, i + 1)
            del legs[j]

    for apex in (C.objects if apexes is None else apexes):
        extend(apex, {}, 0)
    return out


def factorizations(C: FinCat, limit: Cone, cone: Cone) -> list:
    """Arrows ``m : cone.apex -> limit.apex`` with ``limit.leg(j) . m == cone.leg(j)``."""
    return [
        m
        for m in C.hom(cone.apex, limit.apex)
        if all(C.compose(limit.leg(j), m) == f for j, f in cone.legs)
    ]


def is_limit(C: FinCat, diagram: Functor, candidate: Cone, all_cones: list[Cone] | None = None) -> bool:
    if all_cones is None:
        all_cones = cones(C, diagram)
    return all(len(factorizations(C, candidate, k)) == 1 for k in all_cones)


def all_limits(C: FinCat, diagram: Functor, cap: int = DEFAULT_CONE_CAP) -> list[Cone]:
    every = cones(C, diagram, cap=cap)
    return [L for L in every if is_limit(C, diagram, L, every)]


def finite_limit(C: FinCat, diagram: Functor, cap: int = DEFAULT_CONE_CAP) -> Cone | None:
    """A limit cone for ``diagram`` (first in object order), or ``None``."""
    every = cones(C, diagram, cap=cap)
    for L in every:
        if is_limit(C, diagram, L, every):
            return L
    return None


_SHAPES: dict = {}


def shape(kind: str) -> FinCat:
    if kind not in _SHAPES:
        _SHAPES[kind] = {
            "empty": empty_category,
            "pair": lambda: discrete(["l", "r"]),
            "cospan": walking_cospan,
        }[kind]()
    return _SHAPES[kind]


def cospan_diagram(C: FinCat, f: Arr, g: Arr) -> Functor:
    """Diagram ``l --f--> c <--g-- r``."""
    J = shape("cospan")
    if C.tgt(f) != C.tgt(g):
        raise ValueError("not a cospan")
    return Functor(
        J,
        C,
        {"l": C.src(f), "r": C.src(g), "c": C.tgt(f)},
        {"lc": f, "rc": g, ("id", "l"): C.id(C.src(f)), ("id", "r"): C.id(C.src(g)), ("id", "c"): C.id(C.tgt(f))},
    )


def pair_diagram(C: FinCat, a: Obj, b: Obj) -> Functor:
    J = shape("pair")
    return Functor(J, C, {"l": a, "r": b}, {("id", "l"): C.id(a), ("id", "r"): C.id(b)})


def pullback(C: FinCat, f: Arr, g: Arr) -> Cone | None:
    """Pullback of ``f`` and ``g``; legs are keyed ``l``, ``r``, ``c``."""
    return finite_limit(C, cospan_diagram(C, f, g))


def all_pullbacks(C: FinCat, f: Arr, g: Arr) -> list[Cone]:
    return all_limits(C, cospan_diagram(C, f, g))


def product(C: FinCat, a: Obj, b: Obj) -> Cone | None:
    return finite_limit(C, pair_diagram(C, a, b))


def is_pullback_square(C: FinCat, top: Arr, left: Arr, right: Arr, bottom: Arr) -> bool:
    """Is ``right . top == bottom . left`` a pullback square?"""
    if C.compose(right, top) != C.compose(bottom, left):
        return False
    D = cospan_diagram(C, bottom, right)
    cand = Cone(C.src(top), (("l", left), ("r", top), ("c", C.compose(right, top))))
    return is_limit(C, D, cand)


# -- slices ----------------------------------------------------------------------

def slice_category(C: FinCat, X: Obj) -> tuple[FinCat, Functor]:
    """``C/X`` with its domain projection.

    Objects are the arrows into ``X``; an arrow ``f -> g`` is a triple
    ``(h, f, g)`` with ``g . h == f``.
    """
    objs = [f for f in C.arrows if C.tgt(f) == X]
    arrows = {}
    identities = {}
    proj_arr = {}
    for f in objs:
        for g in objs:
            for h in C.hom(C.src(f), C.src(g)):
                if C.compose(g, h) == f:
                    arrows[(h, f, g)] = (f, g)
                    proj_arr[(h, f, g)] = h
        identities[f] = (C.id(C.src(f)), f, f)
    comp = {}
    for (k, g, h2) in arrows:
        for (h, f, g2) in arrows:
            if g2 == g:
                comp[((k, g, h2), (h, f, g))] = (C.compose(k, h), f, h2)
    S = FinCat(objs, arrows, identities, comp, name=f"{C.name or 'C'}/{X}")
    P = Functor(S, C, {f: C.src(f) for f in objs}, proj_arr, name="dom")
    return S, P


def full_subcategory(C: FinCat, objects: Iterable[Obj], name: str = "") -> tuple[FinCat, Functor]:
    keep = [o for o in C.objects if o in set(objects)]
    ks = set(keep)
    arrows = {f: st for f, st in C.arrows.items() if st[0] in ks and st[1] in ks}
    comp = {(g, f): h for (g, f), h in C.composition.items() if f in arrows and g in arrows}
    S = FinCat(keep, arrows, {o: C.id(o) for o in keep}, comp, name=name or f"{C.name}|sub")
    inc = Functor(S, C, {o: o for o in keep}, {f: f for f in arrows}, name="inc")
    return S, inc


def opposite(C: FinCat) -> FinCat:
    arrows = {f: (b, a) for f, (a, b) in C.arrows.items()}
    comp = {(f, g): h for (g, f), h in C.composition.items()}
    return FinCat(C.objects, arrows, C.identities, comp, name=f"{C.name}^op")


# -- structural properties -----------------------------------------------------

def is_faithful(F: Functor) -> bool:
    seen = {}
    for f in F.source.arrows:
        key = (F.source.src(f), F.source.tgt(f), F.ar(f))
        if key in seen:
            return False
        seen[key] = f
    return True


def reflects_isomorphisms(F: Functor) -> bool:
    return all(F.source.is_iso(f) for f in F.source.arrows if F.target.is_iso(F.ar(f)))


def is_discrete_fibration(F: Functor) -> bool:
    """Unique lifting of every arrow ``b -> F(e)`` to an arrow into ``e``."""
    S, T = F.source, F.target
    into = {e: S.inbound(e) for e in S.objects}
    for e in S.objects:
        images = [F.ar(d) for d in into[e]]
        for b in T.inbound(F.ob(e)):
            if images.count(b) != 1:
                return False
    return True


def is_cofiltered(C: FinCat) -> bool:
    """Nonempty, every pair of objects has a cone, every parallel pair is equalized."""
    if not C.objects:
        return False
    for a in C.objects:
        for b in C.objects:
            if not any(C.hom(c, a) and C.hom(c, b) for c in C.objects):
                return False
    for a in C.objects:
        for b in C.objects:
            hs = C.hom(a, b)
            for f in hs:
                for g in hs:
                    if f == g:
                        continue
                    if not any(
                        C.compose(f, h) == C.compose(g, h)
                        for c in C.objects
                        for h in C.hom(c, a)
                    ):
                        return False
    return True


def is_pullback_of_categories(
    P: FinCat, left: Functor, top: Functor, right: Functor, bottom: Functor
) -> bool:
    """Is the square ``right . top == bottom . left`` a pullback in Cat?

    Checked by comparing ``P`` with the canonical strict pullback.
    """
    A, B = left.target, top.target
    pairs_obj = [(a, b) for a in A.objects for b in B.objects if bottom.ob(a) == right.ob(b)]
    pairs_arr = [(f, g) for f in A.arrows for g in B.arrows if bottom.ar(f) == right.ar(g)]
    got_obj = [(left.ob(p), top.ob(p)) for p in P.objects]
    got_arr = [(left.ar(p), top.ar(p)) for p in P.arrows]
    if sorted(map(repr, got_obj)) != sorted(map(repr, pairs_obj)):
        return False
    if sorted(map(repr, got_arr)) != sorted(map(repr, pairs_arr)):
        return False
    return len(set(got_obj)) == len(got_obj) and len(set(got_arr)) == len(got_arr)


# -- .fincat file format ---------------------------------------------------------

def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_fincat(text: str, name: str = "") -> FinCat:
    """Parse the ``.fincat`` format (identities implicit, named ``id_<obj>``)."""
    objects: list = []
    arrows: dict = {}
    comp: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        try:
            if line.startswith("objects:"):
                objects.extend(o.strip() for o in line[len("objects:"):].split(",") if o.strip())
            elif line.startswith("arrow "):
                body = line[len("arrow "):]
                fname, rest = (s.strip() for s in body.split(":", 1))
                a, b = (s.strip() for s in rest.split("->"))
                arrows[fname] = (a, b)
            elif line.startswith("compose "):
                body = line[len("compose "):]
                lhs, h = (s.strip() for s in body.split("="))
                g, f = (s.strip() for s in lhs.split("."))
                comp[(g, f)] = h
            elif line.startswith("name:"):
                name = line[len("name:"):].strip()
            else:
                raise ValueError(f"unrecognised line: {raw!r}")
        except ValueError as exc:
            raise MalformedCategory(f"line {lineno}: {exc}") from None
    identities = {o: f"id_{o}" for o in objects}
    all_arrows = {f"id_{o}": (o, o) for o in objects}
    all_arrows.update(arrows)
    resolved = {}
    for (g, f), h in comp.items():
        resolved[(g, f)] = h
    cat = FinCat(objects, all_arrows, identities, resolved, name=name)
    # identity composites may be written explicitly; drop them into the implicit rule
    for (g, f), h in list(cat.composition.items()):
        if cat.is_identity(g) or cat.is_identity(f):
            del cat.composition[(g, f)]
    return cat.validate()


def format_fincat(C: FinCat) -> str:
    names = {o: _name(o) for o in C.objects}
    anames = {}
    for f in C.arrows:
        anames[f] = _name(f)
    for o in C.objects:
        anames[C.id(o)] = f"id_{names[o]}"
    lines = []
    if C.name:
        lines.append(f"name: {C.name}")
    lines.append("objects: " + ", ".join(names[o] for o in C.objects))
    for f in C.non_identity_arrows():
        a, b = C.arrows[f]
        lines.append(f"arrow {anames[f]} : {names[a]} -> {names[b]}")
    for (g, f), h in C.composition.items():
        if C.is_identity(g) or C.is_identity(f):
            continue
        lines.append(f"compose {anames[g]} . {anames[f]} = {anames[h]}")
    return "\n".join(lines) + "\n"


def _name(x) -> str:
    if isinstance(x, str):
        return x
    text = repr(x)
    return "".join(ch if ch.isalnum() or ch in "_'" else "_" for ch in text).strip("_") or "x"
