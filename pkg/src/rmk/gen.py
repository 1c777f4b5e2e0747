"""Seeded random generators for small categories, fibrations and squares.

Every generator takes a ``random.Random`` so that suites are reproducible
from a single integer seed.
"""
from __future__ import annotations

import random
from typing import Callable

from . import catalog
from .dfib import (
    DFib,
    DFibMap,
    Square,
    enumerate_maps,
    identity_map,
    product_dfib,
    pullback_dfib,
    right_adjoint,
    sum_maps,
    yoneda,
    yoneda_map,
)
from .fincat import FinCat


def random_poset(rng: random.Random, n: int) -> FinCat:
    """Random partial order on ``n`` objects (transitive closure of a random DAG)."""
    names = [f"o{i}" for i in range(n)]
    rel = {(i, j): i == j for i in range(n) for j in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.45:
                rel[(i, j)] = True
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if rel[(i, k)] and rel[(k, j)]:
                    rel[(i, j)] = True
    idx = {nm: i for i, nm in enumerate(names)}
    return FinCat.from_poset(names, lambda a, b: rel[(idx[a], idx[b])], name=f"poset{n}")


def random_category(rng: random.Random, max_objects: int = 4) -> FinCat:
    """A random small category: either a random poset or a catalog entry."""
    pool = [c for c in catalog.small_categories() if len(c.objects) <= max_objects]
    if rng.random() < 0.5 or not pool:
        return random_poset(rng, rng.randint(1, max_objects))
    return rng.choice(pool)


def random_symmetric_category(rng: random.Random, max_objects: int = 4) -> FinCat:
    """Usually a category with non-trivial automorphisms, where representable maps need not be monic."""
    if rng.random() < 0.7:
        pool = [c for c in catalog.symmetric_categories() if len(c.objects) <= max_objects]
        return rng.choice(pool)
    return random_category(rng, max_objects)


def random_rich_category(rng: random.Random, max_objects: int = 4) -> FinCat:
    """A random category carrying at least one non-identity representable arrow, when possible."""
    for _ in range(20):
        B = random_category(rng, max_objects)
        if representable_arrows(B):
            return B
    return catalog.chain(min(2, max_objects))


def random_cartesian_category(rng: random.Random, max_objects: int = 4) -> FinCat:
    pool = [c for c in catalog.cartesian_categories() if len(c.objects) <= max_objects]
    return rng.choice(pool)


def random_dfib(rng: random.Random, B: FinCat, max_fiber: int = 3, name: str = "D", tries: int = 50) -> DFib:
    """A random presheaf with fibers of size at most ``max_fiber``.

    Fiber sizes are drawn first; restrictions are then found by randomized
    backtracking over the non-identity arrows.  Falls back to the empty
    presheaf if nothing fits.
    """
    for _ in range(tries):
        sizes = {a: rng.randint(0, max_fiber) for a in B.objects}
        fibers = {a: [f"{_tag(a)}{i}" for i in range(sizes[a])] for a in B.objects}
        D = _random_restrictions(rng, B, fibers, name)
        if D is not None:
            return D
    return DFib(B, {}, {}, name=name)


def _tag(a) -> str:
    s = str(a)
    return "".join(ch for ch in s if ch.isalnum()) or "x"


def _random_restrictions(rng: random.Random, B: FinCat, fibers: dict, name: str, budget: int = 2000):
    arrows = B.non_identity_arrows()
    slots = [(f, x) for f in arrows for x in fibers[B.tgt(f)]]
    rng.shuffle(slots)
    restr = {f: {} for f in B.arrows}
    for a in B.objects:
        restr[B.id(a)] = {x: x for x in fibers[a]}
    comps = [(g, f, h) for (g, f), h in B.composition.items()]
    by_arrow: dict = {f: [] for f in arrows}
    for (g, f, h) in comps:
        for k in (g, f, h):
            if k in by_arrow:
                by_arrow[k].append((g, f, h))
    steps = [0]

    def consistent(f) -> bool:
        for (g, f2, h) in by_arrow[f]:
            for x in fibers[B.tgt(g)]:
                xg = restr[g].get(x)
                if xg is None:
                    continue
                l = restr[f2].get(xg)
                r = restr[h].get(x)
                if l is not None and r is not None and l != r:
                    return False
        return True

    def go(i) -> bool:
        steps[0] += 1
        if steps[0] > budget:
            return False
        if i == len(slots):
            return True
        f, x = slots[i]
        opts = list(fibers[B.src(f)])
        rng.shuffle(opts)
        for e in opts:
            restr[f][x] = e
            if consistent(f) and go(i + 1):
                return True
            del restr[f][x]
        return False

    if not go(0):
        return None
    try:
        return DFib(B, fibers, restr, name=name).validate()
    except Exception:
        return None


def random_map(rng: random.Random, D: DFib, E: DFib, allowed: Callable | None = None) -> DFibMap | None:
    """A random map ``D -> E`` (or ``None``), by a shuffled search."""
    def shuffled(a, x):
        opts = list(E.fiber(a)) if allowed is None else list(allowed(a, x))
        rng.shuffle(opts)
        return opts

    for m in enumerate_maps(D, E, allowed=shuffled):
        return m
    return None


def random_representable(rng: random.Random, B: FinCat, max_fiber: int = 3, tries: int = 40, proper: bool = False) -> DFibMap:
    """A random representable map over ``B`` with fibers of size at most ``max_fiber``.

    Candidates are pullbacks of ``y(f)`` along random maps, sums of such,
    isomorphisms, and plain random maps; each is kept only if a right
    adjoint is found.  With ``proper`` set, isomorphisms are rejected while
    tries remain.
    """
    for _ in range(tries):
        kind = rng.random()
        u = None
        if kind < 0.6:
            u = _pulled_yoneda(rng, B, max_fiber)
        elif kind < 0.7:
            c = rng.choice(B.objects)
            Y = random_dfib(rng, B, max_fiber, "Y")
            _, u, _ = product_dfib(Y, yoneda(B, c))
        elif kind < 0.8:
            u1 = _pulled_yoneda(rng, B, max_fiber)
            u2 = _pulled_yoneda(rng, B, max_fiber)
            if u1 is not None and u2 is not None:
                u = sum_maps(u1, u2)
        elif kind < 0.9:
            D = random_dfib(rng, B, max_fiber, "Y")
            u = identity_map(D)
        else:
            X = random_dfib(rng, B, max_fiber, "X")
            Y = random_dfib(rng, B, max_fiber, "Y")
            u = random_map(rng, X, Y)
        if u is None or u.source.max_fiber() > max_fiber or u.target.max_fiber() > max_fiber:
            continue
        if proper and u.is_iso():
            continue
        if right_adjoint(u) is not None:
            return u
    return identity_map(random_dfib(rng, B, max_fiber, "Y"))


_REP_ARROWS: dict = {}


def representable_arrows(B: FinCat) -> list:
    """Non-invertible arrows ``f`` of ``B`` for which ``y(f)`` is a representable map."""
    key = id(B)
    if key not in _REP_ARROWS:
        found = []
        for f in B.non_identity_arrows():
            if not B.is_iso(f) and right_adjoint(yoneda_arrow(B, f)) is not None:
                found.append(f)
        _REP_ARROWS[key] = (B, found)
    return _REP_ARROWS[key][1]


def yoneda_arrow(B: FinCat, f) -> DFibMap:
    a, b = B.arrows[f]
    ya, yb = yoneda(B, a), yoneda(B, b)
    return DFibMap(ya, yb, {c: {g: B.compose(f, g) for g in B.hom(c, a)} for c in B.objects})


def _pulled_yoneda(rng: random.Random, B: FinCat, max_fiber: int, Y: DFib | None = None) -> DFibMap | None:
    """Pull a representable ``y(f)`` back along a random map into ``y(b)``."""
    arrows = representable_arrows(B)
    if not arrows or rng.random() < 0.1:
        f = rng.choice(list(B.arrows))
    else:
        f = rng.choice(arrows)
    b = B.tgt(f)
    yf = yoneda_arrow(B, f)
    if right_adjoint(yf) is None:
        return None
    yb = yf.target
    if Y is None and rng.random() < 0.3 and yb.max_fiber() <= max_fiber:
        return yf
    if Y is None:
        if rng.random() < 0.5:
            Y = random_dfib(rng, B, max_fiber, "Y")
        else:
            c = rng.choice(B.objects)
            Y = yoneda(B, c)
            if Y.max_fiber() > max_fiber:
                return None
    w = random_map(rng, Y, yb)
    if w is None:
        return None
    P, pY, _ = pullback_dfib(yf, w)
    return pY


def random_over(rng: random.Random, X: DFib, max_fiber: int = 2) -> DFibMap:
    """A random fibration with a map to ``X``."""
    B = X.base
    if rng.random() < 0.5:
        A = random_dfib(rng, B, max_fiber, "A")
        P, p1, _ = product_dfib(X, A)
        return p1
    Z = random_dfib(rng, B, max_fiber + 1, "Z")
    g = random_map(rng, Z, X)
    if g is None:
        A = random_dfib(rng, B, max_fiber, "A")
        P, p1, _ = product_dfib(X, A)
        return p1
    return g


def _random_map_into(rng: random.Random, Y: DFib, max_fiber: int) -> DFibMap | None:
    """A random map into ``Y``: from a random fibration, or from ``y(c)`` picking an element."""
    B = Y.base
    if rng.random() < 0.5:
        elems = Y.elements()
        if elems:
            c, y = rng.choice(elems)
            if yoneda(B, c).max_fiber() <= max_fiber:
                return yoneda_map(B, c, Y, y)
    Yp = random_dfib(rng, B, max_fiber, "Yp")
    return random_map(rng, Yp, Y)


def _shrink(rng: random.Random, P: DFib, max_fiber: int) -> DFibMap | None:
    """A non-invertible representable map into ``P``, if one is found quickly."""
    B = P.base
    objs = list(B.objects)
    rng.shuffle(objs)
    for a in objs:
        _, v, _ = product_dfib(P, yoneda(B, a))
        if not v.is_iso() and v.source.max_fiber() <= max_fiber and right_adjoint(v) is not None:
            return v
    for _ in range(5):
        v = _pulled_yoneda(rng, B, max_fiber, P)
        if v is not None and not v.is_iso() and right_adjoint(v) is not None:
            return v
    return None


def random_square(rng: random.Random, B: FinCat, max_fiber: int = 3, tries: int = 40) -> Square:
    """A random commuting square with representable vertical maps.

    Four constructions are mixed: pullback squares by construction; pullback
    squares whose top-left corner is shrunk along a further representable map
    (a pullback again only when that map is invertible); a pullback square
    pasted with the square from ``u`` to an identity; and two independent
    representable maps joined by a random compatible top map.
    """
    for _ in range(tries):
        u = random_representable(rng, B, max_fiber, proper=rng.random() < 0.7)
        kind = rng.random()
        if kind < 0.35:
            psi = _random_map_into(rng, u.target, max_fiber)
            if psi is None:
                continue
            P, pY, pX = pullback_dfib(u, psi)
            if P.max_fiber() > max_fiber:
                continue
            return Square(top=pX, bottom=psi, left=pY, right=u)
        if kind < 0.8 and kind >= 0.6:
            # paste a pullback square with the square (u, id): a pullback only if u* is invertible
            psi = _random_map_into(rng, u.target, max_fiber)
            if psi is None:
                continue
            P, pY, pX = pullback_dfib(u, psi)
            if P.max_fiber() > max_fiber:
                continue
            return Square(top=pX.then(u), bottom=psi, left=pY, right=identity_map(u.target))
        if kind < 0.6:
            # shrink the corner of a pullback square along a representable v
            psi = _random_map_into(rng, u.target, max_fiber)
            if psi is None:
                continue
            P, pY, pX = pullback_dfib(u, psi)
            if P.max_fiber() > max_fiber:
                continue
            v = _shrink(rng, P, max_fiber)
            if v is None:
                continue
            return Square(top=v.then(pX), bottom=psi, left=v.then(pY), right=u)
        up = random_representable(rng, B, max_fiber)
        psi = random_map(rng, up.target, u.target)
        if psi is None:
            continue
        X = u.source
        pre = {a: {} for a in B.objects}
        for a in B.objects:
            for x in X.fiber(a):
                pre[a].setdefault(u(a, x), []).append(x)
        phi = random_map(rng, up.source, X, allowed=lambda a, s: pre[a].get(psi(a, up(a, s)), []))
        if phi is None:
            continue
        return Square(top=phi, bottom=psi, left=up, right=u)
    u = random_representable(rng, B, max_fiber)
    return Square(identity_map(u.source), identity_map(u.target), u, u)
