"""Brute-force oracles, written without the search code under test.

Each oracle enumerates the full space of candidates with ``itertools.product``
and filters by the defining equations, so it is slow but obviously correct.
"""
from __future__ import annotations

import itertools

from rmk.dfib import DFib
from rmk.fincat import FinCat


def all_fiber_functions(D: DFib, E: DFib):
    """Every family of fiberwise functions ``D(a) -> E(a)``, natural or not."""
    objs = list(D.base.objects)
    per_object = []
    for a in objs:
        xs = D.fiber(a)
        per_object.append([dict(zip(xs, img)) for img in itertools.product(E.fiber(a), repeat=len(xs))])
    for choice in itertools.product(*per_object):
        yield dict(zip(objs, choice))


def is_natural(D: DFib, E: DFib, comps: dict) -> bool:
    B = D.base
    for f, (a, b) in B.arrows.items():
        for x in D.fiber(b):
            if comps[a][D.act(x, f)] != E.act(comps[b][x], f):
                return False
    return True


def count_natural_maps(D: DFib, E: DFib) -> int:
    return sum(1 for c in all_fiber_functions(D, E) if is_natural(D, E, c))


def hom_sizes(C: FinCat) -> dict:
    return {(a, b): sum(1 for f, st in C.arrows.items() if st == (a, b)) for a in C.objects for b in C.objects}


def terminal_by_homs(C: FinCat) -> list:
    sizes = hom_sizes(C)
    return [t for t in C.objects if all(sizes[(a, t)] == 1 for a in C.objects)]


def pullback_by_cones(C: FinCat, f, g) -> list:
    """All limit cones ``(apex, l, r)`` over the cospan ``f, g``, by direct search."""
    cones = []
    for p in C.objects:
        for l in C.hom(p, C.src(f)):
            for r in C.hom(p, C.src(g)):
                if C.compose(f, l) == C.compose(g, r):
                    cones.append((p, l, r))
    limits = []
    for (p, l, r) in cones:
        ok = True
        for (q, l2, r2) in cones:
            fac = [u for u in C.hom(q, p) if C.compose(l, u) == l2 and C.compose(r, u) == r2]
            if len(fac) != 1:
                ok = False
                break
        if ok:
            limits.append((p, l, r))
    return limits


def fiber_pullback_pairs(bottom, right, b, Yp, X, Fb) -> set:
    return {(yp, x) for yp in Yp.fiber(b) for x in X.fiber(Fb) if bottom(b, yp) == right(Fb, x)}
