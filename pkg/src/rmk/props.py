"""Named, seeded property suites.

Every suite draws ``cases`` instances from ``random.Random(seed)`` and checks
each one by two independent routes where the property admits them.  A suite
result records the number of agreeing cases and the first counterexamples,
so the same seed always gives the same report.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import dfib as dm
from . import gen
from . import lf_props
from . import model as mdl
from .fincat import Overflow, terminal_objects
from .files import bundled_models, bundled_theories

MAX_COUNTEREXAMPLES = 5


@dataclass
class CaseResult:
    ok: bool
    detail: str = ""
    tags: tuple = ()


@dataclass
class SuiteResult:
    suite: str
    seed: int
    size: int
    cases: int
    passed: int = 0
    counterexamples: list = field(default_factory=list)
    tallies: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.cases


# -- suites -----------------------------------------------------------------------

def _yoneda_case(rng: random.Random, size: int, fiber: int) -> CaseResult:
    B = gen.random_category(rng, size)
    D = gen.random_dfib(rng, B, fiber)
    b = rng.choice(list(B.objects))
    w = dm.yoneda_bijection(B, b, D)
    ok = w.bijective and w.map_count == w.fiber_size
    tag = "empty-fiber" if w.fiber_size == 0 else "inhabited-fiber"
    return CaseResult(ok, f"base {B.name} at {b}: {w.map_count} maps, fiber {w.fiber_size}", (tag,))


def _pushforward_case(rng: random.Random, size: int, fiber: int) -> CaseResult:
    B = gen.random_rich_category(rng, size)
    u = gen.random_representable(rng, B, fiber)
    g = gen.random_over(rng, u.source, max(1, fiber - 1))
    wmap = gen.random_over(rng, u.target, max(1, fiber - 1))
    r = dm.pushforward_ump(u, g, wmap)
    P1, _ = dm.pushforward(u, g)
    P2, _ = dm.pushforward_via_totals(u, g)
    same = all(sorted(P1.fiber(b), key=repr) == sorted(P2.fiber(b), key=repr) for b in B.objects)
    same = same and all(P1.restrictions[h] == P2.restrictions[h] for h in B.arrows)
    tag = "empty-hom" if r.lhs == 0 else "inhabited-hom"
    detail = f"base {B.name}: |lhs|={r.lhs} |rhs|={r.rhs} totals-agree={same}"
    return CaseResult(r.bijective and same, detail, (tag,))


def _bc_case(rng: random.Random, size: int, fiber: int) -> CaseResult:
    B = gen.random_rich_category(rng, size)
    sq = gen.random_square(rng, B, fiber)
    if not sq.commutes():
        return CaseResult(False, "generator produced a non-commuting square")
    pb, bc, agree = dm.pullback_iff_bc(sq)
    return CaseResult(agree, f"base {B.name}: pullback={pb} bc={bc}", ("pullback" if pb else "not-pullback",))


def random_natural_model(rng: random.Random, size: int, fiber: int) -> mdl.Model:
    """A natural model over a random category with a terminal object."""
    for _ in range(20):
        B = gen.random_category(rng, size)
        if terminal_objects(B):
            break
    else:
        B = gen.random_cartesian_category(rng, size)
    p = gen.random_representable(rng, B, fiber)
    return mdl.natural_model(B, p.target, p.source, p, name=f"nm({B.name})")


def _model_laws_case(rng: random.Random, size: int, fiber: int) -> CaseResult:
    M = random_natural_model(rng, size, fiber)
    mdl.validate_model(M)
    mdl.validate_morphism(mdl.identity_morphism(M))
    t = M.terminal()
    closure = mdl.contextual_closure(M)
    lang = mdl.internal_language(M)
    ok = t in closure and all(lang.sets[A] == tuple(M.fibrations[A].fiber(t)) for A in M.fibrations)
    rep = mdl.natural_model_check(M.base, M.fibrations["Type"], M.fibrations["el"], M.maps["p"])
    w = M.witness("p")
    ok = ok and all(rep.extensions[(b, y)][0] == w.extension(b, y) for (b, y) in rep.extensions)
    return CaseResult(ok, f"{M.name}: {len(closure)}/{len(M.base.objects)} contextual")


def _democratic_case(rng: random.Random, size: int, fiber: int) -> CaseResult:
    M = random_natural_model(rng, size, fiber)
    mdl.validate_model(M)
    H, inc = mdl.heart(M)
    H2, _ = mdl.heart(H)
    dem = mdl.is_democratic(M)
    ok = mdl.is_democratic(H) and len(H2.base.objects) == len(H.base.objects)
    ok = ok and dem == (len(H.base.objects) == len(M.base.objects))
    mdl.validate_morphism(inc)
    return CaseResult(ok, f"{M.name}: democratic={dem} heart={len(H.base.objects)}", ("democratic" if dem else "not-democratic",))


_PAIRS: list = []


def _theory_model_pairs() -> list:
    if not _PAIRS:
        for stem, T in bundled_theories().items():
            iM = mdl.bi_initial_model(T)
            for M in bundled_models(stem):
                _PAIRS.append((stem, iM, mdl.validate_model(M)))
    return _PAIRS


def _contractibility_case(rng: random.Random, size: int, fiber: int) -> CaseResult:
    stem, iM, M = rng.choice(_theory_model_pairs())
    rep = mdl.hom_category(iM, M)
    return CaseResult(rep.contractible, f"{stem}: iM -> {M.name}: {rep.morphisms} morphisms")


def _lf_case(rng: random.Random, size: int, fiber: int) -> CaseResult:
    if rng.random() < 0.5:
        inst = lf_props.substitution_instance(rng)
        out = lf_props.check_substitution(inst)
        return CaseResult(out.ok, f"substitution: {out.detail}", ("substitution",))
    winst = lf_props.weakening_instance(rng)
    out = lf_props.check_weakening(winst)
    return CaseResult(out.ok, f"weakening: {out.detail}", ("weakening",))


SUITES: dict[str, Callable] = {
    "dfib-laws": _yoneda_case,
    "pushforward-ump": _pushforward_case,
    "bc-pullback": _bc_case,
    "model-laws": _model_laws_case,
    "democratic": _democratic_case,
    "contractibility": _contractibility_case,
    "lf-substitution": _lf_case,
}


def run_suite(name: str, seed: int = 0, size: int = 3, cases: int = 100, fiber: int = 3) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if size < 1 or cases < 0 or fiber < 0:
        raise ValueError("size must be positive and counts non-negative")
    rng = random.Random(seed)
    case = SUITES[name]
    res = SuiteResult(name, seed, size, cases)
    for i in range(cases):
        try:
            r = case(rng, size, fiber)
        except Overflow:
            raise
        except Exception as exc:  # a law violated by raising is a counterexample, not a crash
            r = CaseResult(False, f"{type(exc).__name__}: {exc}")
        if r.ok:
            res.passed += 1
        elif len(res.counterexamples) < MAX_COUNTEREXAMPLES:
            res.counterexamples.append(f"case {i}: {r.detail}")
        for t in r.tags:
            res.tallies[t] = res.tallies.get(t, 0) + 1
    return res
