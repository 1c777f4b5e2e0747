"""The nine acceptance criteria, each timed, each reported as one PASS/FAIL line."""
from __future__ import annotations

import random
import time
from contextlib import contextmanager

import pytest

from rmk import gen
from rmk import model as mdl
from rmk.cli import run
from rmk.files import DATA, bundled_models, bundled_theories, load_model
from rmk.lf_props import run_lf_properties
from rmk.lf_syntax import Var, parse_context, pretty_context
from rmk.props import run_suite
from rmk.syncat import Bounds, build_syncat, check_generator_pullback, generating_representables

from .conftest import ACCEPTANCE_LINES, load_sig


@contextmanager
def criterion(number: int, title: str, budget: float | None = None):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        within = budget is None or elapsed < budget
        mark = "PASS" if ok and within else "FAIL"
        limit = f" (budget {budget:.0f}s)" if budget is not None else ""
        line = f"[{mark}] criterion {number}: {title} in {elapsed:.2f}s{limit}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert within, f"criterion {number} took {elapsed:.2f}s, budget {budget}s"


def test_criterion_1_corpus_and_mutants():
    with criterion(1, "8 corpus signatures accepted, 20 mutants rejected with a cited rule", 10):
        corpus = sorted((DATA / "corpus").glob("*.lfsig"))
        mutants = sorted((DATA / "corpus" / "mutants").glob("*.lfsig"))
        assert len(corpus) == 8 and len(mutants) == 20
        for p in corpus:
            rep = run(["check-sig", str(p)])
            assert rep.exit_code == 0, (p.name, rep.verdicts)
        for p in mutants:
            rep = run(["check-sig", str(p)])
            facts = dict(rep.facts)
            assert rep.exit_code == 1, p.name
            assert facts.get("rule", "?") != "?", p.name
            assert facts.get("failing entry", "?") != "?", p.name


def test_criterion_2_yoneda():
    with criterion(2, "Yoneda bijection on 500 seeded instances", 60):
        rng = random.Random(0)
        assert all(len(gen.random_category(rng, 4).objects) <= 4 for _ in range(50))
        res = run_suite("dfib-laws", seed=0, size=4, cases=500, fiber=3)
        assert res.passed == 500, res.counterexamples


def test_criterion_3_pushforward():
    with criterion(3, "pushforward hom-set bijection on 200 seeded instances", 120):
        res = run_suite("pushforward-ump", seed=0, size=4, cases=200, fiber=3)
        assert res.passed == 200, res.counterexamples


def test_criterion_4_bc_pullback():
    with criterion(4, "pullback and Beck-Chevalley checkers agree on 200 squares", 60):
        res = run_suite("bc-pullback", seed=0, size=4, cases=200, fiber=3)
        assert res.passed == 200, res.counterexamples
        assert res.tallies.get("pullback", 0) and res.tallies.get("not-pullback", 0)


def test_criterion_5_subsingleton():
    with criterion(5, "subsingleton model: languages of sizes 2 and 1, democratic"):
        M = mdl.validate_model(load_model(DATA / "subsingleton.model"))
        lang = mdl.internal_language(M)
        assert len(lang.sets["Type"]) == 2
        assert len(lang.sets["el"]) == 1
        assert sorted(mdl.contextual_closure(M)) == sorted(M.base.objects)
        assert mdl.is_democratic(M)


@pytest.mark.parametrize("stem", ["t1", "t2", "t3"])
def test_criterion_6_bi_initiality(stem):
    with criterion(6, f"bi-initial model of {stem}: contractible homs, heart of the Yoneda model", 120):
        T = bundled_theories()[stem]
        iM = mdl.validate_model(mdl.bi_initial_model(T))
        models = bundled_models(stem)
        assert models
        for M in models:
            assert mdl.hom_category_contractible(iM, mdl.validate_model(M)), M.name
        H, _ = mdl.heart(mdl.yoneda_model(T))
        assert mdl.models_isomorphic(iM, H) is not None


@pytest.mark.parametrize("stem", ["t1", "t2", "t3"])
def test_criterion_7_internal_language(stem):
    with criterion(7, f"internal language of the bi-initial model of {stem} is the global elements"):
        T = bundled_theories()[stem]
        C = T.cat
        lang = mdl.internal_language(mdl.bi_initial_model(T))
        for A in C.objects:
            assert sorted(lang.sets[A]) == sorted(C.hom(T.terminal, A)), A


def test_criterion_8_syntactic_category():
    with criterion(8, "syntactic category of basic dependent types at depth 2, size 4", 30):
        sig = load_sig("dtt")
        sc = build_syncat(sig, Bounds(2, 4))
        assert [pretty_context(c) for c in sc.contexts] == [
            "()",
            "(v1 : Type)",
            "(v1 : Type, v2 : Type)",
            "(v1 : Type, v2 : el(v1))",
            "(v1 : Type, v2 : el(v1) -> Type)",
            "(v1 : Type, v2 : v1 = v1 in Type)",
        ]
        counts = {k: len(v) for k, v in sc.homs.items() if v}
        assert counts[(1, 1)] == 1 and counts[(2, 2)] == 4 and counts[(2, 1)] == 2 and counts[(4, 4)] == 2
        assert sum(counts.values()) == 36
        assert [(g.source, g.target) for g in generating_representables(sc)] == [(3, 1)]
        # the pullback of the projection along (A, B) |-> B lives one context deeper
        big = build_syncat(sig, Bounds(3, 3))
        [g] = [g for g in generating_representables(big) if len(big.contexts[g.source]) == 2]
        d = big.index(parse_context("(A : Type, B : Type)", symbols=list(sig.entries)))
        sigma = big.class_of(d, g.target, (Var("v2"),))
        assert check_generator_pullback(big, big.to_fincat(), g, d, sigma) == "verified"


def test_criterion_9_lf_metatheory():
    with criterion(9, "substitution and weakening on 300 seeded corpus instances each"):
        out = run_lf_properties(seed=0, cases=300)
        bad = [o.detail for k in ("substitution", "weakening") for o in out[k] if not o.ok]
        assert len(out["substitution"]) == len(out["weakening"]) == 300
        assert bad == []
