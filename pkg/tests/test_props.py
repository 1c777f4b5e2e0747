from __future__ import annotations

import random
from dataclasses import replace

import pytest

from rmk import lf_props, props
from rmk.lf_checker import CtxOk
from rmk.lf_syntax import PreContext, PreSignature, SymbolApp
from rmk.props import SUITES, CaseResult, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes_on_a_small_run(name):
    res = run_suite(name, seed=1, size=3, cases=15)
    assert res.ok, res.counterexamples
    assert res.passed == 15


@pytest.mark.parametrize("name", ["dfib-laws", "pushforward-ump", "bc-pullback", "democratic"])
def test_suite_is_deterministic_for_a_seed(name):
    a = run_suite(name, seed=7, size=3, cases=20)
    b = run_suite(name, seed=7, size=3, cases=20)
    assert (a.passed, a.tallies, a.counterexamples) == (b.passed, b.tallies, b.counterexamples)


def test_bc_suite_sees_both_kinds_of_square():
    res = run_suite("bc-pullback", seed=0, size=4, cases=100)
    assert res.tallies.get("pullback", 0) > 0 and res.tallies.get("not-pullback", 0) > 0


def test_yoneda_suite_sees_empty_and_inhabited_fibers():
    res = run_suite("dfib-laws", seed=0, size=4, cases=100)
    assert res.tallies.get("empty-fiber", 0) > 0 and res.tallies.get("inhabited-fiber", 0) > 0


def test_unknown_suite_and_bad_sizes_are_rejected():
    with pytest.raises(KeyError):
        run_suite("no-such-suite")
    with pytest.raises(ValueError):
        run_suite("dfib-laws", size=0)
    with pytest.raises(ValueError):
        run_suite("dfib-laws", cases=-1)


def test_failures_are_collected_as_counterexamples(monkeypatch):
    calls = iter(range(100))

    def flaky(rng, size, fiber):
        n = next(calls)
        if n % 3 == 0:
            raise RuntimeError(f"boom {n}")
        return CaseResult(n % 3 == 1, f"case {n}")

    monkeypatch.setitem(SUITES, "dfib-laws", flaky)
    res = run_suite("dfib-laws", cases=30)
    assert res.passed == 10 and not res.ok
    assert len(res.counterexamples) == props.MAX_COUNTEREXAMPLES
    assert "RuntimeError" in res.counterexamples[0]


# -- logical framework properties --------------------------------------------------------

def test_lf_properties_hold_on_a_small_run():
    out = lf_props.run_lf_properties(seed=3, cases=25)
    assert all(o.ok for o in out["substitution"]), [o.detail for o in out["substitution"] if not o.ok]
    assert all(o.ok for o in out["weakening"]), [o.detail for o in out["weakening"] if not o.ok]


def test_lf_properties_are_deterministic():
    a = lf_props.run_lf_properties(seed=5, cases=10)
    b = lf_props.run_lf_properties(seed=5, cases=10)
    assert a == b


def test_corpus_instances_draw_from_every_signature():
    rng = random.Random(0)
    seen = {lf_props.substitution_instance(rng).signature for _ in range(80)}
    assert seen == set(lf_props.corpus())


def test_ill_typed_morphism_is_a_substitution_failure():
    rng = random.Random(11)
    for _ in range(50):
        inst = lf_props.substitution_instance(rng)
        if len(inst.judgment.context):
            break
    bad = replace(inst, morphism=tuple(SymbolApp("no_such_symbol") for _ in inst.morphism))
    assert not lf_props.check_substitution(bad).ok


def test_clashing_extension_is_a_weakening_failure():
    rng = random.Random(2)
    inst = lf_props.weakening_instance(rng)
    bad = replace(inst, extra=inst.base, judgment=CtxOk(PreContext(())))
    assert not lf_props.check_weakening(bad).ok


def test_weakening_keeps_judgment_over_a_renamed_copy():
    pre, _ = lf_props.corpus()["dtt"]
    copy = lf_props._rename(pre, "z_")
    assert [e.name for e in copy.entries] == ["z_" + e.name for e in pre.entries]
    J = CtxOk(PreContext((("A", SymbolApp("Type")),)))
    inst = lf_props.WeakeningInstance(pre, copy, PreSignature(()), J, "dtt + copy")
    assert lf_props.check_weakening(inst).ok
