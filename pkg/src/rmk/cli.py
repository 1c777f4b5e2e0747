"""Command-line front end: ``rmk check-sig | check | syncat | lang | props``.

Exit codes: 0 success, 1 a verdict failed, 2 unreadable or malformed input,
3 a bound was exceeded.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .dfib import DFibError
from .fincat import CategoryError, Overflow
from .files import InputError, load_dfib, load_fincat, load_model, load_rmcat, load_theory, locate
from .lf_checker import FuelExhausted, LFError, check_signature
from .lf_syntax import Eq, LFSyntaxError, parse_signature
from .model import ModelError
from .report import EXIT_INPUT, EXIT_OVERFLOW, RunReport

SUITE_NAMES = ("dfib-laws", "pushforward-ump", "bc-pullback", "model-laws", "democratic", "contractibility", "lf-substitution")


def parse_bounds(spec: str | None) -> dict:
    """``"depth=2,size=4"`` to ``{"depth": 2, "size": 4}``."""
    out: dict = {}
    if not spec:
        return out
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ValueError(f"bound {item!r} is not of the form key=value")
        k, v = (s.strip() for s in item.split("=", 1))
        n = int(v)
        if n < 1:
            raise ValueError(f"bound {k} must be positive")
        out[k] = n
    return out


# -- commands -------------------------------------------------------------------------

def cmd_check_sig(args, rep: RunReport) -> None:
    path = locate(args.path)
    rep.inputs.append(args.path)
    try:
        pre = parse_signature(path.read_text(encoding="utf-8"))
    except LFSyntaxError as exc:
        rep.fail(EXIT_INPUT, f"syntax error at {exc.line}:{exc.column}: {exc.msg}")
        return
    rep.fact("entries", len(pre.entries))
    try:
        sig = check_signature(pre)
    except FuelExhausted as exc:
        rep.add("signature accepted", False, str(exc))
        rep.caveat("fuel exhausted: raise RMK_MAX_STEPS to retry")
        return
    except LFError as exc:
        rep.fact("failing entry", exc.entry or "?")
        rep.fact("rule", exc.rule or "?")
        rep.add("signature accepted", False, str(exc))
        return
    rep.fact("type symbols", ", ".join(e.name for e in sig.type_symbols()) or "-")
    rep.fact("term symbols", len(sig.term_symbols()))
    rep.fact("equations", sum(1 for e in sig.term_symbols() if isinstance(e.sort, Eq)))
    rep.add("signature accepted", True)


def cmd_check(args, rep: RunReport) -> None:
    from .model import contextual_closure, is_democratic, validate_model
    from .rmcat import RMCatReport, validate_rmcat, validate_theory

    for raw in args.paths:
        rep.inputs.append(raw)
        path = locate(raw)
        kind = path.suffix.lstrip(".")
        try:
            if kind == "fincat":
                C = load_fincat(path).validate()
                rep.add(f"{raw}: category", True, f"{len(C.objects)} objects, {len(C.arrows)} arrows")
            elif kind == "dfib":
                D = load_dfib(path).validate()
                rep.add(f"{raw}: fibration", True, f"{D.size()} elements")
            elif kind == "rmcat":
                r = RMCatReport()
                R = validate_rmcat(load_rmcat(path), r)
                rep.add(
                    f"{raw}: representable map category",
                    True,
                    f"{len(R.representables)} representable arrows, {r.pushforwards_checked} pushforwards checked",
                )
            elif kind == "theory":
                Th = validate_theory(load_theory(path))
                rep.add(f"{raw}: theory", True, f"{sum(len(s) for s in Th.sets.values())} elements")
            elif kind == "model":
                M = validate_model(load_model(path))
                closure = contextual_closure(M)
                detail = f"{len(M.base.objects)} base objects, {len(closure)} contextual, democratic={is_democratic(M)}"
                rep.add(f"{raw}: model", True, detail)
            elif kind == "lfsig":
                sig = check_signature(parse_signature(path.read_text(encoding="utf-8")))
                rep.add(f"{raw}: signature", True, f"{len(sig.entries)} entries")
            else:
                rep.fail(EXIT_INPUT, f"unknown file kind {path.suffix!r} for {raw}")
                return
        except Overflow:
            raise
        except LFSyntaxError as exc:
            rep.fail(EXIT_INPUT, f"{raw}: syntax error at {exc.line}:{exc.column}: {exc.msg}")
            return
        except (CategoryError, DFibError, ModelError, LFError) as exc:
            rep.add(f"{raw}: {kind}", False, f"{type(exc).__name__}: {exc}")


def cmd_syncat(args, rep: RunReport) -> None:
    from .interpret import check_embedding
    from .model import validate_model
    from .syncat import Bounds, build_syncat, check_representable_pullbacks, check_terminal, fincat_dump, generating_representables

    extra = parse_bounds(args.bounds)
    bounds = Bounds(args.depth, args.size, extra.get("max_count", Bounds().max_count))
    rep.bounds = {"depth": bounds.depth, "size": bounds.size, "max_count": bounds.max_count}
    rep.inputs.append(args.sig)
    path = locate(args.sig)
    try:
        sig = check_signature(parse_signature(path.read_text(encoding="utf-8")))
    except LFSyntaxError as exc:
        rep.fail(EXIT_INPUT, f"syntax error at {exc.line}:{exc.column}: {exc.msg}")
        return
    except LFError as exc:
        rep.fail(EXIT_INPUT, f"signature rejected: {exc}")
        return
    sc = build_syncat(sig, bounds)
    rep.fact("contexts", len(sc.contexts))
    rep.fact("hom classes", sum(len(v) for v in sc.homs.values()))
    rep.fact("classes added by composition closure", sc.added_by_closure)
    for line in sc.describe()[1:]:
        k, v = line.split(": ", 1)
        rep.fact(k, v)
    gens = generating_representables(sc)
    for g in gens:
        rep.fact("generator", f"context {g.source} -> context {g.target}")
    rep.add("empty context is terminal", check_terminal(sc))
    pb = check_representable_pullbacks(sc)
    rep.add(
        "representable pullbacks",
        pb.ok,
        f"{pb.verified} verified, {len(pb.bound_limited)} bound-limited, {len(pb.failures)} failed of {pb.checked}",
    )
    if pb.bound_limited:
        rep.caveat(f"bound-limited: {len(pb.bound_limited)} pullback contexts lie outside the bounds")
    for c in sc.caveats:
        rep.caveat(c)
    if sc.partial:
        rep.caveat("partial: enumeration stopped at max_count")
        rep.fail(EXIT_OVERFLOW, f"bound exceeded: more than {bounds.max_count} contexts or morphisms; results above are partial")
    if args.model:
        rep.inputs.append(args.model)
        M = validate_model(load_model(args.model))
        emb = check_embedding(sc, M)
        detail = f"{emb.contexts} contexts, {emb.arrows} arrows, {emb.compositions} composites"
        rep.add(f"functorial interpretation in {M.name or args.model}", emb.ok, detail)
        for f in emb.failures[:5]:
            rep.counterexamples.append(str(f))
        for u in emb.unsupported[:5]:
            rep.caveat(f"not interpreted: {u}")
    if args.dump:
        Path(args.dump).write_text(fincat_dump(sc), encoding="utf-8")
        rep.fact("dump", args.dump)
    if args.plot:
        from .plots import plot_syncat

        rep.figures.append(plot_syncat(sc, Path(args.plot), path.stem))


def cmd_lang(args, rep: RunReport) -> None:
    from .model import contextual_closure, internal_language, is_democratic, validate_model

    rep.inputs.append(args.model)
    M = validate_model(load_model(args.model))
    lang = internal_language(M)
    for A, xs in lang.sets.items():
        rep.fact(f"Θ({A})", "{" + ", ".join(map(str, xs)) + "}")
        rep.fact(f"|Θ({A})|", len(xs))
    closure = contextual_closure(M)
    rep.fact("contextual objects", ", ".join(map(str, closure)))
    rep.fact("certificates", " ".join(f"{k}={v}" for k, v in sorted((M.certificates or {}).items())) or "-")
    rep.add("model validates", True)
    rep.add("democratic", is_democratic(M), f"{len(closure)}/{len(M.base.objects)} contextual")
    if args.plot:
        from .plots import plot_fibers

        rep.figures.append(plot_fibers(M, Path(args.plot), Path(args.model).stem))


def cmd_props(args, rep: RunReport) -> None:
    from .props import run_suite

    extra = parse_bounds(args.bounds)
    fiber = extra.get("fiber", 3)
    rep.seed = args.seed
    rep.bounds = {"size": args.size, "cases": args.cases, "fiber": fiber}
    names = SUITE_NAMES if args.suite == "all" else (args.suite,)
    for name in names:
        res = run_suite(name, args.seed, args.size, args.cases, fiber)
        tallies = " ".join(f"{k}={v}" for k, v in sorted(res.tallies.items()))
        rep.add(f"{name} {res.passed}/{res.cases} agree", res.ok, tallies)
        rep.counterexamples.extend(f"{name}: {c}" for c in res.counterexamples)
        if args.plot:
            from .plots import plot_suite

            rep.figures.append(plot_suite(res, Path(args.plot)))


# -- entry point -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json-like"), default="text", help="report format")
    common.add_argument("--plot", metavar="DIR", help="also write figures into DIR")
    common.add_argument("--bounds", metavar="SPEC", help="extra bounds, e.g. max_count=5000,fiber=3")

    p = argparse.ArgumentParser(prog="rmk", description="Representable map categories and logical framework checks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-sig", parents=[common], help="check a .lfsig signature")
    s.add_argument("path")
    s.set_defaults(run=cmd_check_sig)

    s = sub.add_parser("check", parents=[common], help="validate .fincat/.dfib/.rmcat/.theory/.model/.lfsig files")
    s.add_argument("paths", nargs="+")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("syncat", parents=[common], help="bounded syntactic category of a signature")
    s.add_argument("sig")
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--size", type=int, default=4)
    s.add_argument("--dump", metavar="FILE", help="write the bounded category as a .fincat file")
    s.add_argument("--model", metavar="MODEL", help="also check the interpretation in a natural model")
    s.set_defaults(run=cmd_syncat)

    s = sub.add_parser("lang", parents=[common], help="internal language of a model")
    s.add_argument("model")
    s.set_defaults(run=cmd_lang)

    s = sub.add_parser("props", parents=[common], help="run a seeded property suite")
    s.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--size", type=int, default=3)
    s.add_argument("--cases", type=int, default=100)
    s.set_defaults(run=cmd_props)
    return p


def run(argv: list[str] | None = None) -> RunReport:
    args = build_parser().parse_args(argv)
    rep = RunReport(args.command)
    start = time.perf_counter()
    try:
        args.run(args, rep)
    except Overflow as exc:
        rep.fail(EXIT_OVERFLOW, f"bound exceeded: {exc}")
    except (InputError, OSError, ValueError) as exc:
        rep.fail(EXIT_INPUT, str(exc))
    except (CategoryError, DFibError, ModelError, LFError) as exc:
        rep.add(f"{args.command} input is valid", False, f"{type(exc).__name__}: {exc}")
    rep.timing = time.perf_counter() - start
    rep.format = args.format
    return rep


def main(argv: list[str] | None = None) -> int:
    rep = run(argv)
    sys.stdout.write(rep.render(rep.format))
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
