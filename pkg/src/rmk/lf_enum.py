"""Bounded enumeration of beta-normal pre-terms and pre-types over a signature.

Raw candidates are generated by size without redexes and then elaborated by
the checker; candidates that fail to check are dropped.  Abstractions are
generated without a domain annotation and pick it up from the expected
product type during checking.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterator

from .lf_checker import BOX, Checker, CheckedSignature, FuelExhausted, LFError
from .lf_syntax import Abs, App, Eq, Pi, PreContext, PreTerm, Refl, SymbolApp, Var, size
from .lf_syntax import Box, Rep


def _compositions(n: int, k: int) -> Iterator[tuple]:
    """Ordered ways to write ``n`` as a sum of ``k`` positive parts."""
    if k == 0:
        if n == 0:
            yield ()
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


class RawEnumerator:
    """Raw normal-form candidates of an exact raw size over a scope of variable names."""

    def __init__(self, sig: CheckedSignature, allow_abs: bool = True, allow_refl: bool = True):
        self.sig = sig
        self.term_syms = [(e.name, len(e.context)) for e in sig.term_symbols() if not isinstance(e.sort, Eq)]
        self.type_syms = [(e.name, len(e.context)) for e in sig.type_symbols()]
        self.allow_abs = allow_abs
        self.allow_refl = allow_refl
        self.terms = lru_cache(maxsize=None)(self._terms)
        self.neutrals = lru_cache(maxsize=None)(self._neutrals)
        self.types = lru_cache(maxsize=None)(self._types)

    def _neutrals(self, scope: tuple, n: int) -> tuple:
        out: list = []
        if n == 1:
            out.extend(Var(x) for x in scope)
            out.extend(SymbolApp(c, ()) for c, k in self.term_syms if k == 0)
            return tuple(out)
        for c, k in self.term_syms:
            if k == 0:
                continue
            for parts in _compositions(n - 1, k):
                for args in _product([self.terms(scope, p) for p in parts]):
                    out.append(SymbolApp(c, args))
        for nf in range(1, n - 1):
            for f in self.neutrals(scope, nf):
                for a in self.terms(scope, n - 1 - nf):
                    out.append(App(None, None, None, f, a))
        return tuple(out)

    def _terms(self, scope: tuple, n: int) -> tuple:
        out = list(self.neutrals(scope, n))
        if n >= 2 and self.allow_abs:
            y = f"w{len(scope) + 1}"
            out.extend(Abs(None, y, b) for b in self.terms(scope + (y,), n - 1))
        if n >= 2 and self.allow_refl:
            out.extend(Refl(a) for a in self.terms(scope, n - 1))
        return tuple(out)

    def _types(self, scope: tuple, n: int) -> tuple:
        out: list = []
        for c, k in self.type_syms:
            if k == 0:
                if n == 1:
                    out.append(SymbolApp(c, ()))
                continue
            for parts in _compositions(n - 1, k):
                for args in _product([self.terms(scope, p) for p in parts]):
                    out.append(SymbolApp(c, args))
        y = f"w{len(scope) + 1}"
        for nd in range(1, n - 1):
            for d in self.types(scope, nd):
                for c in self.types(scope + (y,), n - 1 - nd):
                    out.append(Pi(d, y, c))
        for parts in _compositions(n - 1, 3):
            for T in self.types(scope, parts[0]):
                for a in self.terms(scope, parts[1]):
                    for b in self.terms(scope, parts[2]):
                        out.append(Eq(T, a, b))
        return tuple(out)


def _product(lists: list) -> Iterator[tuple]:
    if not lists:
        yield ()
        return
    for x in lists[0]:
        for rest in _product(lists[1:]):
            yield (x,) + rest


def checked_types(enum: RawEnumerator, ctx: PreContext, max_size: int, sort=BOX) -> list[PreTerm]:
    """Elaborated types over ``ctx`` of size at most ``max_size``, deduplicated up to alpha."""
    from .lf_syntax import debruijn

    ck = Checker(enum.sig)
    seen = set()
    out = []
    scope = tuple(ctx.names())
    for n in range(1, max_size + 1):
        for raw in enum.types(scope, n):
            try:
                ck.steps = 0
                T = ck.check_type_formation(ctx, raw, sort)
            except FuelExhausted:
                continue
            except LFError:
                continue
            if size(T) > max_size:
                continue
            k = debruijn(T)
            if k not in seen:
                seen.add(k)
                out.append(T)
    return out


def checked_terms(enum: RawEnumerator, ctx: PreContext, T: PreTerm, max_size: int) -> list[PreTerm]:
    """Elaborated terms of type ``T`` over ``ctx`` of size at most ``max_size``."""
    from .lf_syntax import debruijn

    ck = Checker(enum.sig)
    seen = set()
    out = []
    scope = tuple(ctx.names())
    for n in range(1, max_size + 1):
        for raw in enum.terms(scope, n):
            try:
                ck.steps = 0
                t = ck.check(ctx, raw, T)
            except FuelExhausted:
                continue
            except LFError:
                continue
            if size(t) > max_size:
                continue
            k = debruijn(t)
            if k not in seen:
                seen.add(k)
                out.append(t)
    return out


def is_sort(t) -> bool:
    return isinstance(t, (Box, Rep))
