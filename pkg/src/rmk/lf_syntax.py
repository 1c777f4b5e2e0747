"""Pre-terms of the logical framework: AST, parser, printer, alpha-equivalence, substitution.

Surface grammar (``->`` binds loosest, then ``=``, then application)::

    term   ::= '(' x ':' T (',' y ':' U)* ')' '->' term      dependent product
             | eq ('->' term)?                               non-dependent product
             | '\\' binders '.' term                          abstraction
    eq     ::= app ('=' app ('in' app)?)?
    app    ::= atom atom*                                    application
    atom   ::= 'Box' | 'Rep' | 'refl' atom | ident | ident '(' term, ... ')'
             | '@app' '(' A ',' x '.' B ',' b ',' a ')' | '(' term ')'
    binders::= ('(' x ':' T ')')+ | x+

``f(a1, ..., an)`` is a symbol application unless ``f`` is a bound
variable, in which case it is the iterated application ``f a1 ... an``.
Unbound bare identifiers are resolved against ``symbols`` when given;
without a symbol table, a name starting with an uppercase letter is read
as a nullary symbol and any other name as a variable.  ``⇒``,
``→`` and ``λ`` are accepted for ``=>``, ``->`` and ``\\``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Union


class LFSyntaxError(SyntaxError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


# -- AST ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    def __str__(self) -> str:
        return "Box"


@dataclass(frozen=True)
class Rep:
    def __str__(self) -> str:
        return "Rep"


@dataclass(frozen=True)
class SymbolApp:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Pi:
    dom: "PreTerm"
    var: str
    cod: "PreTerm"


@dataclass(frozen=True)
class Abs:
    dom: "PreTerm | None"
    var: str
    body: "PreTerm"


@dataclass(frozen=True)
class App:
    """``app(dom, var.cod, fun, arg)``; the annotation is ``None`` before elaboration."""

    dom: "PreTerm | None"
    var: "str | None"
    cod: "PreTerm | None"
    fun: "PreTerm"
    arg: "PreTerm"


@dataclass(frozen=True)
class Eq:
    type: "PreTerm | None"
    left: "PreTerm"
    right: "PreTerm"


@dataclass(frozen=True)
class Refl:
    subject: "PreTerm"


PreTerm = Union[Box, Rep, SymbolApp, Var, Pi, Abs, App, Eq, Refl]
BOX = Box()
REP = Rep()


@dataclass(frozen=True)
class PreContext:
    entries: tuple = ()  # ((name, PreTerm), ...)

    def names(self) -> list:
        return [x for x, _ in self.entries]

    def extend(self, name: str, ty: PreTerm) -> "PreContext":
        return PreContext(self.entries + ((name, ty),))

    def lookup(self, name: str):
        for x, t in reversed(self.entries):
            if x == name:
                return t
        return None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class SignatureEntry:
    name: str
    context: PreContext
    sort: PreTerm  # BOX, REP or a type
    line: int = 0


@dataclass(frozen=True)
class PreSignature:
    entries: tuple = ()

    def names(self) -> list:
        return [e.name for e in self.entries]

    def __add__(self, other: "PreSignature") -> "PreSignature":
        return PreSignature(self.entries + other.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def arrow(dom: PreTerm, cod: PreTerm) -> Pi:
    """Non-dependent product with a binder that is not free in ``cod``."""
    return Pi(dom, fresh("_", free_vars(cod)), cod)


# -- free variables, renaming, substitution ---------------------------------------

def free_vars(t: PreTerm) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, (Box, Rep)):
        return frozenset()
    if isinstance(t, SymbolApp):
        return frozenset().union(*(free_vars(a) for a in t.args))
    if isinstance(t, Pi):
        return free_vars(t.dom) | (free_vars(t.cod) - {t.var})
    if isinstance(t, Abs):
        d = free_vars(t.dom) if t.dom is not None else frozenset()
        return d | (free_vars(t.body) - {t.var})
    if isinstance(t, App):
        out = free_vars(t.fun) | free_vars(t.arg)
        if t.dom is not None:
            out |= free_vars(t.dom)
        if t.cod is not None:
            out |= free_vars(t.cod) - {t.var}
        return out
    if isinstance(t, Eq):
        out = free_vars(t.left) | free_vars(t.right)
        return out | free_vars(t.type) if t.type is not None else out
    if isinstance(t, Refl):
        return free_vars(t.subject)
    raise TypeError(f"not a pre-term: {t!r}")


def fresh(base: str, avoid: Iterable[str]) -> str:
    """``base`` with primes appended until it avoids ``avoid``."""
    avoid = set(avoid)
    name = base
    while name in avoid:
        name += "'"
    return name


def substitute(a: PreTerm, replacement: PreTerm, var: str) -> PreTerm:
    """Capture-avoiding ``a[replacement/var]``."""
    return substitute_many(a, {var: replacement})


def substitute_many(a: PreTerm, mapping: dict) -> PreTerm:
    """Simultaneous capture-avoiding substitution."""
    if not mapping:
        return a
    return _subst(a, dict(mapping))


def _binder(var: str, body: PreTerm, mapping: dict) -> tuple[str, dict]:
    inner = {k: v for k, v in mapping.items() if k != var}
    live = {k: v for k, v in inner.items() if k in free_vars(body)}
    clash = set().union(*(free_vars(v) for v in live.values())) if live else set()
    if var in clash:
        new = fresh(var, clash | free_vars(body) | set(live))
        inner = dict(live)
        inner[var] = Var(new)
        return new, inner
    return var, live


def _subst(t: PreTerm, m: dict) -> PreTerm:
    if isinstance(t, Var):
        return m.get(t.name, t)
    if isinstance(t, (Box, Rep)):
        return t
    if isinstance(t, SymbolApp):
        return SymbolApp(t.name, tuple(_subst(a, m) for a in t.args))
    if isinstance(t, Pi):
        x, inner = _binder(t.var, t.cod, m)
        return Pi(_subst(t.dom, m), x, _subst(t.cod, inner))
    if isinstance(t, Abs):
        x, inner = _binder(t.var, t.body, m)
        dom = _subst(t.dom, m) if t.dom is not None else None
        return Abs(dom, x, _subst(t.body, inner))
    if isinstance(t, App):
        dom = _subst(t.dom, m) if t.dom is not None else None
        if t.cod is not None:
            x, inner = _binder(t.var, t.cod, m)
            cod = _subst(t.cod, inner)
        else:
            x, cod = t.var, None
        return App(dom, x, cod, _subst(t.fun, m), _subst(t.arg, m))
    if isinstance(t, Eq):
        ty = _subst(t.type, m) if t.type is not None else None
        return Eq(ty, _subst(t.left, m), _subst(t.right, m))
    if isinstance(t, Refl):
        return Refl(_subst(t.subject, m))
    raise TypeError(f"not a pre-term: {t!r}")


# -- nameless keys and alpha-equivalence -------------------------------------------

def debruijn(t: PreTerm, bound: tuple = ()) -> tuple:
    """A hashable nameless form; equal keys iff alpha-equivalent."""
    if isinstance(t, Var):
        for i, x in enumerate(reversed(bound)):
            if x == t.name:
                return ("bv", i)
        return ("fv", t.name)
    if isinstance(t, Box):
        return ("box",)
    if isinstance(t, Rep):
        return ("rep",)
    if isinstance(t, SymbolApp):
        return ("sym", t.name, tuple(debruijn(a, bound) for a in t.args))
    if isinstance(t, Pi):
        return ("pi", debruijn(t.dom, bound), debruijn(t.cod, bound + (t.var,)))
    if isinstance(t, Abs):
        d = debruijn(t.dom, bound) if t.dom is not None else None
        return ("abs", d, debruijn(t.body, bound + (t.var,)))
    if isinstance(t, App):
        d = debruijn(t.dom, bound) if t.dom is not None else None
        c = debruijn(t.cod, bound + (t.var,)) if t.cod is not None else None
        return ("app", d, c, debruijn(t.fun, bound), debruijn(t.arg, bound))
    if isinstance(t, Eq):
        ty = debruijn(t.type, bound) if t.type is not None else None
        return ("eq", ty, debruijn(t.left, bound), debruijn(t.right, bound))
    if isinstance(t, Refl):
        return ("refl", debruijn(t.subject, bound))
    raise TypeError(f"not a pre-term: {t!r}")


def alpha_eq(a: PreTerm, b: PreTerm) -> bool:
    return debruijn(a) == debruijn(b)


def size(t: PreTerm) -> int:
    """Node count: variables, sorts and nullary symbols count one."""
    if isinstance(t, (Var, Box, Rep)):
        return 1
    if isinstance(t, SymbolApp):
        return 1 + sum(size(a) for a in t.args)
    if isinstance(t, Pi):
        return 1 + size(t.dom) + size(t.cod)
    if isinstance(t, Abs):
        return 1 + (size(t.dom) if t.dom is not None else 0) + size(t.body)
    if isinstance(t, App):
        return 1 + size(t.fun) + size(t.arg)
    if isinstance(t, Eq):
        return 1 + size(t.left) + size(t.right) + (size(t.type) if t.type is not None else 0)
    if isinstance(t, Refl):
        return 1 + size(t.subject)
    raise TypeError(f"not a pre-term: {t!r}")


def strip_annotations(t: PreTerm) -> PreTerm:
    """Forget elaborated annotations on applications, abstractions and equations."""
    if isinstance(t, (Var, Box, Rep)):
        return t
    if isinstance(t, SymbolApp):
        return SymbolApp(t.name, tuple(strip_annotations(a) for a in t.args))
    if isinstance(t, Pi):
        return Pi(strip_annotations(t.dom), t.var, strip_annotations(t.cod))
    if isinstance(t, Abs):
        return Abs(None, t.var, strip_annotations(t.body))
    if isinstance(t, App):
        return App(None, None, None, strip_annotations(t.fun), strip_annotations(t.arg))
    if isinstance(t, Eq):
        return Eq(None, strip_annotations(t.left), strip_annotations(t.right))
    if isinstance(t, Refl):
        return Refl(strip_annotations(t.subject))
    raise TypeError(f"not a pre-term: {t!r}")


# -- lexer ----------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<darrow>=>|⇒)
  | (?P<arrow>->|→)
  | (?P<lam>\\|λ)
  | (?P<atapp>@app\b)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[()\[\],:.=])
    """,
    re.VERBOSE,
)

KEYWORDS = {"Box", "Rep", "refl", "in"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, line0: int = 1) -> list[Token]:
    out = []
    pos = 0
    line, col = line0, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise LFSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and s in KEYWORDS:
                kind = s
            out.append(Token(kind, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# -- parser ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token], symbols: set | None, scope: Iterable[str] = ()):
        self.toks = tokens
        self.i = 0
        self.symbols = symbols
        self.scope: list[str] = list(scope)

    # token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, kind: str, text: str | None = None, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == kind and (text is None or t.text == text)

    def eat(self, kind: str, text: str | None = None) -> Token:
        t = self.peek()
        if not self.at(kind, text):
            want = text or kind
            raise LFSyntaxError(f"expected {want!r}, found {t.text or 'end of input'!r}", t.line, t.column)
        self.i += 1
        return t

    def error(self, message: str):
        t = self.peek()
        raise LFSyntaxError(message, t.line, t.column)

    # grammar
    def term(self) -> PreTerm:
        if self.at("lam"):
            return self.lam()
        if self.at("punct", "(") and self.at("ident", k=1) and self.at("punct", ":", k=2):
            save = self.i
            binders = self.telescope()
            if self.at("arrow"):
                self.eat("arrow")
                for x, _ in binders:
                    self.scope.append(x)
                cod = self.term()
                for _ in binders:
                    self.scope.pop()
                for x, A in reversed(binders):
                    cod = Pi(A, x, cod)
                return cod
            self.i = save
            self.error("a parenthesised binder must be followed by '->'")
        left = self.eq()
        if self.at("arrow"):
            self.eat("arrow")
            cod = self.term()
            return arrow(left, cod)
        return left

    def telescope(self) -> list[tuple[str, PreTerm]]:
        """``(x : A, y : B, ...)``; later types see earlier names."""
        self.eat("punct", "(")
        binders = []
        if self.at("punct", ")"):
            self.eat("punct", ")")
            return binders
        while True:
            x = self.eat("ident").text
            self.eat("punct", ":")
            A = self.term()
            binders.append((x, A))
            self.scope.append(x)
            if self.at("punct", ","):
                self.eat("punct", ",")
                continue
            break
        for _ in binders:
            self.scope.pop()
        self.eat("punct", ")")
        return binders

    def lam(self) -> PreTerm:
        self.eat("lam")
        binders: list = []
        if self.at("punct", "("):
            while self.at("punct", "("):
                self.eat("punct", "(")
                x = self.eat("ident").text
                self.eat("punct", ":")
                A = self.term()
                self.eat("punct", ")")
                binders.append((x, A))
                self.scope.append(x)
        else:
            while self.at("ident"):
                x = self.eat("ident").text
                binders.append((x, None))
                self.scope.append(x)
        if not binders:
            self.error("abstraction needs at least one binder")
        self.eat("punct", ".")
        body = self.term()
        for _ in binders:
            self.scope.pop()
        for x, A in reversed(binders):
            body = Abs(A, x, body)
        return body

    def eq(self) -> PreTerm:
        left = self.app()
        if self.at("punct", "="):
            self.eat("punct", "=")
            right = self.app()
            ty = None
            if self.at("in"):
                self.eat("in")
                ty = self.app()
            return Eq(ty, left, right)
        return left

    def starts_atom(self) -> bool:
        t = self.peek()
        return t.kind in ("ident", "Box", "Rep", "refl", "atapp") or (t.kind == "punct" and t.text == "(")

    def app(self) -> PreTerm:
        if self.at("refl"):
            self.eat("refl")
            head: PreTerm = Refl(self.atom())
        else:
            head = self.atom()
        while self.starts_atom():
            if self.at("refl"):
                self.eat("refl")
                head = App(None, None, None, head, Refl(self.atom()))
            else:
                head = App(None, None, None, head, self.atom())
        return head

    def atom(self) -> PreTerm:
        t = self.peek()
        if t.kind == "Box":
            self.eat("Box")
            return BOX
        if t.kind == "Rep":
            self.eat("Rep")
            return REP
        if t.kind == "refl":
            self.eat("refl")
            return Refl(self.atom())
        if t.kind == "atapp":
            return self.annotated_app()
        if t.kind == "punct" and t.text == "(":
            self.eat("punct", "(")
            inner = self.term()
            self.eat("punct", ")")
            return inner
        if t.kind == "ident":
            self.eat("ident")
            name = t.text
            if self.at("punct", "(") and self._adjacent(t):
                args = self.arglist()
                if name in self.scope:
                    out: PreTerm = Var(name)
                    for a in args:
                        out = App(None, None, None, out, a)
                    return out
                return SymbolApp(name, tuple(args))
            if name in self.scope:
                return Var(name)
            if self.symbols is not None:
                return SymbolApp(name, ()) if name in self.symbols else Var(name)
            return SymbolApp(name, ()) if name[0].isupper() else Var(name)
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def _adjacent(self, ident: Token) -> bool:
        nxt = self.peek()
        return nxt.line == ident.line and nxt.column == ident.column + len(ident.text)

    def arglist(self) -> list[PreTerm]:
        self.eat("punct", "(")
        args = []
        if self.at("punct", ")"):
            self.eat("punct", ")")
            return args
        while True:
            args.append(self.term())
            if self.at("punct", ","):
                self.eat("punct", ",")
                continue
            break
        self.eat("punct", ")")
        return args

    def annotated_app(self) -> PreTerm:
        self.eat("atapp")
        self.eat("punct", "(")
        A = self.term()
        self.eat("punct", ",")
        x = self.eat("ident").text
        self.eat("punct", ".")
        self.scope.append(x)
        B = self.term()
        self.scope.pop()
        self.eat("punct", ",")
        b = self.term()
        self.eat("punct", ",")
        a = self.term()
        self.eat("punct", ")")
        return App(A, x, B, b, a)


def parse_term(text: str, symbols: Iterable[str] | None = None, scope: Iterable[str] = ()) -> PreTerm:
    p = _Parser(tokenize(text), set(symbols) if symbols is not None else None, scope)
    t = p.term()
    p.eat("eof")
    return t


def parse_context(text: str, symbols: Iterable[str] | None = None) -> PreContext:
    p = _Parser(tokenize(text), set(symbols) if symbols is not None else None)
    binders = _context(p)
    p.eat("eof")
    return binders


def _context(p: _Parser) -> PreContext:
    p.eat("punct", "(")
    entries = []
    if p.at("punct", ")"):
        p.eat("punct", ")")
        return PreContext(())
    while True:
        x = p.eat("ident").text
        p.eat("punct", ":")
        A = p.term()
        entries.append((x, A))
        p.scope.append(x)
        if p.at("punct", ","):
            p.eat("punct", ",")
            continue
        break
    p.eat("punct", ")")
    return PreContext(tuple(entries))


def parse_signature(text: str) -> PreSignature:
    """Parse a ``.lfsig`` file.

    One entry per line ``name : (x1 : A1, ..., xn : An) => SORT``; an
    indented line continues the previous entry.  Entries named ``_`` are
    renamed to ``_eq1``, ``_eq2``, ... in order.
    """
    chunks: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0]
        if not stripped.strip():
            continue
        if raw[:1].isspace() and chunks:
            start, body = chunks[-1]
            chunks[-1] = (start, body + "\n" + stripped)
        else:
            chunks.append((lineno, stripped))
    names: list[str] = []
    entries = []
    counter = itertools.count(1)
    for lineno, body in chunks:
        p = _Parser(tokenize(body, lineno), None)
        name = p.eat("ident").text
        if name == "_":
            name = f"_eq{next(counter)}"
        p.eat("punct", ":")
        p.symbols = set(names)
        ctx = _context(p)
        p.eat("darrow")
        if p.at("Box"):
            p.eat("Box")
            sort: PreTerm = BOX
        elif p.at("Rep"):
            p.eat("Rep")
            sort = REP
        else:
            sort = p.term()
        p.eat("eof")
        entries.append(SignatureEntry(name, ctx, sort, lineno))
        names.append(name)
    return PreSignature(tuple(entries))


# -- printer --------------------------------------------------------------------------

def pretty(t: PreTerm) -> str:
    return _pp(t, 0)


def _wrap(s: str, level: int, need: int) -> str:
    return f"({s})" if level > need else s


def _pp(t: PreTerm, level: int) -> str:
    """Levels: 0 arrow/lambda, 1 equation, 2 application, 3 atom."""
    if isinstance(t, Box):
        return "Box"
    if isinstance(t, Rep):
        return "Rep"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, SymbolApp):
        if not t.args:
            return t.name
        return f"{t.name}(" + ", ".join(_pp(a, 0) for a in t.args) + ")"
    if isinstance(t, Pi):
        if t.var not in free_vars(t.cod):
            s = f"{_pp(t.dom, 1)} -> {_pp(t.cod, 0)}"
        else:
            s = f"({t.var} : {_pp(t.dom, 0)}) -> {_pp(t.cod, 0)}"
        return _wrap(s, level, 0)
    if isinstance(t, Abs):
        b = f"({t.var} : {_pp(t.dom, 0)})" if t.dom is not None else t.var
        return _wrap(f"\\{b}. {_pp(t.body, 0)}", level, 0)
    if isinstance(t, App):
        if t.dom is not None and t.cod is not None:
            return f"@app({_pp(t.dom, 0)}, {t.var}. {_pp(t.cod, 0)}, {_pp(t.fun, 0)}, {_pp(t.arg, 0)})"
        return _wrap(f"{_pp(t.fun, 2)} {_pp(t.arg, 3)}", level, 2)
    if isinstance(t, Eq):
        s = f"{_pp(t.left, 2)} = {_pp(t.right, 2)}"
        if t.type is not None:
            s += f" in {_pp(t.type, 2)}"
        return _wrap(s, level, 1)
    if isinstance(t, Refl):
        return _wrap(f"refl {_pp(t.subject, 3)}", level, 2)
    raise TypeError(f"not a pre-term: {t!r}")


def pretty_context(ctx: PreContext) -> str:
    return "(" + ", ".join(f"{x} : {pretty(A)}" for x, A in ctx.entries) + ")"


def pretty_entry(e: SignatureEntry) -> str:
    return f"{e.name} : {pretty_context(e.context)} => {pretty(e.sort)}"


def pretty_signature(sig: PreSignature) -> str:
    return "\n".join(pretty_entry(e) for e in sig.entries) + "\n"
