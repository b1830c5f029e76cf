"""Types and lambda terms with sums: data, parsing, printing, typechecking.

Terms use de Bruijn indices: ``Hyp`` is index 0 and ``Wkn`` the successor.
Contexts are sequences of formulas, innermost binder first.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import ParseError, TypeMismatch, UnboundVariable

Atom = str


# --- formulas ---------------------------------------------------------------

class Formula:
    __slots__ = ()

    def __str__(self):
        return print_type(self)


@dataclass(frozen=True, slots=True)
class Prop(Formula):
    name: Atom


@dataclass(frozen=True, slots=True)
class Disj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Conj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Impl(Formula):
    dom: Formula
    cod: Formula


Context = Sequence[Formula]


def atoms_of(f: Formula) -> set[Atom]:
    match f:
        case Prop(n):
            return {n}
        case Disj(a, b) | Conj(a, b) | Impl(a, b):
            return atoms_of(a) | atoms_of(b)
    raise TypeError(f"not a formula: {f!r}")


def formula_size(f: Formula) -> int:
    match f:
        case Prop():
            return 1
        case Disj(a, b) | Conj(a, b) | Impl(a, b):
            return 1 + formula_size(a) + formula_size(b)
    raise TypeError(f"not a formula: {f!r}")


# --- terms ------------------------------------------------------------------

class NDTerm:
    __slots__ = ()

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Hyp(NDTerm):
    pass


@dataclass(frozen=True, slots=True)
class Wkn(NDTerm):
    body: NDTerm


@dataclass(frozen=True, slots=True)
class Lam(NDTerm):
    body: NDTerm


@dataclass(frozen=True, slots=True)
class App(NDTerm):
    fn: NDTerm
    arg: NDTerm


@dataclass(frozen=True, slots=True)
class Pair(NDTerm):
    left: NDTerm
    right: NDTerm


@dataclass(frozen=True, slots=True)
class Fst(NDTerm):
    body: NDTerm


@dataclass(frozen=True, slots=True)
class Snd(NDTerm):
    body: NDTerm


@dataclass(frozen=True, slots=True)
class Inl(NDTerm):
    body: NDTerm


@dataclass(frozen=True, slots=True)
class Inr(NDTerm):
    body: NDTerm


@dataclass(frozen=True, slots=True)
class Cas(NDTerm):
    scrut: NDTerm
    left: NDTerm
    right: NDTerm


HYP = Hyp()


def var(n: int) -> NDTerm:
    """The de Bruijn variable with index n."""
    t: NDTerm = HYP
    for _ in range(n):
        t = Wkn(t)
    return t


def var_index(t: NDTerm) -> int | None:
    """Index of a Hyp/Wkn chain, or None if t is not a variable."""
    n = 0
    while isinstance(t, Wkn):
        t, n = t.body, n + 1
    return n if isinstance(t, Hyp) else None


def term_size(t: NDTerm) -> int:
    match t:
        case Hyp():
            return 1
        case Wkn(b) | Lam(b) | Fst(b) | Snd(b) | Inl(b) | Inr(b):
            return 1 + term_size(b)
        case App(a, b) | Pair(a, b):
            return 1 + term_size(a) + term_size(b)
        case Cas(s, l, r):
            return 1 + term_size(s) + term_size(l) + term_size(r)
    raise TypeError(f"not a term: {t!r}")


# --- lexing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->|→)|(?P<dar>=>)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<nat>[0-9]+)|(?P<sym>[()<>,.|+*×\\λ⟨⟩]))"
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Split text into (kind, value, position) triples, ending with an eof token."""
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        kind, val = m.lastgroup, m.group(m.lastgroup)
        if kind == "arrow":
            val = "->"
        elif val == "×":
            val = "*"
        elif val == "λ":
            val = "\\"
        elif val == "⟨":
            val = "<"
        elif val == "⟩":
            val = ">"
        out.append((kind if kind in ("ident", "nat") else "sym", val, start))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Stream:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        if t[0] != "eof":
            self.i += 1
        return t

    def at(self, val: str) -> bool:
        k, v, _ = self.peek()
        return k == "sym" and v == val

    def expect(self, val: str):
        k, v, p = self.next()
        if k != "sym" or v != val:
            self.fail(f"expected {val!r}", p, v)

    def ident(self) -> str:
        k, v, p = self.next()
        if k != "ident" or v in KEYWORDS:
            self.fail("expected identifier", p, v)
        return v

    def fail(self, msg, pos, got=None):
        if got is not None:
            msg = f"{msg}, found {got!r}" if got else f"{msg}, found end of input"
        raise ParseError(msg, self.text, pos)

    def end(self):
        k, v, p = self.peek()
        if k != "eof":
            self.fail("unexpected trailing input", p, v)


KEYWORDS = frozenset({"fst", "snd", "inl", "inr", "case", "of"})


# --- types: parse / print ---------------------------------------------------

def parse_type(text: str) -> Formula:
    s = _Stream(text)
    f = _type(s)
    s.end()
    return f


def _type(s: _Stream) -> Formula:
    left = _sum(s)
    if s.at("->"):
        s.next()
        return Impl(left, _type(s))
    return left


def _sum(s: _Stream) -> Formula:
    items = [_prod(s)]
    while s.at("+"):
        s.next()
        items.append(_prod(s))
    return _fold_right(items, Disj)


def _prod(s: _Stream) -> Formula:
    items = [_atomic(s)]
    while s.at("*"):
        s.next()
        items.append(_atomic(s))
    return _fold_right(items, Conj)


def _atomic(s: _Stream) -> Formula:
    if s.at("("):
        s.next()
        f = _type(s)
        s.expect(")")
        return f
    k, v, p = s.peek()
    if k != "ident":
        s.fail("expected a type", p, v)
    s.next()
    return Prop(v)


def _fold_right(items, ctor):
    acc = items[-1]
    for x in reversed(items[:-1]):
        acc = ctor(x, acc)
    return acc


# precedence: 0 arrow, 1 sum, 2 product, 3 atom
def _prec(f: Formula) -> int:
    match f:
        case Impl():
            return 0
        case Disj():
            return 1
        case Conj():
            return 2
    return 3


def print_type(f: Formula, tight: bool = False) -> str:
    """Print with minimal parentheses. ``tight`` drops the spaces around ``->``."""
    arrow = "->" if tight else " -> "

    def go(f: Formula, need: int) -> str:
        match f:
            case Prop(n):
                s = n
            case Impl(a, b):
                s = go(a, 1) + arrow + go(b, 0)
            case Disj(a, b):
                s = go(a, 2) + "+" + go(b, 1)
            case Conj(a, b):
                s = go(a, 3) + "*" + go(b, 2)
            case _Meta(i):
                s = f"?{i}"
            case _:
                raise TypeError(f"not a formula: {f!r}")
        return f"({s})" if _prec(f) < need else s

    return go(f, 0)


# --- terms: parse / print ---------------------------------------------------

def parse_term(text: str) -> NDTerm:
    """Parse named surface syntax and lower it to de Bruijn form."""
    s = _Stream(text)
    t = _term(s, [])
    s.end()
    return t


def _lookup(s: _Stream, scope: list[str], name: str, pos: int) -> NDTerm:
    for i, n in enumerate(reversed(scope)):
        if n == name:
            return var(i)
    raise UnboundVariable(name)


def _term(s: _Stream, scope: list[str]) -> NDTerm:
    if s.at("\\"):
        s.next()
        names = [s.ident()]
        while s.peek()[0] == "ident" and s.peek()[1] not in KEYWORDS:
            names.append(s.ident())
        s.expect(".")
        body = _term(s, scope + names)
        for _ in names:
            body = Lam(body)
        return body
    if _at_kw(s, "case"):
        return _case(s, scope)
    return _app(s, scope)


def _at_kw(s: _Stream, kw: str) -> bool:
    k, v, _ = s.peek()
    return k == "ident" and v == kw


def _expect_kw(s: _Stream, kw: str):
    k, v, p = s.next()
    if k != "ident" or v != kw:
        s.fail(f"expected {kw!r}", p, v)


def _case(s: _Stream, scope: list[str]) -> NDTerm:
    _expect_kw(s, "case")
    scrut = _term(s, scope)
    _expect_kw(s, "of")
    _expect_kw(s, "inl")
    x = s.ident()
    s.expect("=>")
    left = _term(s, scope + [x])
    s.expect("|")
    _expect_kw(s, "inr")
    y = s.ident()
    s.expect("=>")
    right = _term(s, scope + [y])
    return Cas(scrut, left, right)


def _starts_arg(s: _Stream) -> bool:
    k, v, _ = s.peek()
    if k == "ident":
        return v != "of"
    return k == "sym" and v in ("(", "<", "\\")


def _app(s: _Stream, scope: list[str]) -> NDTerm:
    t = _arg(s, scope)
    while _starts_arg(s):
        if s.at("\\") or _at_kw(s, "case"):
            return App(t, _term(s, scope))
        t = App(t, _arg(s, scope))
    return t


_UNARY = {"fst": Fst, "snd": Snd, "inl": Inl, "inr": Inr}


def _arg(s: _Stream, scope: list[str]) -> NDTerm:
    k, v, p = s.peek()
    if k == "ident" and v in _UNARY:
        s.next()
        return _UNARY[v](_arg(s, scope))
    if k == "ident" and v == "case":
        return _case(s, scope)
    if k == "ident" and v not in KEYWORDS:
        s.next()
        return _lookup(s, scope, v, p)
    if s.at("\\"):
        return _term(s, scope)
    if s.at("("):
        s.next()
        t = _term(s, scope)
        s.expect(")")
        return t
    if s.at("<"):
        s.next()
        a = _term(s, scope)
        s.expect(",")
        b = _term(s, scope)
        s.expect(">")
        return Pair(a, b)
    s.fail("expected a term", p, v)


def print_term(t: NDTerm, names: Sequence[str] = ()) -> str:
    """Print with generated names; ``names`` labels free variables, innermost first."""
    scope = list(reversed(names))

    def fresh() -> str:
        return f"x{len(scope)}"

    def name_of(n: int) -> str:
        if n < len(scope):
            return scope[len(scope) - 1 - n]
        return f"#{n - len(scope)}"

    # levels: 0 lambda/case (extends right), 1 application, 2 argument
    def go(t: NDTerm, need: int) -> str:
        idx = var_index(t)
        if idx is not None:
            return name_of(idx)
        match t:
            case Lam(b):
                x = fresh()
                scope.append(x)
                body = go(b, 0)
                scope.pop()
                s, lvl = f"\\{x}. {body}", 0
            case Cas(sc, l, r):
                head = go(sc, 0)
                x = fresh()
                scope.append(x)
                ls = go(l, 0)
                scope.pop()
                scope.append(x)
                rs = go(r, 0)
                scope.pop()
                s, lvl = f"case {head} of inl {x} => {ls} | inr {x} => {rs}", 0
            case App(f, a):
                s, lvl = f"{go(f, 1)} {go(a, 2)}", 1
            case Fst(b) | Snd(b) | Inl(b) | Inr(b):
                kw = type(t).__name__.lower()
                s, lvl = f"{kw} {go(b, 2)}", 1
            case Pair(a, b):
                s, lvl = f"<{go(a, 0)}, {go(b, 0)}>", 2
            case _:
                raise TypeError(f"not a term: {t!r}")
        if lvl < need:
            return f"({s})"
        return s

    return go(t, 0)


# --- typechecking -----------------------------------------------------------

@dataclass(frozen=True, slots=True)
class _Meta(Formula):
    id: int

    def __str__(self):
        return f"?{self.id}"


class _Unifier:
    def __init__(self):
        self.sub: dict[int, Formula] = {}
        self.ids = itertools.count()

    def fresh(self) -> _Meta:
        return _Meta(next(self.ids))

    def walk(self, f: Formula) -> Formula:
        while isinstance(f, _Meta) and f.id in self.sub:
            f = self.sub[f.id]
        return f

    def zonk(self, f: Formula) -> Formula:
        f = self.walk(f)
        match f:
            case Disj(a, b):
                return Disj(self.zonk(a), self.zonk(b))
            case Conj(a, b):
                return Conj(self.zonk(a), self.zonk(b))
            case Impl(a, b):
                return Impl(self.zonk(a), self.zonk(b))
        return f

    def occurs(self, m: _Meta, f: Formula) -> bool:
        f = self.walk(f)
        if f == m:
            return True
        if isinstance(f, (Disj, Conj, Impl)):
            a, b = (f.left, f.right) if not isinstance(f, Impl) else (f.dom, f.cod)
            return self.occurs(m, a) or self.occurs(m, b)
        return False

    def unify(self, a: Formula, b: Formula) -> bool:
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return True
        if isinstance(a, _Meta):
            if self.occurs(a, b):
                return False
            self.sub[a.id] = b
            return True
        if isinstance(b, _Meta):
            return self.unify(b, a)
        if type(a) is not type(b) or isinstance(a, Prop):
            return False
        if isinstance(a, Impl):
            return self.unify(a.dom, b.dom) and self.unify(a.cod, b.cod)
        return self.unify(a.left, b.left) and self.unify(a.right, b.right)


def _has_meta(f: Formula) -> bool:
    match f:
        case _Meta():
            return True
        case Disj(a, b) | Conj(a, b) | Impl(a, b):
            return _has_meta(a) or _has_meta(b)
    return False


def _check(u: _Unifier, ctx: tuple, t: NDTerm, goal: Formula):
    def mismatch(actual: Formula):
        if not u.unify(actual, goal):
            raise TypeMismatch(t, u.zonk(goal), u.zonk(actual))

    idx = var_index(t)
    if idx is not None:
        if idx >= len(ctx):
            raise TypeMismatch(t, u.zonk(goal), None,
                               f"index {idx} out of range for context of length {len(ctx)}")
        mismatch(ctx[idx])
        return
    match t:
        case Lam(b):
            a, c = u.fresh(), u.fresh()
            mismatch(Impl(a, c))
            _check(u, (a,) + ctx, b, c)
        case App(f, x):
            a = u.fresh()
            _check(u, ctx, f, Impl(a, goal))
            _check(u, ctx, x, a)
        case Pair(x, y):
            a, b = u.fresh(), u.fresh()
            mismatch(Conj(a, b))
            _check(u, ctx, x, a)
            _check(u, ctx, y, b)
        case Fst(x):
            _check(u, ctx, x, Conj(goal, u.fresh()))
        case Snd(x):
            _check(u, ctx, x, Conj(u.fresh(), goal))
        case Inl(x):
            a, b = u.fresh(), u.fresh()
            mismatch(Disj(a, b))
            _check(u, ctx, x, a)
        case Inr(x):
            a, b = u.fresh(), u.fresh()
            mismatch(Disj(a, b))
            _check(u, ctx, x, b)
        case Cas(s, l, r):
            a, b = u.fresh(), u.fresh()
            _check(u, ctx, s, Disj(a, b))
            _check(u, (a,) + ctx, l, goal)
            _check(u, (b,) + ctx, r, goal)
        case _:
            raise TypeError(f"not a term: {t!r}")


def typecheck_nd(ctx: Context, t: NDTerm, goal: Formula) -> None:
    """Check that t inhabits goal in ctx; raise TypeMismatch otherwise."""
    _check(_Unifier(), tuple(ctx), t, goal)


def infer_nd(ctx: Context, t: NDTerm) -> Formula | None:
    """The unique type of t in ctx, or None if it is not determined by t alone.

    Raises TypeMismatch if t has no type at all.
    """
    u = _Unifier()
    goal = u.fresh()
    _check(u, tuple(ctx), t, goal)
    f = u.zonk(goal)
    return None if _has_meta(f) else f
