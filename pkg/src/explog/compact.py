"""Compact terms at exp-log normal types.

A product term is a tuple of base terms.  Base terms have no lambda and no
projection: a variable (a factor of the context) is always applied to a full
tuple of arguments, and sums are eliminated by an indexed case.  Variable
indices count the context factors from the left, starting at 0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .enf import (
    TOP, Base, Bd, Cnf, CnfE, Con, Dis, Prp, Top, Two,
    explog0, explogn, factors, format_cnf, print_type, base_to_formula,
)
from .errors import ParseError, TypeMismatch


class ProductTerm:
    __slots__ = ()

    def __str__(self):
        return print_compact(self)


class BaseTerm:
    __slots__ = ()

    def __str__(self):
        return print_base(self)


@dataclass(frozen=True, slots=True)
class Tt(ProductTerm):
    pass


@dataclass(frozen=True, slots=True)
class PairC(ProductTerm):
    head: BaseTerm
    tail: ProductTerm


@dataclass(frozen=True, slots=True)
class AppN(BaseTerm):
    index: int
    arg: ProductTerm


@dataclass(frozen=True, slots=True)
class CasN(BaseTerm):
    index: int
    arg: ProductTerm
    branches: ProductTerm


@dataclass(frozen=True, slots=True)
class WknC(BaseTerm):
    body: BaseTerm


@dataclass(frozen=True, slots=True)
class InlTwo(BaseTerm):
    arg: ProductTerm


@dataclass(frozen=True, slots=True)
class InrTwo(BaseTerm):
    arg: ProductTerm


@dataclass(frozen=True, slots=True)
class InlDis(BaseTerm):
    arg: ProductTerm


@dataclass(frozen=True, slots=True)
class InrDis(BaseTerm):
    body: BaseTerm


TT = Tt()
CompactTerm = ProductTerm | BaseTerm


def tup(*items: BaseTerm) -> ProductTerm:
    acc: ProductTerm = TT
    for m in reversed(items):
        acc = PairC(m, acc)
    return acc


def components(p: ProductTerm) -> list[BaseTerm]:
    out = []
    while isinstance(p, PairC):
        out.append(p.head)
        p = p.tail
    return out


def x(n: int, *args: BaseTerm) -> AppN:
    """Shorthand for the variable n applied to a tuple."""
    return AppN(n, tup(*args))


# --- typechecking -----------------------------------------------------------

def _show_ctx(c: Cnf) -> str:
    return "1" if isinstance(c, Top) else format_cnf(c)


def _show_base(b: Base) -> str:
    return print_type(base_to_formula(b), tight=True)


def typecheck_product(p: ProductTerm, c: Cnf) -> None:
    """Check that p is a tuple at the product c."""
    ms, fs = components(p), factors(c)
    if len(ms) != len(fs):
        raise TypeMismatch(p, _show_ctx(c), f"{len(ms)} components",
                           f"arity mismatch: {len(fs)} factors, {len(ms)} components")
    for m, (arg, head) in zip(ms, fs):
        typecheck_base(m, arg, head)


def typecheck_base(m: BaseTerm, ctx: Cnf, goal: Base) -> None:
    """Check that m has type goal in the context ctx."""
    match m:
        case AppN(n, p) | CasN(n, p, _):
            fs = factors(ctx)
            if n >= len(fs):
                raise TypeMismatch(m, _show_base(goal), None,
                                   f"index {n} out of range for a context of {len(fs)} factors")
            c1, b = fs[n]
            if isinstance(m, AppN):
                if not isinstance(b, Prp) or b != goal:
                    raise TypeMismatch(m, _show_base(goal), _show_base(b),
                                       f"variable x{n} returns {_show_base(b)}, "
                                       f"needed {_show_base(goal)}")
                typecheck_product(p, explogn(c1, CnfE(ctx)))
            else:
                if not isinstance(b, Bd):
                    raise TypeMismatch(m, "a sum", _show_base(b),
                                       f"case on x{n} whose result {_show_base(b)} is not a sum")
                typecheck_product(p, explogn(c1, CnfE(ctx)))
                typecheck_product(m.branches, explogn(explog0(goal, b.dnf), CnfE(ctx)))
        case WknC(body):
            if not isinstance(ctx, Con):
                raise TypeMismatch(m, _show_base(goal), None, "weakening in an empty context")
            typecheck_base(body, ctx.rest, goal)
        case InlTwo(p) | InrTwo(p):
            if not (isinstance(goal, Bd) and isinstance(goal.dnf, Two)):
                raise TypeMismatch(m, _show_base(goal), "a binary sum")
            side = goal.dnf.left if isinstance(m, InlTwo) else goal.dnf.right
            typecheck_product(p, explogn(side, CnfE(ctx)))
        case InlDis(p):
            if not (isinstance(goal, Bd) and isinstance(goal.dnf, Dis)):
                raise TypeMismatch(m, _show_base(goal), "a sum of three or more")
            typecheck_product(p, explogn(goal.dnf.head, CnfE(ctx)))
        case InrDis(body):
            if not (isinstance(goal, Bd) and isinstance(goal.dnf, Dis)):
                raise TypeMismatch(m, _show_base(goal), "a sum of three or more")
            typecheck_base(body, ctx, Bd(goal.dnf.rest))
        case _:
            raise TypeError(f"not a base term: {m!r}")


# --- printing ---------------------------------------------------------------

def print_compact(p: ProductTerm, raw: bool = False) -> str:
    """Pretty form by default: ``xn`` for ``xn <>`` and ``M`` for ``<M>``."""
    if raw:
        return _raw_prod(p)
    ms = components(p)
    if len(ms) == 1:
        return _pretty_base(ms[0])
    return _pretty_tuple(ms)


def print_base(m: BaseTerm, raw: bool = False) -> str:
    return _raw_base(m) if raw else _pretty_base(m)


def _raw_prod(p: ProductTerm) -> str:
    return "<" + ", ".join(_raw_base(m) for m in components(p)) + ">"


def _raw_base(m: BaseTerm) -> str:
    match m:
        case AppN(n, p):
            return f"app {n} {_raw_prod(p)}"
        case CasN(n, p, q):
            return f"case {n} {_raw_prod(p)} {_raw_prod(q)}"
        case WknC(b):
            return f"wkn {_raw_base(b)}"
        case InlTwo(p):
            return f"inl2 {_raw_prod(p)}"
        case InrTwo(p):
            return f"inr2 {_raw_prod(p)}"
        case InlDis(p):
            return f"inlD {_raw_prod(p)}"
        case InrDis(b):
            return f"inrD {_raw_base(b)}"
    raise TypeError(f"not a base term: {m!r}")


def _pretty_tuple(ms: list[BaseTerm]) -> str:
    return "<" + ", ".join(_pretty_base(m) for m in ms) + ">"


def _is_atomic(m: BaseTerm) -> bool:
    return isinstance(m, AppN) and isinstance(m.arg, Tt)


def _pretty_arg(p: ProductTerm) -> str:
    ms = components(p)
    if len(ms) != 1:
        return _pretty_tuple(ms)
    m = ms[0]
    s = _pretty_base(m)
    return s if _is_atomic(m) or isinstance(m, CasN) else f"({s})"


def _pretty_base(m: BaseTerm) -> str:
    match m:
        case AppN(n, Tt()):
            return f"x{n}"
        case AppN(n, p):
            return f"x{n} {_pretty_arg(p)}"
        case CasN(n, p, q):
            head = f"x{n}" if isinstance(p, Tt) else f"x{n} {_pretty_arg(p)}"
            return f"case({head}, {print_compact(q)})"
        case WknC(b):
            return f"wkn {_pretty_sub(b)}"
        case InlTwo(p):
            return f"inl2 {_pretty_arg(p)}"
        case InrTwo(p):
            return f"inr2 {_pretty_arg(p)}"
        case InlDis(p):
            return f"inlD {_pretty_arg(p)}"
        case InrDis(b):
            return f"inrD {_pretty_sub(b)}"
    raise TypeError(f"not a base term: {m!r}")


def _pretty_sub(m: BaseTerm) -> str:
    s = _pretty_base(m)
    return s if _is_atomic(m) or isinstance(m, CasN) else f"({s})"


# --- raw parser -------------------------------------------------------------

_TOK = re.compile(r"\s*(?:(?P<nat>[0-9]+)|(?P<word>[A-Za-z][A-Za-z0-9]*)|(?P<sym>[<>,⟨⟩]))")
_KW = {"app", "case", "wkn", "inl2", "inr2", "inlD", "inrD"}


class _Raw:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOK.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
            kind = m.lastgroup
            val = {"⟨": "<", "⟩": ">"}.get(m.group(kind), m.group(kind))
            self.toks.append((kind, val, m.start(kind)))
            pos = m.end()
        self.toks.append(("eof", "", len(text)))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        if t[0] != "eof":
            self.i += 1
        return t

    def fail(self, what: str, tok):
        got = repr(tok[1]) if tok[0] != "eof" else "end of input"
        raise ParseError(f"expected {what}, found {got}", self.text, tok[2])

    def sym(self, s: str):
        t = self.next()
        if t[0] != "sym" or t[1] != s:
            self.fail(repr(s), t)

    def nat(self) -> int:
        t = self.next()
        if t[0] != "nat":
            self.fail("a number", t)
        return int(t[1])

    def prod(self) -> ProductTerm:
        self.sym("<")
        items = []
        if not (self.peek()[0] == "sym" and self.peek()[1] == ">"):
            items.append(self.base())
            while self.peek()[0] == "sym" and self.peek()[1] == ",":
                self.next()
                items.append(self.base())
        self.sym(">")
        return tup(*items)

    def base(self) -> BaseTerm:
        t = self.next()
        if t[0] != "word" or t[1] not in _KW:
            self.fail("one of " + ", ".join(sorted(_KW)), t)
        match t[1]:
            case "app":
                n = self.nat()
                return AppN(n, self.prod())
            case "case":
                n = self.nat()
                p = self.prod()
                return CasN(n, p, self.prod())
            case "wkn":
                return WknC(self.base())
            case "inl2":
                return InlTwo(self.prod())
            case "inr2":
                return InrTwo(self.prod())
            case "inlD":
                return InlDis(self.prod())
            case "inrD":
                return InrDis(self.base())

    def end(self):
        t = self.peek()
        if t[0] != "eof":
            self.fail("end of input", t)


def parse_compact(text: str) -> ProductTerm:
    """Parse the raw (convention-free) syntax of a product term."""
    r = _Raw(text)
    p = r.prod()
    r.end()
    return p


def parse_compact_base(text: str) -> BaseTerm:
    r = _Raw(text)
    m = r.base()
    r.end()
    return m
