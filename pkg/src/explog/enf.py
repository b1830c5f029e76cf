"""Exp-log normal form of types, and their reading as exponential polynomials.

Each rewrite has its own helper (``nplus``, ``ntimes``, ``distrib``,
``explogn`` ...), and the order in which factors and summands come out is
fixed by them.  List-walking helpers are written as loops so that large
normal forms do not hit Python's recursion limit; the test suite checks them
against an independent list-based normalizer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InternalError, ReadbackError
from .syntax import Conj, Disj, Formula, Impl, Prop, print_type

# --- grammar ----------------------------------------------------------------


class Cnf:
    __slots__ = ()


class Dnf:
    __slots__ = ()


class Base:
    __slots__ = ()


class Enf:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Top(Cnf):
    pass


@dataclass(frozen=True, slots=True)
class Con(Cnf):
    """The product (arg -> head) x rest."""
    arg: Cnf
    head: Base
    rest: Cnf


@dataclass(frozen=True, slots=True)
class Two(Dnf):
    left: Cnf
    right: Cnf


@dataclass(frozen=True, slots=True)
class Dis(Dnf):
    head: Cnf
    rest: Dnf


@dataclass(frozen=True, slots=True)
class Prp(Base):
    atom: str


@dataclass(frozen=True, slots=True)
class Bd(Base):
    dnf: Dnf


@dataclass(frozen=True, slots=True)
class CnfE(Enf):
    cnf: Cnf


@dataclass(frozen=True, slots=True)
class DnfE(Enf):
    dnf: Dnf


TOP = Top()

Factor = tuple[Cnf, Base]


def factors(c: Cnf) -> list[Factor]:
    out = []
    while isinstance(c, Con):
        out.append((c.arg, c.head))
        c = c.rest
    if not isinstance(c, Top):
        raise InternalError(f"not a CNF: {c!r}")
    return out


def from_factors(fs: Iterable[Factor], tail: Cnf = TOP) -> Cnf:
    acc = tail
    for a, b in reversed(list(fs)):
        acc = Con(a, b, acc)
    return acc


def summands(d: Dnf) -> list[Cnf]:
    out = []
    while isinstance(d, Dis):
        out.append(d.head)
        d = d.rest
    if not isinstance(d, Two):
        raise InternalError(f"not a DNF: {d!r}")
    out += [d.left, d.right]
    return out


def from_summands(cs: list[Cnf]) -> Dnf:
    if len(cs) < 2:
        raise InternalError("a sum needs at least two summands")
    acc: Dnf = Two(cs[-2], cs[-1])
    for c in reversed(cs[:-2]):
        acc = Dis(c, acc)
    return acc


def factor_count(c: Cnf) -> int:
    return len(factors(c))


def enf_summands(e: Enf) -> list[Cnf]:
    """A CNF counts as a single summand."""
    return [e.cnf] if isinstance(e, CnfE) else summands(e.dnf)


# --- normalizer -------------------------------------------------------------

def nplus(e1: Enf, e2: Enf) -> Dnf:
    return from_summands(enf_summands(e1) + enf_summands(e2))


def nplus1(d: Dnf, e2: Enf) -> Dnf:
    return nplus(DnfE(d), e2)


def ntimes(c1: Cnf, c2: Cnf) -> Cnf:
    return from_factors(factors(c1), c2)


def distrib0(c: Cnf, d: Dnf) -> Enf:
    return DnfE(from_summands([ntimes(c, ci) for ci in summands(d)]))


def distrib1(c: Cnf, e: Enf) -> Enf:
    if isinstance(e, CnfE):
        return CnfE(ntimes(c, e.cnf))
    return distrib0(c, e.dnf)


def distribn(d: Dnf, e2: Enf) -> Enf:
    out: list[Cnf] = []
    for c in summands(d):
        out += enf_summands(distrib1(c, e2))
    return DnfE(from_summands(out))


def distrib(e1: Enf, e2: Enf) -> Enf:
    if isinstance(e1, CnfE):
        return distrib1(e1.cnf, e2)
    return distribn(e1.dnf, e2)


def explog0(b: Base, d: Dnf) -> Cnf:
    return from_factors((c, b) for c in summands(d))


def explog1(b: Base, e: Enf) -> Cnf:
    if isinstance(e, CnfE):
        return Con(e.cnf, b, TOP)
    return explog0(b, e.dnf)


def explogn(c: Cnf, e2: Enf) -> Cnf:
    """Normal form of e2 -> c."""
    out: list[Factor] = []
    for c1, b in factors(c):
        out += factors(explog1(b, distrib1(c1, e2)))
    return from_factors(out)


def p2c(p: str) -> Cnf:
    return Con(TOP, Prp(p), TOP)


def b2c(b: Base) -> Cnf:
    if isinstance(b, Prp):
        return p2c(b.atom)
    return Con(TOP, b, TOP)


def enf2cnf(e: Enf) -> Cnf:
    if isinstance(e, CnfE):
        return e.cnf
    return b2c(Bd(e.dnf))


def enf(f: Formula) -> Enf:
    match f:
        case Prop(p):
            return CnfE(p2c(p))
        case Disj(a, b):
            return DnfE(nplus(enf(a), enf(b)))
        case Conj(a, b):
            return distrib(enf(a), enf(b))
        case Impl(a, b):
            return CnfE(explogn(enf2cnf(enf(b)), enf(a)))
    raise TypeError(f"not a formula: {f!r}")


# --- readback and display ---------------------------------------------------

def _conj_all(fs: list[Formula]) -> Formula:
    acc = fs[-1]
    for x in reversed(fs[:-1]):
        acc = Conj(x, acc)
    return acc


def _disj_all(fs: list[Formula]) -> Formula:
    acc = fs[-1]
    for x in reversed(fs[:-1]):
        acc = Disj(x, acc)
    return acc


def cnf_to_formula(c: Cnf) -> Formula:
    fs = factors(c)
    if not fs:
        raise ReadbackError("the empty product has no formula")
    out = []
    for a, b in fs:
        head = base_to_formula(b)
        out.append(head if isinstance(a, Top) else Impl(cnf_to_formula(a), head))
    return _conj_all(out)


def dnf_to_formula(d: Dnf) -> Formula:
    return _disj_all([cnf_to_formula(c) for c in summands(d)])


def base_to_formula(b: Base) -> Formula:
    if isinstance(b, Prp):
        return Prop(b.atom)
    return dnf_to_formula(b.dnf)


def enf_to_formula(e: Enf) -> Formula:
    if isinstance(e, CnfE):
        return cnf_to_formula(e.cnf)
    return dnf_to_formula(e.dnf)


def _factor_text(a: Cnf, b: Base) -> tuple[str, bool]:
    head = print_type(base_to_formula(b), tight=True)
    if isinstance(a, Top):
        return head, isinstance(b, Bd)
    dom = cnf_to_formula(a)
    dom_s = print_type(dom, tight=True)
    if isinstance(dom, Impl):
        dom_s = f"({dom_s})"
    return f"{dom_s} -> {head}", True


def _cnf_text(c: Cnf) -> tuple[str, bool]:
    parts = [_factor_text(a, b) for a, b in factors(c)]
    if not parts:
        raise ReadbackError("the empty product has no formula")
    if len(parts) == 1:
        return parts[0]
    return " * ".join(f"({s})" if compound else s for s, compound in parts), True


def format_enf(e: Enf) -> str:
    """Display form: top-level factors and summands spaced, inner types tight."""
    if isinstance(e, CnfE):
        return _cnf_text(e.cnf)[0]
    parts = []
    for c in summands(e.dnf):
        f = cnf_to_formula(c)
        s = print_type(f, tight=True)
        parts.append(f"({s})" if isinstance(f, (Impl, Disj)) else s)
    return " + ".join(parts)


def format_cnf(c: Cnf) -> str:
    return format_enf(CnfE(c))


# --- grammar check ----------------------------------------------------------

def _conj_items(f: Formula) -> list[Formula]:
    out = []
    while isinstance(f, Conj):
        out.append(f.left)
        f = f.right
    out.append(f)
    return out


def _disj_items(f: Formula) -> list[Formula]:
    out = []
    while isinstance(f, Disj):
        out.append(f.left)
        f = f.right
    out.append(f)
    return out


def _is_cnf(f: Formula) -> bool:
    return all(_is_factor(x) for x in _conj_items(f))


def _is_factor(f: Formula) -> bool:
    if isinstance(f, Prop):
        return True
    if isinstance(f, Impl):
        return _is_cnf(f.dom) and _is_base(f.cod)
    return False


def _is_dnf(f: Formula) -> bool:
    items = _disj_items(f)
    return len(items) >= 2 and all(_is_cnf(x) for x in items)


def _is_base(f: Formula) -> bool:
    return isinstance(f, Prop) or _is_dnf(f)


def check_enf_grammar(f: Formula) -> bool:
    """Whether f is a product of arrows c -> b, or a sum of such products.

    Domains are products, codomains atoms or sums; ``1 -> p`` is written ``p``.
    """
    return _is_cnf(f) or _is_dnf(f)


# --- arithmetic -------------------------------------------------------------

class Overflow:
    """Result marker for values beyond the digit budget."""
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "OVERFLOW"


OVERFLOW = Overflow()
DIGIT_BUDGET = 100_000


def _digits(n: int) -> float:
    return math.log10(n) if n > 0 else 0.0


def eval_arith(f: Formula, a: Mapping[str, int], budget: int = DIGIT_BUDGET):
    """Value of f with + as addition, * as product and t -> s as s**t.

    Returns OVERFLOW once an intermediate value would exceed ``budget`` digits.
    """
    match f:
        case Prop(p):
            v = a[p]
            if v < 1:
                raise ValueError(f"assignment for {p} must be positive, got {v}")
            return v
        case Disj(x, y) | Conj(x, y):
            l, r = eval_arith(x, a, budget), eval_arith(y, a, budget)
            if l is OVERFLOW or r is OVERFLOW:
                return OVERFLOW
            v = l + r if isinstance(f, Disj) else l * r
            return OVERFLOW if _digits(v) > budget else v
        case Impl(x, y):
            base = eval_arith(y, a, budget)
            if base == 1:
                return 1
            exp = eval_arith(x, a, budget)
            if base is OVERFLOW or exp is OVERFLOW:
                return OVERFLOW
            if exp > budget / _digits(base):
                return OVERFLOW
            return base ** exp
    raise TypeError(f"not a formula: {f!r}")
