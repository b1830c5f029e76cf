import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from explog.compact import (
    TT, AppN, BaseTerm, CasN, InlDis, InlTwo, InrDis, InrTwo, PairC, Tt, WknC,
    components, parse_compact, parse_compact_base, print_base, print_compact, tup,
    typecheck_base, typecheck_product, x,
)
from explog.enf import TOP, Prp, enf, p2c
from explog.errors import ParseError, TypeMismatch
from explog.nbe import check_compact
from explog.syntax import parse_type

import worked_examples as W
from gen import random_compact, random_formula

EX1 = tup(x(0, x(2)), x(1, x(2)))
EX2 = tup(x(3, x(2, x(1))), x(3, x(2, x(1))))


def test_tuple_helpers():
    assert tup() == TT
    assert tup(x(0)) == PairC(AppN(0, Tt()), Tt())
    assert components(EX1) == [x(0, x(2)), x(1, x(2))]


def test_typecheck_empty():
    typecheck_product(TT, TOP)


def test_typecheck_arity():
    with pytest.raises(TypeMismatch, match="arity mismatch"):
        typecheck_product(TT, p2c("p"))


def test_typecheck_variable():
    typecheck_base(AppN(0, TT), p2c("p"), Prp("p"))
    with pytest.raises(TypeMismatch, match="out of range"):
        typecheck_base(AppN(5, TT), p2c("p"), Prp("p"))
    with pytest.raises(TypeMismatch, match="returns q"):
        typecheck_base(AppN(0, TT), p2c("q"), Prp("p"))


def test_typecheck_examples():
    check_compact(EX1, parse_type(W.DELTA_POSITION.type))
    check_compact(EX2, parse_type(W.NESTED_CASE.type))


def test_case_on_non_sum():
    with pytest.raises(TypeMismatch, match="not a sum"):
        typecheck_base(CasN(0, TT, tup()), p2c("p"), Prp("p"))


def test_weakening():
    ctx = enf(parse_type("q*p")).cnf
    typecheck_base(WknC(x(0)), ctx, Prp("p"))
    with pytest.raises(TypeMismatch, match="empty context"):
        typecheck_base(WknC(x(0)), TOP, Prp("p"))


def test_injections():
    two = enf(parse_type("p -> p+q")).cnf
    check = lambda m: typecheck_product(tup(m), two)  # noqa: E731
    check(InlTwo(tup(x(0))))
    with pytest.raises(TypeMismatch):
        check(InrTwo(tup(x(0))))
    three = enf(parse_type("q -> p+q+r")).cnf
    typecheck_product(tup(InrDis(InlTwo(tup(x(0))))), three)
    with pytest.raises(TypeMismatch):
        typecheck_product(tup(InlDis(tup(x(0)))), three)
    with pytest.raises(TypeMismatch):
        typecheck_product(tup(InlDis(tup(x(0)))), two)


def test_injection_at_atom_rejected():
    with pytest.raises(TypeMismatch):
        typecheck_base(InlTwo(TT), TOP, Prp("p"))


@pytest.mark.parametrize("w", W.ALL, ids=lambda w: w.name)
def test_published_forms_typecheck(w):
    F = parse_type(w.type)
    for text in w.compact:
        check_compact(parse_compact(text), F)


def test_print_pretty():
    assert print_compact(EX1) == "<x0 x2, x1 x2>"
    assert print_compact(EX2) == "<x3 (x2 x1), x3 (x2 x1)>"
    assert print_compact(TT) == "<>"
    assert print_compact(tup(x(1, x(0)))) == "x1 x0"
    assert print_compact(tup(x(2, x(0), x(1)))) == "x2 <x0, x1>"


def test_print_pretty_constructs():
    t = tup(InlTwo(tup(x(0))), WknC(x(1, x(2))), InrDis(InlDis(TT)),
            CasN(0, tup(x(1)), tup(x(4, x(0)), x(3, x(0)))))
    assert print_compact(t) == "<inl2 x0, wkn (x1 x2), inrD (inlD <>), case(x0 x1, <x4 x0, x3 x0>)>"


def test_print_raw():
    assert print_compact(EX1, raw=True) == "<app 0 <app 2 <>>, app 1 <app 2 <>>>"
    assert print_base(InlTwo(tup(x(0))), raw=True) == "inl2 <app 0 <>>"


def test_parse():
    assert parse_compact("<app 0 <>>") == tup(AppN(0, TT))
    assert parse_compact(W.DUPLICATED_CASE.compact[0]) == tup(
        CasN(0, tup(x(1)), tup(x(4, x(0)), x(3, x(0)))))
    assert parse_compact("⟨app 0 ⟨⟩⟩") == tup(x(0))
    assert parse_compact_base("wkn inrD app 1 <>") == WknC(InrDis(x(1)))


@pytest.mark.parametrize("text", ["<app 0", "<foo>", "<app x <>>", "<app 0 <>> extra", "<$>", ""])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_compact(text)


def _compacts(seed, depth):
    rng = random.Random(seed)
    F = random_formula(rng, depth, "abc")
    return F, random_compact(rng, F)


@given(st.integers(0, 2**32), st.integers(1, 3))
def test_raw_roundtrip(seed, depth):
    F, p = _compacts(seed, depth)
    if p is None:
        return
    check_compact(p, F)
    if isinstance(p, BaseTerm):
        assert parse_compact_base(print_base(p, raw=True)) == p
    else:
        assert parse_compact(print_compact(p, raw=True)) == p
