import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from explog.errors import ParseError, TypeMismatch, UnboundVariable
from explog.syntax import (
    App, Cas, Conj, Disj, Fst, Hyp, Impl, Inl, Inr, Lam, Pair, Prop, Snd, Wkn,
    atoms_of, formula_size, infer_nd, parse_term, parse_type, print_term, print_type,
    term_size, typecheck_nd, var,
)

from gen import random_closed_term, random_formula

p, q, r = Prop("p"), Prop("q"), Prop("r")


@pytest.mark.parametrize("text, expected", [
    ("p", p),
    ("(p+q) -> ((p+q) -> r) -> r", Impl(Disj(p, q), Impl(Impl(Disj(p, q), r), r))),
    ("a -> b -> c", Impl(Prop("a"), Impl(Prop("b"), Prop("c")))),
    ("p*q+r", Disj(Conj(p, q), r)),
    ("p+q*r", Disj(p, Conj(q, r))),
    ("p*q -> r", Impl(Conj(p, q), r)),
    ("p+q+r", Disj(p, Disj(q, r))),
    ("p*q*r", Conj(p, Conj(q, r))),
    ("(p -> q) -> r", Impl(Impl(p, q), r)),
    ("t1 -> x'", Impl(Prop("t1"), Prop("x'"))),
    ("p × q → r", Impl(Conj(p, q), r)),
])
def test_parse_type(text, expected):
    assert parse_type(text) == expected


@pytest.mark.parametrize("f, text", [
    (Impl(Prop("a"), Impl(Prop("b"), Prop("c"))), "a -> b -> c"),
    (Conj(Disj(p, q), r), "(p+q)*r"),
    (Disj(p, Disj(q, r)), "p+q+r"),
    (Disj(Disj(p, q), r), "(p+q)+r"),
    (Impl(Impl(p, q), r), "(p -> q) -> r"),
])
def test_print_type(f, text):
    assert print_type(f) == text


def test_print_type_tight():
    assert print_type(parse_type("(p -> q) -> r"), tight=True) == "(p->q)->r"


@pytest.mark.parametrize("text", ["p ->", "(p", "p q", "", "->", "p + * q", "1"])
def test_parse_type_errors(text):
    with pytest.raises(ParseError):
        parse_type(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_type("p -> ")
    assert e.value.pos == 5


def test_parse_term_de_bruijn():
    assert parse_term(r"\x. \y. y x") == Lam(Lam(App(Hyp(), Wkn(Hyp()))))


def test_parse_term_case_binds():
    t = parse_term(r"\x. \y. case x of inl z => y (inl z) | inr z => y (inr z)")
    w = Wkn(Hyp())
    assert t == Lam(Lam(Cas(w, App(w, Inl(Hyp())), App(w, Inr(Hyp())))))


def test_parse_term_forms():
    assert parse_term(r"\x y. x y") == Lam(Lam(App(var(1), var(0))))
    assert parse_term(r"\x. <fst x, snd x>") == Lam(Pair(Fst(Hyp()), Snd(Hyp())))
    assert parse_term(r"\f. \x. f x x") == Lam(Lam(App(App(var(1), var(0)), var(0))))
    assert parse_term(r"\x. x (\y. y) x") == Lam(App(App(var(0), Lam(var(0))), var(0)))


def test_parse_term_lambda_extends_right():
    assert parse_term(r"\x. x \y. y") == Lam(App(var(0), Lam(var(0))))


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        parse_term(r"\x. y")


@pytest.mark.parametrize("text", [r"\x.", "case", r"\x. case x of inl y => y", "<x", r"\. x"])
def test_parse_term_errors(text):
    with pytest.raises((ParseError, UnboundVariable)):
        parse_term(text)


def test_keywords_are_not_variables():
    with pytest.raises(ParseError):
        parse_term(r"\fst. fst")


def test_print_term():
    t = parse_term(r"\x. \y. case x of inl z => y (inl z) | inr z => y (inr z)")
    assert print_term(t) == r"\x0. \x1. case x0 of inl x2 => x1 (inl x2) | inr x2 => x1 (inr x2)"
    assert print_term(var(2)) == "#2"
    assert print_term(App(var(0), var(1)), ["f", "a"]) == "f a"


def test_var():
    assert var(0) == Hyp()
    assert var(2) == Wkn(Wkn(Hyp()))


def test_typecheck_ok():
    typecheck_nd((), Lam(Hyp()), Impl(p, p))
    typecheck_nd((), Lam(Lam(App(Hyp(), Wkn(Hyp())))),
                 parse_type("(p+q) -> ((p+q) -> r) -> r"))


def test_typecheck_mismatch():
    with pytest.raises(TypeMismatch):
        typecheck_nd((), Lam(Hyp()), Impl(p, q))


@pytest.mark.parametrize("term, goal", [
    (r"\x. fst x", "p -> p"),
    (r"\x. x x", "p -> p"),
    (r"\x. case x of inl a => a | inr b => b", "(p+q) -> p"),
    (r"\x. inl x", "p -> p"),
])
def test_typecheck_rejects(term, goal):
    with pytest.raises(TypeMismatch):
        typecheck_nd((), parse_term(term), parse_type(goal))


def test_typecheck_free_variable_out_of_context():
    with pytest.raises(TypeMismatch):
        typecheck_nd((), var(0), p)


def test_typecheck_with_context():
    typecheck_nd((Impl(p, q), p), App(var(0), var(1)), q)


def test_infer():
    assert infer_nd((Conj(p, q),), Fst(Hyp())) == p
    assert infer_nd((), Lam(Hyp())) is None


def test_sizes_and_atoms():
    f = parse_type("(p+q) -> q")
    assert atoms_of(f) == {"p", "q"}
    assert formula_size(f) == 5
    assert term_size(Lam(Hyp())) == 2


@given(st.integers(0, 2**32), st.integers(0, 4))
def test_type_print_parse_roundtrip(seed, depth):
    f = random_formula(random.Random(seed), depth)
    assert parse_type(print_type(f)) == f
    assert parse_type(print_type(f, tight=True)) == f


@given(st.integers(0, 2**32))
def test_term_print_parse_roundtrip(seed):
    t, F = random_closed_term(random.Random(seed))
    assert parse_term(print_term(t)) == t


@given(st.integers(0, 2**32))
def test_generated_terms_typecheck(seed):
    t, F = random_closed_term(random.Random(seed))
    typecheck_nd((), t, F)
