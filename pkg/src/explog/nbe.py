"""Normalization by evaluation between lambda terms and compact terms.

Both directions share one semantic domain built on a continuation monad:

* a monadic value (``Cont``) is a callable ``m(w, k)`` running at world ``w``;
  the continuation ``k(w2, v)`` receives a semantic value at an extension
  ``w2`` of ``w`` and returns answer syntax at ``w2``;
* worlds are tuples extended at the front, so a variable introduced when the
  world had length ``L`` has de Bruijn index ``len(W) - 1 - L`` in any later
  world ``W``;
* an atom is a *builder*, a function from a world to a term valid there.
  Weakening a value is just calling its builder at a larger world.

Values at source types (``SFun``, ``SPair``, ``SInl``, ``SInr``) and at
normal types (``CUnit``, ``CCons``, ``DLeft``, ``DRight``) are kept apart; a
value of the wrong shape is an internal error, since every entry point
typechecks its input first.
"""
from __future__ import annotations

import sys
import threading
from dataclasses import dataclass
from typing import Any, Callable

from .compact import (
    AppN, BaseTerm, CasN, InlDis, InlTwo, InrDis, InrTwo, PairC, ProductTerm,
    TT, Tt, WknC, typecheck_base, typecheck_product,
)
from .enf import (
    TOP, Bd, Cnf, CnfE, Con, Dis, Dnf, DnfE, Enf, Prp, Top, Two,
    distrib, enf, enf2cnf, enf_summands, factors, nplus, ntimes, summands,
)
from .errors import InternalError, TypeMismatch
from .syntax import (
    App, Cas, Conj, Disj, Formula, Fst, Hyp, Impl, Inl, Inr, Lam, NDTerm,
    Pair, Prop, Snd, Wkn, typecheck_nd, var,
)

World = tuple
Cont = Callable[[World, Callable], Any]


# --- semantic values ------------------------------------------------------

@dataclass(frozen=True, slots=True)
class SAtom:
    build: Callable[[World], Any]


@dataclass(frozen=True, slots=True)
class SFun:
    fn: Callable[[World, Cont], Cont]


@dataclass(frozen=True, slots=True)
class SPair:
    left: Cont
    right: Cont


@dataclass(frozen=True, slots=True)
class SInl:
    val: Cont


@dataclass(frozen=True, slots=True)
class SInr:
    val: Cont


@dataclass(frozen=True, slots=True)
class CUnit:
    pass


@dataclass(frozen=True, slots=True)
class CCons:
    """A factor (c1 -> b) as a function of a c1-tuple, then the rest."""
    fn: Callable[[World, Cont], Cont]
    rest: Cont


@dataclass(frozen=True, slots=True)
class DLeft:
    val: Cont


@dataclass(frozen=True, slots=True)
class DRight:
    val: Cont


CUNIT = CUnit()


def _want(v, cls):
    if not isinstance(v, cls):
        raise InternalError(f"semantic value {type(v).__name__} where {cls.__name__} was expected")
    return v


# --- the monad ------------------------------------------------------------

def ret(v) -> Cont:
    return lambda w, k: k(w, v)


def bind(m: Cont, f: Callable[[World, Any], Cont]) -> Cont:
    return lambda w, k: m(w, lambda w2, v: f(w2, v)(w2, k))


def memo(build: Callable[[World], Any]) -> Callable[[World], Any]:
    """Cache a builder by world length; the terms depend on nothing else."""
    cache: dict[int, Any] = {}

    def run(w):
        n = len(w)
        if n not in cache:
            cache[n] = build(w)
        return cache[n]
    return run


def level_var(level: int, mk: Callable[[int], Any]):
    return memo(lambda w: mk(len(w) - 1 - level))


RET_UNIT = ret(CUNIT)


# --- tuples and tagged sums at normal types ---------------------------------

def rest_of(u: Cont) -> Cont:
    return bind(u, lambda w, v: _want(v, CCons).rest)


def nth(u: Cont, n: int) -> Cont:
    """The n-th factor of a tuple, as a monadic CCons."""
    for _ in range(n):
        u = rest_of(u)
    return u


def apply_factor(u: Cont, n: int, arg: Cont) -> Cont:
    return bind(nth(u, n), lambda w, v: _want(v, CCons).fn(w, arg))


def take(c: Cnf, u: Cont) -> Cont:
    """The c-prefix of a tuple at c ++ rest."""
    if isinstance(c, Top):
        return RET_UNIT
    return ret(CCons(lambda w, a: apply_factor(u, 0, a), take(c.rest, rest_of(u))))


def drop(c: Cnf, u: Cont) -> Cont:
    return nth(u, len(factors(c)))


def sem_ntimes(c: Cnf, a: Cont, b: Cont) -> Cont:
    """Concatenate a tuple at c with a tuple at some c2."""
    if isinstance(c, Top):
        return b
    return ret(CCons(lambda w, x: apply_factor(a, 0, x), sem_ntimes(c.rest, rest_of(a), b)))


def inject_at(d: Dnf, j: int, s: Cont) -> Cont:
    """The j-th summand of d, carrying the tuple s."""
    if j == 0:
        return ret(DLeft(s))
    if isinstance(d, Two):
        if j != 1:
            raise InternalError(f"summand {j} of a binary sum")
        return ret(DRight(s))
    return ret(DRight(inject_at(d.rest, j - 1, s)))


def split(d: Dnf, x: Cont, f: Callable[[World, int, Cont], Cont]) -> Cont:
    """Find which summand x inhabits and continue with its index and tuple."""
    def on(w, v):
        if isinstance(v, DLeft):
            return f(w, 0, v.val)
        v = _want(v, DRight)
        if isinstance(d, Two):
            return f(w, 1, v.val)
        return split(d.rest, v.val, lambda w2, i, s: f(w2, i + 1, s))
    return bind(x, on)


def enf_inject(e: Enf, i: int, s: Cont) -> Cont:
    if isinstance(e, CnfE):
        return s
    return inject_at(e.dnf, i, s)


def enf_split(e: Enf, x: Cont, f: Callable[[World, int, Cont], Cont]) -> Cont:
    if isinstance(e, CnfE):
        return lambda w, k: f(w, 0, x)(w, k)
    return split(e.dnf, x, f)


def _count(e: Enf) -> int:
    return len(enf_summands(e))


# --- evaluating lambda terms --------------------------------------------------

def eval_nd(t: NDTerm, env: tuple = ()) -> Cont:
    """Evaluate t in an environment of monadic values, innermost first."""
    match t:
        case Hyp():
            return env[0]
        case Wkn(b):
            return eval_nd(b, env[1:])
        case Lam(b):
            return ret(SFun(lambda w, a: eval_nd(b, (a,) + env)))
        case App(f, a):
            arg = eval_nd(a, env)
            return bind(eval_nd(f, env), lambda w, v: _want(v, SFun).fn(w, arg))
        case Pair(a, b):
            return ret(SPair(eval_nd(a, env), eval_nd(b, env)))
        case Fst(p):
            return bind(eval_nd(p, env), lambda w, v: _want(v, SPair).left)
        case Snd(p):
            return bind(eval_nd(p, env), lambda w, v: _want(v, SPair).right)
        case Inl(a):
            return ret(SInl(eval_nd(a, env)))
        case Inr(a):
            return ret(SInr(eval_nd(a, env)))
        case Cas(s, l, r):
            def branch(w, v):
                if isinstance(v, SInl):
                    return eval_nd(l, (v.val,) + env)
                return eval_nd(r, (_want(v, SInr).val,) + env)
            return bind(eval_nd(s, env), branch)
    raise InternalError(f"not a lambda term: {t!r}")


# --- evaluating compact terms ---------------------------------------------------

def eval_tuple(p: ProductTerm, c: Cnf, ctx: Cnf, env: Cont) -> Cont:
    """Evaluate p at explogn(c, ctx) as a tuple at c, closing over env."""
    if isinstance(c, Top):
        if not isinstance(p, Tt):
            raise InternalError("tuple longer than its type")
        return RET_UNIT
    if not isinstance(p, PairC):
        raise InternalError("tuple shorter than its type")
    m, c1, b = p.head, c.arg, c.head

    def fn(w, a):
        return eval_base(m, ntimes(c1, ctx), b, sem_ntimes(c1, a, env))
    return ret(CCons(fn, eval_tuple(p.tail, c.rest, ctx, env)))


def eval_compact(p: ProductTerm, c: Cnf) -> Cont:
    """Evaluate a closed product term at c."""
    return eval_tuple(p, c, TOP, RET_UNIT)


def eval_base(m: BaseTerm, ctx: Cnf, goal, env: Cont) -> Cont:
    """Evaluate m : (ctx |- goal) given a monadic tuple env at ctx."""
    match m:
        case AppN(n, p):
            c1, _ = factors(ctx)[n]
            return apply_factor(env, n, eval_tuple(p, c1, ctx, env))
        case CasN(n, p, q):
            c1, b = factors(ctx)[n]
            d = _want(b, Bd).dnf
            scrut = apply_factor(env, n, eval_tuple(p, c1, ctx, env))
            branches = _components(q)

            def go(w, i, s):
                ci = summands(d)[i]
                return eval_base(branches[i], ntimes(ci, ctx), goal, sem_ntimes(ci, s, env))
            return split(d, scrut, go)
        case WknC(body):
            return eval_base(body, _want(ctx, Con).rest, goal, rest_of(env))
        case InlTwo(p):
            return ret(DLeft(eval_tuple(p, goal.dnf.left, ctx, env)))
        case InrTwo(p):
            return ret(DRight(eval_tuple(p, goal.dnf.right, ctx, env)))
        case InlDis(p):
            return ret(DLeft(eval_tuple(p, goal.dnf.head, ctx, env)))
        case InrDis(body):
            return ret(DRight(eval_base(body, ctx, Bd(goal.dnf.rest), env)))
    raise InternalError(f"not a base term: {m!r}")


def _components(p: ProductTerm) -> list[BaseTerm]:
    out = []
    while isinstance(p, PairC):
        out.append(p.head)
        p = p.tail
    return out


# --- transport between a type and its normal form -----------------------------

def _as_cnf(e: Enf, y: Cont) -> Cont:
    """View a value at e as a tuple at enf2cnf(e)."""
    if isinstance(e, CnfE):
        return y
    return ret(CCons(lambda w, _a: y, RET_UNIT))


def _from_cnf(e: Enf, u: Cont) -> Cont:
    if isinstance(e, CnfE):
        return u
    return apply_factor(u, 0, RET_UNIT)


def f2f(F: Formula, v: Cont) -> Cont:
    """Carry a value at F over to the normal form enf(F)."""
    match F:
        case Prop():
            return ret(CCons(lambda w, _a: v, RET_UNIT))
        case Disj(A, B):
            eA, eB = enf(A), enf(B)
            target = nplus(eA, eB)
            nA = _count(eA)

            def inj(w, s):
                if isinstance(s, SInl):
                    return enf_split(eA, f2f(A, s.val), lambda w2, i, t: inject_at(target, i, t))
                s = _want(s, SInr)
                return enf_split(eB, f2f(B, s.val), lambda w2, j, t: inject_at(target, nA + j, t))
            return bind(v, inj)
        case Conj(A, B):
            eA, eB = enf(A), enf(B)
            return bind(v, lambda w, pr: sem_distrib(
                eA, eB, f2f(A, _want(pr, SPair).left), f2f(B, pr.right)))
        case Impl(A, B):
            eF, eG = enf(A), enf(B)
            cG = enf2cnf(eG)

            def h(w, a):
                arg = f2f_inv(A, a)
                res = bind(v, lambda w2, f: _want(f, SFun).fn(w2, arg))
                return _as_cnf(eG, f2f(B, res))
            return sem_explogn(cG, eF, h)
    raise InternalError(f"not a formula: {F!r}")


def sem_distrib(eA: Enf, eB: Enf, x: Cont, y: Cont) -> Cont:
    """Pair values at eA and eB into a value at distrib(eA, eB)."""
    if isinstance(eA, CnfE) and isinstance(eB, CnfE):
        return sem_ntimes(eA.cnf, x, y)
    target = distrib(eA, eB).dnf
    nB = _count(eB)
    sA = enf_summands(eA)

    def outer(w, i, s):
        ci = sA[i]
        return enf_split(eB, y, lambda w2, j, t: inject_at(target, i * nB + j, sem_ntimes(ci, s, t)))
    return enf_split(eA, x, outer)


def sem_explogn(c: Cnf, e: Enf, h: Callable[[World, Cont], Cont]) -> Cont:
    """Build a tuple at explogn(c, e) from h : value at e -> tuple at c."""
    sums = enf_summands(e)
    fns = []
    for k, (c1, _b) in enumerate(factors(c)):
        for j, cj in enumerate(sums):
            fns.append(_explog_factor(c1, e, j, k, h))
    acc = RET_UNIT
    for fn in reversed(fns):
        acc = ret(CCons(fn, acc))
    return acc


def _explog_factor(c1: Cnf, e: Enf, j: int, k: int, h):
    def fn(w, args):
        arg_e = enf_inject(e, j, drop(c1, args))
        return apply_factor(h(w, arg_e), k, take(c1, args))
    return fn


def f2f_inv(F: Formula, u: Cont) -> Cont:
    """Carry a value at enf(F) back to F."""
    match F:
        case Prop():
            return apply_factor(u, 0, RET_UNIT)
        case Disj(A, B):
            eA, eB = enf(A), enf(B)
            d = nplus(eA, eB)
            nA = _count(eA)

            def back(w, i, s):
                if i < nA:
                    return ret(SInl(f2f_inv(A, enf_inject(eA, i, s))))
                return ret(SInr(f2f_inv(B, enf_inject(eB, i - nA, s))))
            return split(d, u, back)
        case Conj(A, B):
            eA, eB = enf(A), enf(B)
            if isinstance(eA, CnfE) and isinstance(eB, CnfE):
                return ret(SPair(f2f_inv(A, take(eA.cnf, u)), f2f_inv(B, drop(eA.cnf, u))))
            d = distrib(eA, eB).dnf
            nB = _count(eB)
            sA = enf_summands(eA)

            def undistrib(w, idx, s):
                i, j = divmod(idx, nB)
                ci = sA[i]
                a = enf_inject(eA, i, take(ci, s))
                b = enf_inject(eB, j, drop(ci, s))
                return ret(SPair(f2f_inv(A, a), f2f_inv(B, b)))
            return split(d, u, undistrib)
        case Impl(A, B):
            eF, eG = enf(A), enf(B)
            cG = enf2cnf(eG)

            def phi(w, a):
                return f2f_inv(B, _from_cnf(eG, un_explogn(cG, eF, u, f2f(A, a))))
            return ret(SFun(phi))
    raise InternalError(f"not a formula: {F!r}")


def un_explogn(c: Cnf, e: Enf, u: Cont, x: Cont) -> Cont:
    """Apply a tuple at explogn(c, e) to a value x at e, giving a tuple at c."""
    n = _count(e)
    fns = []
    for k, (c1, _b) in enumerate(factors(c)):
        fns.append(_unexplog_factor(c1, e, k * n, u, x))
    acc = RET_UNIT
    for fn in reversed(fns):
        acc = ret(CCons(fn, acc))
    return acc


def _unexplog_factor(c1: Cnf, e: Enf, offset: int, u: Cont, x: Cont):
    def fn(w, b):
        return enf_split(e, x, lambda w2, i, s: apply_factor(u, offset + i, sem_ntimes(c1, b, s)))
    return fn


# --- reification into lambda terms ------------------------------------------------

def sreify(F: Formula, w: World, m: Cont) -> NDTerm:
    match F:
        case Prop():
            return m(w, lambda w2, v: _want(v, SAtom).build(w2))
        case Impl(A, B):
            w1 = (A,) + w
            x = sreflect(A, level_var(len(w), var))
            return Lam(sreify(B, w1, bind(m, lambda w2, f: _want(f, SFun).fn(w2, x))))
        case Conj(A, B):
            return m(w, lambda w2, v: Pair(sreify(A, w2, _want(v, SPair).left),
                                           sreify(B, w2, v.right)))
        case Disj(A, B):
            def inj(w2, v):
                if isinstance(v, SInl):
                    return Inl(sreify(A, w2, v.val))
                return Inr(sreify(B, w2, _want(v, SInr).val))
            return m(w, inj)
    raise InternalError(f"not a formula: {F!r}")


def sreflect(F: Formula, build: Callable[[World], NDTerm]) -> Cont:
    match F:
        case Prop():
            return ret(SAtom(build))
        case Impl(A, B):
            def fn(w, a):
                return bind(a, lambda w2, av: sreflect(
                    B, memo(lambda W: App(build(W), sreify(A, W, ret(av))))))
            return ret(SFun(fn))
        case Conj(A, B):
            return ret(SPair(sreflect(A, memo(lambda W: Fst(build(W)))),
                             sreflect(B, memo(lambda W: Snd(build(W))))))
        case Disj(A, B):
            def run(w1, k):
                lv = len(w1)
                left = k((A,) + w1, SInl(sreflect(A, level_var(lv, var))))
                right = k((B,) + w1, SInr(sreflect(B, level_var(lv, var))))
                return Cas(build(w1), left, right)
            return run
    raise InternalError(f"not a formula: {F!r}")


# --- reification into compact terms ------------------------------------------------

def _extend(c: Cnf, w: World) -> World:
    return tuple(factors(c)) + w


def creify(c: Cnf, w: World, m: Cont) -> ProductTerm:
    """Read a tuple at c back as a product term at explogn(c, w)."""
    fs = factors(c)
    heads = []
    u = m
    for c1, b in fs:
        w1 = _extend(c1, w)
        args = creflect(c1, w)
        hb = apply_factor(u, 0, args)
        heads.append(reify_base(b, w1, hb))
        u = rest_of(u)
    acc: ProductTerm = TT
    for t in reversed(heads):
        acc = PairC(t, acc)
    return acc


def reify_base(b, w: World, m: Cont) -> BaseTerm:
    if isinstance(b, Prp):
        return m(w, lambda w2, v: _want(v, SAtom).build(w2))
    return dreify(_want(b, Bd).dnf, w, m)


def dreify(d: Dnf, w: World, m: Cont) -> BaseTerm:
    """Read a value at the sum d back as a base term at world w."""
    return m(w, lambda w2, v: _inject_term(d, w2, v))


def _inject_term(d: Dnf, w: World, v) -> BaseTerm:
    if isinstance(d, Two):
        if isinstance(v, DLeft):
            return InlTwo(creify(d.left, w, v.val))
        return InrTwo(creify(d.right, w, _want(v, DRight).val))
    if isinstance(v, DLeft):
        return InlDis(creify(d.head, w, v.val))
    return InrDis(dreify(d.rest, w, _want(v, DRight).val))


def creflect(c: Cnf, w: World) -> Cont:
    """Fresh variables for the factors of c, living in the world c ++ w."""
    fs = factors(c)
    top = len(fs) + len(w) - 1
    acc = RET_UNIT
    for i in reversed(range(len(fs))):
        c1, b = fs[i]
        acc = ret(CCons(_reflect_factor(c1, b, top - i), acc))
    return acc


def _reflect_factor(c1: Cnf, b, level: int):
    if isinstance(b, Prp):
        def fn(w, args):
            return ret(SAtom(memo(lambda W: AppN(len(W) - 1 - level, creify(c1, W, args)))))
        return fn
    d = _want(b, Bd).dnf

    def fn(w, args):
        return dreflect(d, level, c1, args)
    return fn


def dreflect(d: Dnf, level: int, c1: Cnf, args: Cont) -> Cont:
    """Case on the variable at level, applied to args, with one branch per summand."""
    def run(w1, k):
        idx = len(w1) - 1 - level
        branches = []
        for j, cj in enumerate(summands(d)):
            wj = _extend(cj, w1)
            branches.append(k(wj, _select(d, j, creflect(cj, w1))))
        q: ProductTerm = TT
        for t in reversed(branches):
            q = PairC(t, q)
        return CasN(idx, creify(c1, w1, args), q)
    return run


def _select(d: Dnf, j: int, s: Cont):
    if j == 0:
        return DLeft(s)
    if isinstance(d, Two):
        return DRight(s)
    return DRight(ret(_select(d.rest, j - 1, s)))


# --- entry points ---------------------------------------------------------------

_STACK = 512 * 1024 * 1024


_deep_lock = threading.Lock()
_deep_active = 0
_saved_limit = 0


def _raise_limit():
    global _deep_active, _saved_limit
    with _deep_lock:
        if _deep_active == 0:
            _saved_limit = sys.getrecursionlimit()
            sys.setrecursionlimit(max(_saved_limit, 200_000))
        _deep_active += 1


def _restore_limit():
    global _deep_active
    with _deep_lock:
        _deep_active -= 1
        if _deep_active == 0:
            sys.setrecursionlimit(_saved_limit)


_in_deep = threading.local()


def run_deep(fn, *args):
    """Run fn in a thread with a large stack; the evaluators recurse deeply.

    Nested calls run inline. The raised recursion limit only holds while some
    such thread is running; other threads keep their ordinary stacks and must
    not see it.
    """
    if getattr(_in_deep, "active", False):
        return fn(*args)
    out: list = []

    def target():
        _in_deep.active = True
        try:
            out.append((True, fn(*args)))
        except BaseException as e:  # re-raised in the caller
            out.append((False, e))
    _raise_limit()
    try:
        with _deep_lock:
            old_size = threading.stack_size()
            threading.stack_size(_STACK)
            try:
                t = threading.Thread(target=target)
                t.start()
            finally:
                threading.stack_size(old_size)
        t.join()
    finally:
        _restore_limit()
    ok, val = out[0]
    if not ok:
        if isinstance(val, RecursionError):
            raise InternalError("evaluation nested too deeply") from val
        raise val
    return val


def _nbe(t: NDTerm, F: Formula):
    e = enf(F)
    u = f2f(F, eval_nd(t))
    if isinstance(e, CnfE):
        return creify(e.cnf, (), u)
    return dreify(e.dnf, (), u)


def nbe(t: NDTerm, F: Formula) -> ProductTerm | BaseTerm:
    """Normalize a closed lambda term of type F to a compact term at enf(F).

    The result is a product term, or a base term when enf(F) is a sum.
    """
    return run_deep(_checked_nbe, t, F)


def _checked_nbe(t: NDTerm, F: Formula):
    typecheck_nd((), t, F)
    return _nbe(t, F)


def _ebn(p, F: Formula) -> NDTerm:
    e = enf(F)
    if isinstance(e, CnfE):
        u = eval_compact(p, e.cnf)
    else:
        u = eval_base(p, TOP, Bd(e.dnf), RET_UNIT)
    return sreify(F, (), f2f_inv(F, u))


def check_compact(p, F: Formula) -> None:
    """Typecheck a closed compact term at enf(F)."""
    e = enf(F)
    if isinstance(e, CnfE):
        if not isinstance(p, ProductTerm):
            raise _shape_error(p, "a tuple")
        typecheck_product(p, e.cnf)
    else:
        if not isinstance(p, BaseTerm):
            raise _shape_error(p, "a base term")
        typecheck_base(p, TOP, Bd(e.dnf))


def _shape_error(p, what):
    return TypeMismatch(p, what, type(p).__name__, f"expected {what} at this type")


def ebn(p, F: Formula) -> NDTerm:
    """Convert a closed compact term at enf(F) back to a lambda term of type F."""
    return run_deep(_checked_ebn, p, F)


def _checked_ebn(p, F: Formula) -> NDTerm:
    check_compact(p, F)
    return _ebn(p, F)
