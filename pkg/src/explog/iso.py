"""Type isomorphism heuristic.

Two types are reported isomorphic when their exp-log normal forms agree up to
reordering of factors and summands.  They are reported non-isomorphic when
some assignment of positive integers to atoms gives the two types different
values as exponential polynomials; isomorphic types always agree there.
Otherwise the verdict is unknown.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Union

from .enf import (
    OVERFLOW, Base, Cnf, CnfE, Enf, Prp, enf, eval_arith, factors, summands,
)
from .syntax import Formula, atoms_of

DEFAULT_TRIALS = 32
DEFAULT_SEED = 0
VALUES = (1, 2, 3)


@dataclass(frozen=True)
class Isomorphic:
    method: str  # "enf-equal" or "enf-ac-equal"

    def __str__(self):
        return f"isomorphic ({self.method})"


@dataclass(frozen=True)
class NotIsomorphic:
    witness: dict[str, int] = field(hash=False)
    lhs_value: int
    rhs_value: int

    def __str__(self):
        w = ", ".join(f"{a}={v}" for a, v in sorted(self.witness.items()))
        return f"not isomorphic: {w} gives {self.lhs_value} ≠ {self.rhs_value}"


@dataclass(frozen=True)
class Unknown:
    trials: int

    def __str__(self):
        return f"unknown: normal forms differ, no witness in {self.trials} trials"


IsoVerdict = Union[Isomorphic, NotIsomorphic, Unknown]


# Canonical keys: sort factors and summands recursively, so two normal forms
# have equal keys iff they agree up to commutativity.

def _cnf_key(c: Cnf) -> tuple:
    return ("*",) + tuple(sorted((_cnf_key(a), _base_key(b)) for a, b in factors(c)))


def _base_key(b: Base) -> tuple:
    if isinstance(b, Prp):
        return ("p", b.atom)
    return _dnf_key(b.dnf)


def _dnf_key(d) -> tuple:
    return ("+",) + tuple(sorted(_cnf_key(c) for c in summands(d)))


def enf_key(e: Enf) -> tuple:
    if isinstance(e, CnfE):
        return _cnf_key(e.cnf)
    return _dnf_key(e.dnf)


def enf_ac_equal(e1: Enf, e2: Enf) -> bool:
    """Equality of normal forms modulo commutativity of + and *."""
    return enf_key(e1) == enf_key(e2)


def assignments(atoms, trials: int, seed: int):
    """All atoms at 2 first, then seeded random draws from VALUES."""
    atoms = sorted(atoms)
    yield {a: 2 for a in atoms}
    rng = random.Random(seed)
    for _ in range(trials - 1):
        yield {a: rng.choice(VALUES) for a in atoms}


def find_witness(f1: Formula, f2: Formula, trials: int = DEFAULT_TRIALS,
                 seed: int = DEFAULT_SEED) -> NotIsomorphic | None:
    atoms = atoms_of(f1) | atoms_of(f2)
    for a in assignments(atoms, trials, seed):
        v1, v2 = eval_arith(f1, a), eval_arith(f2, a)
        if v1 is OVERFLOW or v2 is OVERFLOW:
            continue
        if v1 != v2:
            return NotIsomorphic(a, v1, v2)
    return None


def decide_iso(f1: Formula, f2: Formula, trials: int = DEFAULT_TRIALS,
               seed: int = DEFAULT_SEED) -> IsoVerdict:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    e1, e2 = enf(f1), enf(f2)
    if e1 == e2:
        return Isomorphic("enf-equal")
    if enf_ac_equal(e1, e2):
        return Isomorphic("enf-ac-equal")
    w = find_witness(f1, f2, trials, seed)
    return w if w is not None else Unknown(trials)
