"""Exp-log normal forms for types, and compact normal forms for lambda terms with sums."""
from .compact import (
    AppN, BaseTerm, CasN, InlDis, InlTwo, InrDis, InrTwo, PairC, ProductTerm, Tt, WknC,
    parse_compact, parse_compact_base, print_base, print_compact, typecheck_base,
    typecheck_product,
)
from .enf import (
    OVERFLOW, Bd, Cnf, CnfE, Con, Dis, Dnf, DnfE, Enf, Prp, Top, Two,
    check_enf_grammar, enf, enf_to_formula, eval_arith, format_enf,
)
from .errors import Error, InternalError, ParseError, ReadbackError, TypeMismatch, UnboundVariable
from .iso import Isomorphic, NotIsomorphic, Unknown, decide_iso, enf_ac_equal
from .nbe import ebn, nbe
from .syntax import (
    App, Cas, Conj, Disj, Formula, Fst, Hyp, Impl, Inl, Inr, Lam, NDTerm, Pair, Prop, Snd, Wkn,
    parse_term, parse_type, print_term, print_type, typecheck_nd,
)

__all__ = [name for name in dir() if not name.startswith("_")]
