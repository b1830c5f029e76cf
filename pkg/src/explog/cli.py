"""Command-line front end.

Exit codes: 0 success, equal or isomorphic; 1 not isomorphic; 2 unknown or
not proven equal; 3 bad input (parse or type error); 4 internal error.
"""
from __future__ import annotations

import argparse
import sys

from . import compact, iso
from .compact import ProductTerm, print_base, print_compact
from .enf import CnfE, check_enf_grammar, enf, enf_to_formula, format_enf
from .errors import Error, InternalError
from .nbe import ebn, nbe, run_deep
from .syntax import parse_term, parse_type, print_term

EXIT_OK, EXIT_DISTINCT, EXIT_UNKNOWN, EXIT_USER, EXIT_INTERNAL = 0, 1, 2, 3, 4


def show_compact(p, raw: bool = False) -> str:
    if isinstance(p, ProductTerm):
        return print_compact(p, raw=raw)
    return print_base(p, raw=raw)


def cmd_enf(args) -> int:
    f = parse_type(args.type)
    e = enf(f)
    if not check_enf_grammar(enf_to_formula(e)):
        raise InternalError(f"normal form outside the grammar: {format_enf(e)}")
    print(format_enf(e))
    return EXIT_OK


def cmd_iso(args) -> int:
    verdict = iso.decide_iso(parse_type(args.type1), parse_type(args.type2),
                             trials=args.trials, seed=args.seed)
    print(verdict)
    if isinstance(verdict, iso.Isomorphic):
        return EXIT_OK
    if isinstance(verdict, iso.NotIsomorphic):
        return EXIT_DISTINCT
    return EXIT_UNKNOWN


def cmd_normalize(args) -> int:
    p = nbe(parse_term(args.term), parse_type(args.type))
    print(show_compact(p, raw=args.raw))
    return EXIT_OK


def cmd_equal(args) -> int:
    f = parse_type(args.type)
    p1 = nbe(parse_term(args.term1), f)
    p2 = nbe(parse_term(args.term2), f)
    if p1 == p2:
        print("equal")
        return EXIT_OK
    print("not proven equal")
    print(f"  {show_compact(p1)}")
    print(f"  {show_compact(p2)}")
    return EXIT_UNKNOWN


def cmd_reverse(args) -> int:
    f = parse_type(args.type)
    if isinstance(enf(f), CnfE):
        p = compact.parse_compact(args.compact)
    else:
        p = compact.parse_compact_base(args.compact)
    print(print_term(ebn(p, f)))
    return EXIT_OK


COMMANDS = {
    "enf": (cmd_enf, ["type"], "print the exp-log normal form of a type"),
    "iso": (cmd_iso, ["type1", "type2"], "check two types for isomorphism"),
    "normalize": (cmd_normalize, ["term", "type"], "normalize a closed term to compact form"),
    "equal": (cmd_equal, ["term1", "term2", "type"], "compare two terms by their compact forms"),
    "reverse": (cmd_reverse, ["compact", "type"], "convert a raw compact term back to a lambda term"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="explog",
        description="Exp-log normal forms of types and compact normal forms of terms.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_fn, positionals, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=help_)
        for pos in positionals:
            sp.add_argument(pos, nargs="?")
        sp.add_argument("--file", metavar="PATH",
                        help="read the arguments from the non-empty lines of PATH")
        if name == "iso":
            sp.add_argument("--trials", type=int, default=iso.DEFAULT_TRIALS)
            sp.add_argument("--seed", type=int, default=iso.DEFAULT_SEED)
        if name == "normalize":
            sp.add_argument("--raw", action="store_true",
                            help="print without the display conventions")
    return ap


def _fill_positionals(ap, args) -> None:
    _fn, positionals, _ = COMMANDS[args.command]
    given = [getattr(args, p) for p in positionals]
    if args.file is not None:
        if any(g is not None for g in given):
            ap.error("give the arguments either inline or with --file, not both")
        try:
            with open(args.file, encoding="utf-8") as fh:
                lines = [ln.strip() for ln in fh if ln.strip()]
        except OSError as e:
            raise Error(f"cannot read {args.file}: {e.strerror}") from e
        if len(lines) != len(positionals):
            raise Error(f"{args.file}: expected {len(positionals)} non-empty lines "
                        f"({', '.join(positionals)}), found {len(lines)}")
        given = lines
    missing = [p for p, g in zip(positionals, given) if g is None]
    if missing:
        ap.error("missing argument(s): " + ", ".join(missing))
    for p, g in zip(positionals, given):
        setattr(args, p, g)
    if args.command == "iso" and args.trials < 1:
        ap.error("--trials must be at least 1")


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USER if e.code else EXIT_OK
    try:
        _fill_positionals(ap, args)
        return run_deep(COMMANDS[args.command][0], args)
    except SystemExit as e:
        return EXIT_USER if e.code else EXIT_OK
    except Error as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USER
    except InternalError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
