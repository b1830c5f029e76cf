class Error(Exception):
    """Base class for user-facing errors (bad input, ill-typed terms)."""


class ParseError(Error):
    def __init__(self, msg: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{msg} at position {pos}")


class UnboundVariable(Error):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable {name!r}")


class TypeMismatch(Error):
    """Raised by the checkers; carries the offending subterm."""

    def __init__(self, term, expected, actual, msg: str = ""):
        self.term = term
        self.expected = expected
        self.actual = actual
        detail = msg or f"expected {expected}, got {actual}"
        super().__init__(f"type mismatch in {term}: {detail}")


class ReadbackError(Error):
    pass


class InternalError(Exception):
    """An invariant was violated. Never caused by user input."""
