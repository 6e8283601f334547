from __future__ import annotations

import enum


class ParseCause(enum.Enum):
    EMPTY = "empty input"
    TOO_LONG = "input too long"
    TOO_DEEP = "nesting too deep"
    UNBALANCED_PAREN = "unbalanced parenthesis"
    UNEXPECTED_TOKEN = "unexpected token"
    UNEXPECTED_END = "unexpected end of input"
    TRAILING_TEXT = "trailing text"
    UNKNOWN_OPERATOR = "unknown operator"
    SPECIAL_TOKEN = "special token"


class ParseFailure(ValueError):
    """Raised by the formula parser. ``span`` holds (start, end) string offsets."""

    def __init__(self, cause: ParseCause, span: tuple[int, int], text: str = "", detail: str = ""):
        self.cause = cause
        self.span = span
        self.text = text
        self.detail = detail
        fragment = text[span[0]:span[1]]
        msg = f"{cause.value} at {span[0]}"
        if fragment:
            msg += f": {fragment!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)

    @property
    def fragment(self) -> str:
        return self.text[self.span[0]:self.span[1]]

    def __reduce__(self):
        return (type(self), (self.cause, self.span, self.text, self.detail))


class FormattingFailure(ValueError):
    """A generation that does not follow the Predicates / Premises / Conclusion layout."""

    def __init__(self, reason: str, missing: tuple[str, ...] = ()):
        self.reason = reason
        self.missing = missing
        super().__init__(reason)

    def __reduce__(self):
        return (type(self), (self.reason, self.missing))


class FreeVariableError(ValueError):
    def __init__(self, names):
        self.names = tuple(sorted(names))
        super().__init__(f"formula is not closed; free variables: {', '.join(self.names)}")
