"""Exception types shared across the toolkit."""

from __future__ import annotations


class SvaError(Exception):
    """Base class for every error raised by this package."""


class LexError(SvaError):
    def __init__(self, position: int, message: str = "unexpected character"):
        self.position = position
        self.message = message
        super().__init__(f"{message} at offset {position}")


class ParseError(SvaError):
    def __init__(self, position: int, expected: str, found: str = ""):
        self.position = position
        self.expected = expected
        self.found = found
        detail = f", found {found!r}" if found else ""
        super().__init__(f"expected {expected} at offset {position}{detail}")


class ClassifyError(SvaError):
    pass


class NormalizeError(SvaError):
    pass


class WrapError(SvaError):
    pass


class UnsupportedConstruct(SvaError):
    """Raised by lowering when a property leaves the bounded fragment."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"unsupported ({reason}){': ' + detail if detail else ''}")


class CheckSyntaxError(SvaError):
    """One side of an equivalence query failed to parse."""

    def __init__(self, side: str, cause: Exception):
        self.side = side
        self.cause = cause
        super().__init__(f"{side}: {cause}")


class ConfigError(SvaError):
    pass


class SolverError(SvaError):
    pass


class SchemaError(SvaError):
    """A JSONL row that does not match the expected schema."""

    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")
