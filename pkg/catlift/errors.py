"""
Exception hierarchy shared by every service and the command line front end.
"""

from typing import Iterable, Optional


class CatliftError(Exception):
    """Base error carrying a message, an optional witness and an exit code."""

    exit_code = 2

    def __init__(self, detail: str, witness: Optional[Iterable[str]] = None):
        super().__init__(detail)
        self.detail = detail
        self.witness = tuple(witness) if witness is not None else ()

    def __str__(self) -> str:
        if self.witness:
            return f"{self.detail} (witness: {', '.join(self.witness)})"
        return self.detail


class ConfigError(CatliftError):
    """An environment setting could not be parsed."""

    exit_code = 2


class PreconditionError(CatliftError):
    """An operation was called on inputs outside its domain."""

    exit_code = 2


class SizeLimitExceeded(CatliftError):
    """A brute-force search would exceed the configured guard."""

    exit_code = 2


class LiftError(CatliftError):
    """A lift that should exist uniquely was missing or ambiguous."""

    exit_code = 1

    NOT_FOUND = "not-found"
    NON_UNIQUE = "non-unique"

    def __init__(self, kind: str, detail: str, witness: Optional[Iterable[str]] = None):
        super().__init__(f"{kind}: {detail}", witness)
        self.kind = kind


class DiagramError(CatliftError):
    """A (co)algebra diagram or cell condition does not commute."""

    exit_code = 1


class StrategyMismatch(CatliftError):
    """The closed-formula and universal-property lifts disagree."""

    exit_code = 1


class DocumentError(CatliftError):
    """A document could not be parsed or does not describe a valid object."""

    exit_code = 2

    def __init__(
        self,
        detail: str,
        location: Optional[str] = None,
        witness: Optional[Iterable[str]] = None,
    ):
        message = f"{location}: {detail}" if location else detail
        super().__init__(message, witness)
        self.location = location
