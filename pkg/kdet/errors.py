"""
Exception hierarchy shared by the engine and the CLI.
"""

from typing import Optional


class KdetError(Exception):
    """Base class for every error raised by kdet."""

    exit_code = 1


def _where(path: Optional[str], line: Optional[int]) -> str:
    if path is None:
        return ""
    return f"{path}:{line}: " if line is not None else f"{path}: "


class ParseError(KdetError):
    """Malformed input text; carries the file and line when known."""

    exit_code = 2

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        super().__init__(f"{_where(path, line)}{message}")


class DomainError(KdetError):
    """The input is well formed but violates a mathematical precondition."""

    path: Optional[str] = None
    line: Optional[int] = None

    def at(self, path: str, line: Optional[int]) -> "DomainError":
        """Attach the input location of the offending object and prefix the message with it."""
        self.path, self.line = path, line
        if self.args:
            self.args = (f"{_where(path, line)}{self.args[0]}",) + self.args[1:]
        return self


class RingError(DomainError):
    """Unsupported ring, or an operation the ring cannot perform."""


class NotAUnitError(DomainError):
    pass


class NotInvertibleError(DomainError):
    pass


class InvalidComplexError(DomainError):
    """d∘d ≠ 0 or a shape mismatch; ``degree`` is the first failing degree."""

    def __init__(self, message: str, degree: Optional[int] = None):
        self.degree = degree
        super().__init__(message)


class InvalidChainMapError(DomainError):
    pass


class InvalidSesError(DomainError):
    pass


class NotAcyclicError(DomainError):
    pass


class NotQuasiIsomorphismError(DomainError):
    pass


class HomotopyMismatchError(DomainError):
    """A supplied homotopy witness does not satisfy a − b = dh + hd."""


class UnsupportedPairError(DomainError):
    pass


class SearchTooLargeError(DomainError):
    pass
