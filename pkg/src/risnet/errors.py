"""Exception hierarchy shared by every risnet module."""

from __future__ import annotations


class NetworkError(Exception):
    """Base class for all risnet errors."""


class SingularMatrixError(NetworkError):
    """A matrix that must be inverted is numerically singular.

    ``cond`` holds the condition number that tripped the check (``inf`` when
    the factorisation itself failed).
    """

    def __init__(self, message: str, cond: float = float("inf")):
        super().__init__(f"{message} (condition number {cond:.3e})")
        self.cond = cond


class SingularConversion(SingularMatrixError):
    pass


class SingularTermination(SingularMatrixError):
    pass


class SingularCascade(SingularMatrixError):
    pass


class SingularNodal(SingularMatrixError):
    pass


class IndexOutOfRange(NetworkError, IndexError):
    pass


class InvalidPartition(NetworkError, ValueError):
    pass


class PartitionMismatch(NetworkError, ValueError):
    pass


class ReferenceImpedanceMismatch(NetworkError, ValueError):
    pass


class InvalidLoad(NetworkError, ValueError):
    pass


class InvalidSkeleton(NetworkError, ValueError):
    pass


class SearchSpaceTooLarge(NetworkError):
    pass


class ParseError(NetworkError, ValueError):
    """Malformed network file. ``line`` is 1-based, or ``None`` for whole-file problems."""

    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class FrequencyNotFound(NetworkError, LookupError):
    pass


class ConfigError(NetworkError, ValueError):
    pass
