"""Exception hierarchy."""

from typing import List, Optional


class AdicSurfError(Exception):
    """Base class for all library errors."""


class DiagramFormatError(AdicSurfError):
    """A `.bdg` document could not be parsed."""

    def __init__(self, diagnostics: List[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(self.diagnostics))


class WindowError(AdicSurfError):
    """A level or depth lies outside the truncation window."""

    def __init__(self, message: str, needed: Optional[int] = None):
        self.needed = needed
        super().__init__(message)


class WeightError(AdicSurfError):
    """Weights are missing or unusable for the requested operation."""


class ParameterError(AdicSurfError):
    """Invalid family, rule or command parameters."""


class DomainError(AdicSurfError):
    """A point lies outside the domain of a map or surface."""
