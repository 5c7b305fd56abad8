"""Shared exceptions for the QED workbench."""

from typing import Optional


class QedLabError(Exception):
    """Base class for every error raised by the workbench."""
    pass


class DomainError(QedLabError):
    """Raised for malformed states or instructions (location or value out of range)."""
    pass


class DupMapError(QedLabError):
    """Raised when a location partition or bijection is invalid."""

    def __init__(self, message: str, location: Optional[int] = None):
        super().__init__(message)
        self.location = location


class NotOriginalError(DomainError):
    """Raised when duplicating an instruction that is not original."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class NotDuplicateError(DomainError):
    """Raised when mapping back an instruction that is not a duplicate."""
    pass


class SpecConfigurationError(QedLabError):
    """Raised when an opcode is not covered by the specification."""
    pass


class ContractError(QedLabError):
    """Raised when an operation is called outside its contract."""
    pass


class BudgetExceededError(QedLabError):
    """Raised when an enumeration exceeds its configured budget."""

    def __init__(self, message: str, partial_count: int = 0, partial=None):
        super().__init__(message)
        self.partial_count = partial_count
        self.partial = partial


class PreconditionError(QedLabError):
    """Raised when a QED test is started from an unsuitable state."""
    pass


class UnsupportedError(QedLabError):
    """Raised when a system lacks the hardware support an operation needs."""
    pass


class ConstructionError(QedLabError):
    """Raised when a test constructor cannot build the requested test."""
    pass


class OutOfScopeError(ConstructionError):
    """Raised for bug prefixes shorter than two instructions."""
    pass


class ConfigError(QedLabError):
    """Raised for invalid processor or run configuration."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        super().__init__(message)
        self.field = field
        self.line = line


class UnknownLawError(QedLabError):
    """Raised for a law id that is not registered."""
    pass
