"""
Module comprising the exception hierarchy.

@date: Oct 2026
"""

__all__ = [
    "NesyError",
    "ParseError",
    "LanguageError",
    "GroundingError",
    "ConfigurationError",
    "DimensionError",
    "ParameterError",
    "SpecError",
    "UsageError",
    "TrainingError",
    "CheckpointError",
]


class NesyError(Exception):
    """Base class for all package errors."""


class ParseError(NesyError):
    """Malformed rule or language source."""

    def __init__(self, message, line=None):
        self.line = line
        where = "end-of-input" if line is None else f"line {line}"
        super().__init__(f"{where}: {message}")


class LanguageError(NesyError):
    """Inconsistent language declaration or rule."""


class GroundingError(NesyError):
    """A rule cannot be grounded with the declared constants."""


class ConfigurationError(NesyError):
    """Components or configuration do not fit together."""

    def __init__(self, message, problems=None):
        self.problems = list(problems or [])
        if self.problems:
            message = message + "\n" + "\n".join(f"  - {p}" for p in self.problems)
        super().__init__(message)


class DimensionError(NesyError):
    """Tensor shapes do not match the reasoning graph or network."""


class ParameterError(NesyError):
    """A numerical parameter is outside its domain."""


class SpecError(NesyError):
    """Invalid environment specification."""


class UsageError(NesyError):
    """An object was used out of order."""


class TrainingError(NesyError):
    """An update produced non-finite values."""


class CheckpointError(NesyError):
    """Corrupt or incompatible checkpoint file."""
