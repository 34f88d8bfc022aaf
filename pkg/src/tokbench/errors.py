"""Shared exception types, mapped to CLI exit codes in tokbench.cli."""


class TokbenchError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(TokbenchError):
    """Invalid configuration value or an operation precondition violation."""


class FormatError(TokbenchError):
    """Malformed input or artifact file."""


class DumpParseError(FormatError):
    """Corpus dump could not be parsed; carries a best-effort byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class DumpEncodingError(DumpParseError):
    """Corpus dump bytes do not decode in the configured encoding."""


class MissingArtifactError(TokbenchError):
    """A pipeline stage input is missing; message names the producing stage."""


class DivergenceError(TokbenchError):
    """Optimizer produced a non-finite loss; carries the step size used."""

    def __init__(self, message: str, step_size: float | None = None):
        super().__init__(message)
        self.step_size = step_size
