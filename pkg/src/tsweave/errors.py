"""Exception and warning types shared across the package."""


class WeaverError(Exception):
    """Base class for every error raised by tsweave."""


class ValidationError(WeaverError, ValueError):
    """Input data or parameters violate a precondition.

    ``index`` points at the offending element when one can be named.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NumericalError(WeaverError, ArithmeticError):
    """A numerical stage could not produce a finite, well-defined result."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class StageError(WeaverError):
    """Failure of one pipeline stage; the original exception is ``__cause__``."""

    def __init__(self, stage_index, kind, cause):
        super().__init__(f"stage {stage_index} ({kind}): {cause}")
        self.stage_index = stage_index
        self.kind = kind
        self.cause = cause


class PartialGroupWarning(UserWarning):
    """Trailing samples did not fill a whole averaging group and were dropped."""


class SignFlipWarning(UserWarning):
    """Integral matching had to push some samples through zero."""
