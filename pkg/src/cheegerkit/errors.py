class CheegerKitError(Exception):
    """Base class for all library errors."""


class ComplexError(CheegerKitError, ValueError):
    pass


class DimensionError(CheegerKitError, ValueError):
    pass


class MalformedFacetError(ComplexError):
    pass


class EnumerationCapError(CheegerKitError):
    """Raised when an exact enumeration would exceed its configured cap."""


class InfiniteCoverError(CheegerKitError):
    pass


class OracleViolation(CheegerKitError):
    """A transport oracle broke its stated contract at some step."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class InvariantViolation(CheegerKitError):
    """An algorithm invariant failed; usually points at an incidence bug."""


class NotRationalHomologySphere(CheegerKitError):
    pass
