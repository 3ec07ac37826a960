"""Exception types shared across the package."""


class TheorykitError(Exception):
    """Base class for all package-specific errors."""


class TruncationError(TheorykitError):
    """A computation would need values beyond the supplied bound.

    Raised instead of silently truncating: callers that want partial
    results must ask for them explicitly (e.g. tree enumeration returns
    an exactness flag instead of raising).
    """


class CapabilityError(TheorykitError):
    """The requested construction is not computable for these inputs.

    Word problems for general finitely presented theories are
    undecidable; operations that need concrete carriers are only
    supported for finite theories or for free objects over free
    theories.  Anything else is rejected with this error.
    """


class FunctorialityError(TheorykitError):
    """An action table violates identity or composition laws."""
