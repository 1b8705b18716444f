"""Exception hierarchy shared by the solver and its command line front end."""


class FmdpError(Exception):
    """Base class for every error this package raises deliberately."""


class InvalidInputError(FmdpError):
    """A model, file, or argument failed parsing or validation."""


class OracleLimitError(InvalidInputError):
    """The explicit-state oracle was asked to enumerate too many states."""


class LpInternalError(FmdpError):
    """An internally produced LP or certificate failed its own consistency check.

    This is never the user's fault: it means a solver component broke its
    contract, and callers should treat it as a bug report rather than bad input.
    """
