"""Exception types shared across the toolkit.

Everything raised deliberately by sqzkit derives from :class:`SqzkitError`,
so callers (notably the CLI) can catch one type and turn it into a clean
error report instead of a traceback.
"""


class SqzkitError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(SqzkitError, ValueError):
    """An argument is outside its documented domain (bad index, T > 1, ...)."""


class DimensionMismatchError(InvalidArgumentError):
    """Array shapes do not agree (state vs map, trace pair lengths, ...)."""


class DegenerateInputError(SqzkitError):
    """Input is formally valid but carries no information for the requested
    operation (all-constant traces in a delay search, all-zero-power sweeps)."""


class ScenarioFormatError(SqzkitError):
    """A scenario/trace/sweep file failed schema or syntax validation."""
